"""Exception hierarchy shared across the toolkit.

Every error raised by vpatch derives from VPatchError so callers can catch
the whole family.  The CLI maps subclasses onto exit codes (config -> 2,
format/io -> 3, detector -> 4).
"""


class VPatchError(Exception):
    """Base class for all vpatch errors."""


class FormatError(VPatchError):
    """Malformed input data (scene files, labels, calibration, masks)."""


class ConfigError(VPatchError):
    """Invalid configuration or parameter combination."""


class DetectorError(VPatchError):
    """A detector handle failed to produce a score or gradient."""


class NoMatchError(VPatchError):
    """No predicted box overlaps the focus region (all IOUs zero)."""
