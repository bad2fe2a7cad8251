import { ScorerParams } from './params';
import { Snapshot } from './snapshot';

/**
 * Differentiable toy detector, a line-for-line port of the engine's
 * built-in pillar scorer so the two agree to float64 rounding. The logit
 * is a logistic regression over three pooled features of the box
 * footprint grid: occupancy of the border band of cells, clutter in the
 * interior cells discounted above the roof line, and the kernel-weighted
 * mean point height. Every feature uses Gaussian soft assignment of
 * points to cells, which keeps the logit smooth in all point coordinates
 * and gives closed-form gradients.
 */

export interface Box {
  center: [number, number, number];
  lwh: [number, number, number];
  yaw: number;
  cls: string;
}

export interface LogitResult {
  logit: number;
  flagged: boolean;
}

export interface ScoreResult extends LogitResult {
  /** gradient[3*i + c]: d logit / d coordinate c of point i. */
  gradient: Float64Array;
}

export interface DetectionRow {
  index: number;
  probability: number;
  logit: number;
}

/**
 * What a scoring backend must expose to be served over the wire. The toy
 * model below implements it exactly; adapter.ts sketches how a real
 * detector would.
 */
export interface ScoringModel {
  logit(snap: Snapshot, box: Box): LogitResult;
  scoreWithGradient(snap: Snapshot, box: Box): ScoreResult;
}

const KNOWN_CLASSES = new Set(['Car', 'Pedestrian', 'Cyclist']);

const MASS_EPS = 1e-9; // denominator guard for the weighted height mean
const SUPPORT_SIGMAS = 8.0; // points beyond this dilation cannot move the logit
const FLAG_SIGMAS = 2.0; // "neighborhood is empty" diagnostic distance

export function sigmoid(x: number): number {
  if (x >= 0) {
    return 1 / (1 + Math.exp(-x));
  }
  const e = Math.exp(x);
  return e / (1 + e);
}

/** Validate one wire-format box payload (see PROTOCOL.md). */
export function parseBox(payload: unknown): Box {
  if (typeof payload !== 'object' || payload === null) {
    throw new Error('box must be an object');
  }
  const doc = payload as Record<string, unknown>;
  const center = numberTriple(doc.center, 'box.center');
  const lwh = numberTriple(doc.lwh, 'box.lwh');
  if (lwh.some((d) => d <= 0)) {
    throw new Error('box.lwh entries must be positive');
  }
  if (typeof doc.yaw !== 'number' || !Number.isFinite(doc.yaw)) {
    throw new Error('box.yaw must be a finite number');
  }
  if (typeof doc.class !== 'string' || !KNOWN_CLASSES.has(doc.class)) {
    throw new Error(`box.class must be one of ${[...KNOWN_CLASSES].join(', ')}`);
  }
  return { center, lwh, yaw: doc.yaw, cls: doc.class };
}

function numberTriple(value: unknown, what: string): [number, number, number] {
  if (!Array.isArray(value) || value.length !== 3) {
    throw new Error(`${what} must be an array of 3 numbers`);
  }
  for (const v of value) {
    if (typeof v !== 'number' || !Number.isFinite(v)) {
      throw new Error(`${what} entries must be finite numbers`);
    }
  }
  return [value[0], value[1], value[2]];
}

export class ToyPillarModel implements ScoringModel {
  constructor(readonly params: ScorerParams) {}

  logit(snap: Snapshot, box: Box): LogitResult {
    const { logit, flagged } = scoreXyz(snap, box, this.params, false);
    return { logit, flagged };
  }

  scoreWithGradient(snap: Snapshot, box: Box): ScoreResult {
    const { logit, flagged, gradient } = scoreXyz(snap, box, this.params, true);
    return { logit, flagged, gradient: gradient! };
  }

  /** Candidates at or above tau, sorted by probability then index. */
  detect(snap: Snapshot, boxes: readonly Box[]): DetectionRow[] {
    const hits: DetectionRow[] = [];
    boxes.forEach((box, index) => {
      const { logit } = this.logit(snap, box);
      const probability = sigmoid(logit);
      if (probability >= this.params.tau) {
        hits.push({ index, probability, logit });
      }
    });
    hits.sort((a, b) => b.probability - a.probability || a.index - b.index);
    return hits;
  }
}

interface Internal {
  logit: number;
  flagged: boolean;
  gradient: Float64Array | null;
}

/** Indices of points strictly inside the box dilated by margin per side. */
function dilatedIndices(snap: Snapshot, box: Box, margin: number): number[] {
  const [cx, cy, cz] = box.center;
  const [l, w, h] = box.lwh;
  const cos = Math.cos(box.yaw);
  const sin = Math.sin(box.yaw);
  const hu = l / 2 + margin;
  const hv = w / 2 + margin;
  const hz = h / 2 + margin;
  const out: number[] = [];
  for (let i = 0; i < snap.n; i++) {
    const dx = snap.xyz[3 * i] - cx;
    const dy = snap.xyz[3 * i + 1] - cy;
    const dz = snap.xyz[3 * i + 2] - cz;
    const lu = cos * dx + sin * dy;
    const lv = -sin * dx + cos * dy;
    if (Math.abs(lu) < hu && Math.abs(lv) < hv && Math.abs(dz) < hz) {
      out.push(i);
    }
  }
  return out;
}

function scoreXyz(snap: Snapshot, box: Box, params: ScorerParams, withGradient: boolean): Internal {
  const sigma = params.sigma;
  const flagged = dilatedIndices(snap, box, FLAG_SIGMAS * sigma).length === 0;
  const support = dilatedIndices(snap, box, SUPPORT_SIGMAS * sigma);
  const s = support.length;
  if (s === 0) {
    return {
      logit: params.bias,
      flagged: true,
      gradient: withGradient ? new Float64Array(snap.n * 3) : null,
    };
  }

  const [cx, cy, cz] = box.center;
  const [l, w, h] = box.lwh;
  const cos = Math.cos(box.yaw);
  const sin = Math.sin(box.yaw);
  const hl = l / 2;
  const hw = w / 2;

  // Box-frame footprint coordinates (u along length, v along width, both
  // shifted to start at 0) plus normalized height per supported point.
  const u = new Float64Array(s);
  const v = new Float64Array(s);
  const height = new Float64Array(s);
  for (let p = 0; p < s; p++) {
    const i = support[p];
    const dx = snap.xyz[3 * i] - cx;
    const dy = snap.xyz[3 * i + 1] - cy;
    const dz = snap.xyz[3 * i + 2] - cz;
    u[p] = cos * dx + sin * dy + hl;
    v[p] = -sin * dx + cos * dy + hw;
    height[p] = (dz + h / 2) / h;
  }

  const rows = Math.ceil(l / params.voxel);
  const cols = Math.ceil(w / params.voxel);
  const cells = rows * cols;
  const cell = params.voxel;
  const centerU = new Float64Array(cells);
  const centerV = new Float64Array(cells);
  const inBand = new Uint8Array(cells);
  const t = params.shellCells;
  let bandCount = 0;
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const c = i * cols + j;
      centerU[c] = (i + 0.5) * cell;
      centerV[c] = (j + 0.5) * cell;
      if (i < t || i >= rows - t || j < t || j >= cols - t) {
        inBand[c] = 1;
        bandCount++;
      }
    }
  }
  const interiorCount = cells - bandCount;

  // Soft assignment kernel of every supported point to every cell.
  const kernel = new Float64Array(s * cells);
  const cellMass = new Float64Array(cells);
  const pointMass = new Float64Array(s);
  const inv2s2 = 1 / (2 * sigma * sigma);
  for (let p = 0; p < s; p++) {
    for (let c = 0; c < cells; c++) {
      const du = u[p] - centerU[c];
      const dv = v[p] - centerV[c];
      const k = Math.exp(-(du * du + dv * dv) * inv2s2);
      kernel[p * cells + c] = k;
      cellMass[c] += k;
      pointMass[p] += k;
    }
  }

  // Logistic hull weight: ~1 below the roof line, ~0 above it, so roof
  // returns do not count as interior clutter. The clip only touches
  // weights within 1e-26 of saturation.
  const hull = new Float64Array(s);
  for (let p = 0; p < s; p++) {
    let arg = (height[p] - params.roofCut) / params.roofSmooth;
    arg = Math.min(60, Math.max(-60, arg));
    hull[p] = 1 / (1 + Math.exp(arg));
  }

  const bandVacancy = new Float64Array(cells);
  let shellSum = 0;
  for (let c = 0; c < cells; c++) {
    if (inBand[c]) {
      bandVacancy[c] = Math.exp(-cellMass[c]);
      shellSum += 1 - bandVacancy[c];
    }
  }
  const shellOcc = shellSum / bandCount;

  const clutterVacancy = new Float64Array(cells);
  let interiorClutter = 0;
  if (interiorCount > 0) {
    let clutterSum = 0;
    for (let c = 0; c < cells; c++) {
      if (!inBand[c]) {
        let mass = 0;
        for (let p = 0; p < s; p++) {
          mass += hull[p] * kernel[p * cells + c];
        }
        clutterVacancy[c] = Math.exp(-mass);
        clutterSum += 1 - clutterVacancy[c];
      }
    }
    interiorClutter = clutterSum / interiorCount;
  }

  let denom = MASS_EPS;
  let heightSum = 0;
  for (let p = 0; p < s; p++) {
    denom += pointMass[p];
    heightSum += pointMass[p] * height[p];
  }
  const meanHeight = heightSum / denom;

  const logit =
    params.bias +
    params.wShell * shellOcc -
    params.wInterior * interiorClutter +
    params.wHeight * meanHeight;
  if (!withGradient) {
    return { logit, flagged, gradient: null };
  }

  const gradient = new Float64Array(snap.n * 3);
  const invS2 = 1 / (sigma * sigma);
  for (let p = 0; p < s; p++) {
    // d(kernel)/d(uv) accumulations over cell groups.
    let dshellU = 0;
    let dshellV = 0;
    let dclutterU = 0;
    let dclutterV = 0;
    let dmassU = 0;
    let dmassV = 0;
    let kernelClutterDot = 0;
    for (let c = 0; c < cells; c++) {
      const k = kernel[p * cells + c];
      const dkU = -k * (u[p] - centerU[c]) * invS2;
      const dkV = -k * (v[p] - centerV[c]) * invS2;
      dmassU += dkU;
      dmassV += dkV;
      if (inBand[c]) {
        dshellU += bandVacancy[c] * dkU;
        dshellV += bandVacancy[c] * dkV;
      } else {
        dclutterU += clutterVacancy[c] * dkU;
        dclutterV += clutterVacancy[c] * dkV;
        kernelClutterDot += k * clutterVacancy[c];
      }
    }
    dshellU /= bandCount;
    dshellV /= bandCount;
    let dclutterZ = 0;
    if (interiorCount > 0) {
      dclutterU = (hull[p] * dclutterU) / interiorCount;
      dclutterV = (hull[p] * dclutterV) / interiorCount;
      const dhull = (-hull[p] * (1 - hull[p])) / (params.roofSmooth * h);
      dclutterZ = (kernelClutterDot * dhull) / interiorCount;
    } else {
      dclutterU = 0;
      dclutterV = 0;
    }
    const dheightU = (dmassU * (height[p] - meanHeight)) / denom;
    const dheightV = (dmassV * (height[p] - meanHeight)) / denom;
    const dheightZ = pointMass[p] / (h * denom);

    const gu =
      params.wShell * dshellU - params.wInterior * dclutterU + params.wHeight * dheightU;
    const gv =
      params.wShell * dshellV - params.wInterior * dclutterV + params.wHeight * dheightV;
    const gz = params.wHeight * dheightZ - params.wInterior * dclutterZ;

    const i = support[p];
    gradient[3 * i] = cos * gu - sin * gv;
    gradient[3 * i + 1] = sin * gu + cos * gv;
    gradient[3 * i + 2] = gz;
  }
  return { logit, flagged, gradient };
}
