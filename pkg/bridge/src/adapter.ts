import { Box, LogitResult, ScoreResult, ScoringModel } from './model';
import { Snapshot } from './snapshot';

/**
 * Skeleton for serving a real detector through this provider. It is a
 * template, not a working integration: every method throws until filled
 * in. To use it, implement the two methods, then swap the model in
 * server.ts:
 *
 *   const provider = createProvider(new RealDetectorAdapter(...), tau);
 *
 * What an implementation has to supply:
 *
 * - logit(): run the detector on the snapshot points, take the candidate
 *   box's classification score before the final squashing/NMS stage, and
 *   return it. `flagged` should report "nothing supports this box", for
 *   example an empty proposal overlap.
 * - scoreWithGradient(): the same forward pass with the input points
 *   marked as differentiable, backpropagating the logit to the point
 *   coordinates. Frameworks with autograd give this directly; the
 *   gradient must come back as one float64 triple per input point, in
 *   input order, zero for points the model never saw.
 *
 * Heavyweight concerns (model loading, device placement, batching) stay
 * inside the adapter; the protocol layer above is already sequential and
 * stateless, so the adapter may cache whatever it wants keyed on the
 * snapshot path.
 */
export class RealDetectorAdapter implements ScoringModel {
  constructor(readonly checkpointPath: string) {}

  logit(_snap: Snapshot, _box: Box): LogitResult {
    throw new Error(
      `RealDetectorAdapter is a skeleton; load ${this.checkpointPath} and implement logit()`,
    );
  }

  scoreWithGradient(_snap: Snapshot, _box: Box): ScoreResult {
    throw new Error(
      `RealDetectorAdapter is a skeleton; load ${this.checkpointPath} and implement scoreWithGradient()`,
    );
  }
}
