import * as fs from 'node:fs';

/** A point cloud read from a snapshot file: positions only, row-major. */
export interface Snapshot {
  n: number;
  /** xyz[3*i + c] is coordinate c of point i, promoted to float64. */
  xyz: Float64Array;
}

const BYTES_PER_POINT = 16; // x, y, z, intensity as little-endian float32

/**
 * Read a raw float32 snapshot (see PROTOCOL.md). The intensity column is
 * decoded and dropped; the scorer is geometric.
 */
export function readSnapshot(path: string, nPoints: number): Snapshot {
  if (!Number.isInteger(nPoints) || nPoints < 0) {
    throw new Error(`n_points must be a non-negative integer, got ${nPoints}`);
  }
  const raw = fs.readFileSync(path);
  const expected = nPoints * BYTES_PER_POINT;
  if (raw.byteLength !== expected) {
    throw new Error(
      `snapshot ${path}: ${raw.byteLength} bytes, expected ${expected} for ${nPoints} points`,
    );
  }
  // Buffers from readFileSync may sit at unaligned offsets in the pool,
  // so copy into a fresh ArrayBuffer before viewing as float32.
  const aligned = new ArrayBuffer(raw.byteLength);
  new Uint8Array(aligned).set(raw);
  const f32 = new Float32Array(aligned);
  const xyz = new Float64Array(nPoints * 3);
  for (let i = 0; i < nPoints; i++) {
    for (let c = 0; c < 3; c++) {
      const v = f32[4 * i + c];
      if (!Number.isFinite(v)) {
        throw new Error(`snapshot ${path}: non-finite coordinate at point ${i}`);
      }
      xyz[3 * i + c] = v;
    }
  }
  return { n: nPoints, xyz };
}

/** Build an in-memory snapshot from row-major [x, y, z] triples. */
export function snapshotFromPoints(points: ReadonlyArray<readonly number[]>): Snapshot {
  const xyz = new Float64Array(points.length * 3);
  points.forEach((p, i) => {
    xyz[3 * i] = p[0];
    xyz[3 * i + 1] = p[1];
    xyz[3 * i + 2] = p[2];
  });
  return { n: points.length, xyz };
}
