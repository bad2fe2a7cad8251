import * as fs from 'node:fs';

/**
 * Configuration of the toy pillar scorer. Field meanings match the
 * engine's built-in detector so the two stay interchangeable; the JSON
 * file format is the engine's snake_case serialization.
 */
export interface ScorerParams {
  voxel: number;
  sigma: number;
  shellCells: number;
  wShell: number;
  wInterior: number;
  wHeight: number;
  roofCut: number;
  roofSmooth: number;
  bias: number;
  tau: number;
}

export const DEFAULT_PARAMS: ScorerParams = {
  voxel: 0.2,
  sigma: 0.15,
  shellCells: 2,
  wShell: 6.0,
  wInterior: 6.0,
  wHeight: 0.25,
  roofCut: 0.7,
  roofSmooth: 0.1,
  bias: -0.05,
  tau: 0.5,
};

const FIELD_FOR_KEY: Record<string, keyof ScorerParams> = {
  voxel: 'voxel',
  sigma: 'sigma',
  shell_cells: 'shellCells',
  w_shell: 'wShell',
  w_interior: 'wInterior',
  w_height: 'wHeight',
  roof_cut: 'roofCut',
  roof_smooth: 'roofSmooth',
  bias: 'bias',
  tau: 'tau',
};

export function paramsFromJson(text: string): ScorerParams {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new Error(`malformed params JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new Error('params document must be an object');
  }
  const out: ScorerParams = { ...DEFAULT_PARAMS };
  for (const [key, value] of Object.entries(doc)) {
    const field = FIELD_FOR_KEY[key];
    if (field === undefined) {
      throw new Error(`unknown params key "${key}"`);
    }
    if (typeof value !== 'number' || !Number.isFinite(value)) {
      throw new Error(`params key "${key}" must be a finite number`);
    }
    out[field] = value;
  }
  validate(out);
  return out;
}

export function loadParams(path: string): ScorerParams {
  return paramsFromJson(fs.readFileSync(path, 'utf8'));
}

function validate(p: ScorerParams): void {
  if (p.voxel <= 0 || p.sigma <= 0) {
    throw new Error('voxel and sigma must be positive');
  }
  if (!Number.isInteger(p.shellCells) || p.shellCells < 1) {
    throw new Error('shell_cells must be a positive integer');
  }
  if (!(p.roofCut > 0 && p.roofCut < 1)) {
    throw new Error('roof_cut must lie in (0, 1)');
  }
  if (p.roofSmooth <= 0) {
    throw new Error('roof_smooth must be positive');
  }
  if (!(p.tau > 0 && p.tau < 1)) {
    throw new Error('tau must lie in (0, 1)');
  }
}
