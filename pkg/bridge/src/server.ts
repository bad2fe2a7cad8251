import * as fs from 'node:fs';
import * as path from 'node:path';
import * as readline from 'node:readline';
import { DEFAULT_PARAMS, loadParams, ScorerParams } from './params';
import { readSnapshot, Snapshot } from './snapshot';
import { Box, parseBox, ScoringModel, sigmoid, ToyPillarModel } from './model';

/**
 * Detector provider over stdin/stdout, one JSON object per line; see
 * PROTOCOL.md at the repository root for the wire contract. Requests are
 * handled strictly one at a time, and the gradient sidecar of a score is
 * fully written before its reply line goes out.
 */

interface OkScoreReply {
  id: number;
  status: 'ok';
  logit: number;
  probability: number;
  flagged: boolean;
}

interface OkDetectReply {
  id: number;
  status: 'ok';
  detections: { index: number; probability: number; logit: number }[];
}

interface ErrorReply {
  id: number | null;
  status: 'error' | 'model_error';
  error: string;
}

export type Reply = OkScoreReply | OkDetectReply | ErrorReply;

export interface Provider {
  handleLine(line: string): Reply;
}

class RequestError extends Error {}

export function createProvider(model: ScoringModel, tau: number): Provider {
  return { handleLine: (line) => handle(model, tau, line) };
}

function handle(model: ScoringModel, tau: number, line: string): Reply {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (err) {
    return { id: null, status: 'error', error: `malformed request: ${(err as Error).message}` };
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    return { id: null, status: 'error', error: 'request must be a JSON object' };
  }
  const req = doc as Record<string, unknown>;
  const id = typeof req.id === 'number' && Number.isInteger(req.id) ? req.id : null;
  if (id === null) {
    return { id: null, status: 'error', error: 'request id must be an integer' };
  }
  try {
    switch (req.op) {
      case 'score':
        return scoreOp(model, id, req);
      case 'detect':
        return detectOp(model, tau, id, req);
      default:
        throw new RequestError(`unknown op ${JSON.stringify(req.op)}`);
    }
  } catch (err) {
    if (err instanceof RequestError) {
      return { id, status: 'error', error: err.message };
    }
    return { id, status: 'model_error', error: (err as Error).message };
  }
}

function loadRequestSnapshot(req: Record<string, unknown>): { snap: Snapshot; dir: string } {
  if (typeof req.scene !== 'string') {
    throw new RequestError('scene must be a path string');
  }
  if (typeof req.n_points !== 'number' || !Number.isInteger(req.n_points) || req.n_points < 0) {
    throw new RequestError('n_points must be a non-negative integer');
  }
  let snap: Snapshot;
  try {
    snap = readSnapshot(req.scene, req.n_points);
  } catch (err) {
    throw new RequestError((err as Error).message);
  }
  return { snap, dir: path.dirname(req.scene) };
}

function scoreOp(model: ScoringModel, id: number, req: Record<string, unknown>): OkScoreReply {
  const { snap, dir } = loadRequestSnapshot(req);
  let box: Box;
  try {
    box = parseBox(req.box);
  } catch (err) {
    throw new RequestError((err as Error).message);
  }
  const score = model.scoreWithGradient(snap, box);
  if (score.gradient.length !== snap.n * 3) {
    throw new Error(`model returned ${score.gradient.length / 3} gradient rows for ${snap.n} points`);
  }
  writeGradientSidecar(dir, id, score.gradient);
  return {
    id,
    status: 'ok',
    logit: score.logit,
    probability: sigmoid(score.logit),
    flagged: score.flagged,
  };
}

function detectOp(
  model: ScoringModel,
  tau: number,
  id: number,
  req: Record<string, unknown>,
): OkDetectReply {
  const { snap } = loadRequestSnapshot(req);
  if (!Array.isArray(req.boxes)) {
    throw new RequestError('boxes must be an array');
  }
  let boxes: Box[];
  try {
    boxes = req.boxes.map(parseBox);
  } catch (err) {
    throw new RequestError((err as Error).message);
  }
  const detections: { index: number; probability: number; logit: number }[] = [];
  boxes.forEach((box, index) => {
    const { logit } = model.logit(snap, box);
    const probability = sigmoid(logit);
    if (probability >= tau) {
      detections.push({ index, probability, logit });
    }
  });
  detections.sort((a, b) => b.probability - a.probability || a.index - b.index);
  return { id, status: 'ok', detections };
}

/** grad-<id padded to 8>.f32 next to the snapshot: float32 LE triples. */
function writeGradientSidecar(dir: string, id: number, gradient: Float64Array): void {
  const buf = Buffer.alloc(gradient.length * 4);
  for (let k = 0; k < gradient.length; k++) {
    buf.writeFloatLE(gradient[k], 4 * k);
  }
  fs.writeFileSync(path.join(dir, `grad-${String(id).padStart(8, '0')}.f32`), buf);
}

function main(argv: string[]): void {
  let params: ScorerParams = DEFAULT_PARAMS;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === '--params') {
      const file = argv[i + 1];
      if (file === undefined) {
        process.stderr.write('usage: server.js [--params <file>]\n');
        process.exit(2);
      }
      params = loadParams(file);
      i++;
    } else {
      process.stderr.write(`unknown argument ${argv[i]}\n`);
      process.exit(2);
    }
  }
  const provider = createProvider(new ToyPillarModel(params), params.tau);
  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on('line', (line) => {
    if (line.trim() === '') {
      return;
    }
    process.stdout.write(JSON.stringify(provider.handleLine(line)) + '\n');
  });
}

if (require.main === module) {
  main(process.argv.slice(2));
}
