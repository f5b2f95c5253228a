/**
 * Weight-file export. The interchange format is the primary toolchain's
 * "roughnet-weights/1" JSON schema: an (N+1) x d series with d = width^2 + 1.
 * The first width^2 channels hold cumulative sums of the flattened layer
 * matrices (so the series increments are exactly the per-layer weights) and
 * the last channel is the time ramp w_k = k. The raw per-layer matrices ride
 * along under meta for inspection.
 */
import type { TrainConfig } from './model.js';

export const WEIGHT_FORMAT = 'roughnet-weights/1';

export interface WeightFile {
  format: string;
  N: number;
  m: number;
  d: number;
  series: number[][];
  meta: Record<string, unknown>;
}

export interface MetricsReport {
  finalTrainAccuracy: number;
  meanLoss: number | null;
  /** increment sequence of the designated entry (0,0): theta_k[0][0] per layer */
  entry00Increments: number[];
}

export function buildWeightFile(
  thetas: number[][][],
  config: TrainConfig,
  metrics: MetricsReport,
): WeightFile {
  const N = thetas.length;
  const m = thetas[0].length;
  const d = m * m + 1;
  const series: number[][] = [];
  const acc = new Array<number>(m * m).fill(0);
  for (let k = 0; k <= N; k++) {
    series.push([...acc, k]);
    if (k < N) {
      const theta = thetas[k];
      for (let i = 0; i < m; i++) {
        for (let j = 0; j < m; j++) acc[i * m + j] += theta[i][j];
      }
    }
  }
  return {
    format: WEIGHT_FORMAT,
    N,
    m,
    d,
    series,
    meta: {
      source: 'roughnet-trainer',
      convention: 'cumulative-flattened-layer-matrices-plus-time-ramp',
      config: {
        depth: config.depth,
        width: config.width,
        activation: config.activation,
        epochs: config.epochs,
        learningRate: config.learningRate,
        seed: config.seed,
        samplesPerClass: config.samplesPerClass,
      },
      metrics,
      rawThetas: thetas,
    },
  };
}

/** Throws with a descriptive message if the document breaks the schema. */
export function validateWeightFile(doc: unknown): WeightFile {
  const obj = doc as Record<string, unknown>;
  if (!obj || obj.format !== WEIGHT_FORMAT) {
    throw new Error(`not a ${WEIGHT_FORMAT} document`);
  }
  const { N, d } = obj;
  if (!Number.isInteger(N) || (N as number) < 1) throw new Error('bad N');
  if (!Number.isInteger(d) || (d as number) < 1) throw new Error('bad d');
  if (obj.m !== undefined && (!Number.isInteger(obj.m) || (obj.m as number) < 1)) {
    throw new Error('bad m');
  }
  const series = obj.series;
  if (!Array.isArray(series) || series.length !== (N as number) + 1) {
    throw new Error('series must have N+1 rows');
  }
  for (const row of series) {
    if (!Array.isArray(row) || row.length !== d) {
      throw new Error(`every series row must have ${d} entries`);
    }
    for (const v of row) {
      if (typeof v !== 'number' || !Number.isFinite(v)) {
        throw new Error('series entries must be finite numbers');
      }
    }
  }
  return obj as unknown as WeightFile;
}

/** Deterministic serialization: fixed key order, default number formatting. */
export function serializeWeightFile(file: WeightFile): string {
  return JSON.stringify(file, null, 1) + '\n';
}
