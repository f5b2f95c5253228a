/**
 * A constant-width residual network with an identity skip at every layer:
 *
 *   y_{k+1} = y_k + tanh(theta_k y_k),  k = 0 .. depth-1
 *
 * followed by a linear two-class readout. Forward pass and backprop are
 * hand-rolled; the model is tiny and the point of this package is the
 * per-layer weight sequence, not the classifier.
 */
import { Rng } from './rng.js';
import type { Dataset } from './data.js';

export interface TrainConfig {
  depth: number;        // number of residual blocks (N)
  width: number;        // feature dimension (m)
  activation: 'tanh';
  epochs: number;
  learningRate: number;
  seed: number;
  /** samples per class for the synthetic dataset */
  samplesPerClass: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  depth: 128,
  width: 8,
  activation: 'tanh',
  epochs: 2,
  learningRate: 0.05,
  seed: 1,
  samplesPerClass: 100,
};

export function validateConfig(config: TrainConfig): void {
  if (!Number.isInteger(config.depth) || config.depth < 2) {
    throw new Error(`depth must be an integer >= 2, got ${config.depth}`);
  }
  if (!Number.isInteger(config.width) || config.width < 1) {
    throw new Error(`width must be an integer >= 1, got ${config.width}`);
  }
  if (config.activation !== 'tanh') {
    throw new Error(`unsupported activation ${config.activation}`);
  }
  if (!Number.isInteger(config.epochs) || config.epochs < 0) {
    throw new Error(`epochs must be a non-negative integer`);
  }
}

const NUM_CLASSES = 2;

export class ResidualNet {
  /** thetas[k] is a width x width matrix (row-major nested arrays) */
  thetas: number[][][];
  /** readout weights, NUM_CLASSES x width, plus biases */
  readout: number[][];
  biases: number[];
  readonly depth: number;
  readonly width: number;

  constructor(depth: number, width: number, rng: Rng) {
    this.depth = depth;
    this.width = width;
    // i.i.d. N(0, 1/width) entries per layer
    const scale = 1 / Math.sqrt(width);
    this.thetas = [];
    for (let k = 0; k < depth; k++) {
      const m: number[][] = [];
      for (let i = 0; i < width; i++) {
        const row = new Array<number>(width);
        for (let j = 0; j < width; j++) row[j] = scale * rng.normal();
        m.push(row);
      }
      this.thetas.push(m);
    }
    this.readout = [];
    for (let c = 0; c < NUM_CLASSES; c++) {
      const row = new Array<number>(width);
      for (let j = 0; j < width; j++) row[j] = scale * rng.normal();
      this.readout.push(row);
    }
    this.biases = new Array<number>(NUM_CLASSES).fill(0);
  }

  /** All intermediate features y_0 .. y_depth for one input. */
  forwardTrace(x: number[]): number[][] {
    const trace: number[][] = [x.slice()];
    let y = x.slice();
    for (let k = 0; k < this.depth; k++) {
      const theta = this.thetas[k];
      const next = y.slice();
      for (let i = 0; i < this.width; i++) {
        let a = 0;
        for (let j = 0; j < this.width; j++) a += theta[i][j] * y[j];
        next[i] += Math.tanh(a);
      }
      y = next;
      trace.push(y.slice());
    }
    return trace;
  }

  logits(yFinal: number[]): number[] {
    const z = this.biases.slice();
    for (let c = 0; c < NUM_CLASSES; c++) {
      for (let j = 0; j < this.width; j++) z[c] += this.readout[c][j] * yFinal[j];
    }
    return z;
  }

  predict(x: number[]): number {
    const trace = this.forwardTrace(x);
    const z = this.logits(trace[this.depth]);
    return z[1] > z[0] ? 1 : 0;
  }

  /** One SGD step on a single sample; returns the cross-entropy loss. */
  sgdStep(x: number[], label: number, lr: number): number {
    const trace = this.forwardTrace(x);
    const yN = trace[this.depth];
    const z = this.logits(yN);
    const zMax = Math.max(z[0], z[1]);
    const expz = z.map((v) => Math.exp(v - zMax));
    const sum = expz[0] + expz[1];
    const probs = expz.map((v) => v / sum);
    const loss = -Math.log(probs[label]);

    // readout gradients and the gradient flowing into the last features
    const dz = probs.slice();
    dz[label] -= 1;
    let dy = new Array<number>(this.width).fill(0);
    for (let c = 0; c < NUM_CLASSES; c++) {
      for (let j = 0; j < this.width; j++) {
        dy[j] += this.readout[c][j] * dz[c];
        this.readout[c][j] -= lr * dz[c] * yN[j];
      }
      this.biases[c] -= lr * dz[c];
    }

    // back through the residual blocks
    for (let k = this.depth - 1; k >= 0; k--) {
      const theta = this.thetas[k];
      const y = trace[k];
      const da = new Array<number>(this.width);
      for (let i = 0; i < this.width; i++) {
        let a = 0;
        for (let j = 0; j < this.width; j++) a += theta[i][j] * y[j];
        const t = Math.tanh(a);
        da[i] = (1 - t * t) * dy[i];
      }
      const dyPrev = dy.slice(); // identity skip passes the gradient through
      for (let i = 0; i < this.width; i++) {
        for (let j = 0; j < this.width; j++) {
          dyPrev[j] += theta[i][j] * da[i];
          theta[i][j] -= lr * da[i] * y[j];
        }
      }
      dy = dyPrev;
    }
    return loss;
  }

  accuracy(data: Dataset): number {
    let hits = 0;
    for (let i = 0; i < data.inputs.length; i++) {
      if (this.predict(data.inputs[i]) === data.labels[i]) hits++;
    }
    return hits / data.inputs.length;
  }
}
