/**
 * Training data. The default (and offline-safe) dataset is a deterministic
 * synthetic two-class problem: Gaussian blobs centred at +-mu in R^dim.
 * Real image data can be substituted by anything that produces the same
 * Dataset shape; nothing downstream cares where the samples came from.
 */
import { Rng } from './rng.js';

export interface Dataset {
  /** inputs[i] has length dim */
  inputs: number[][];
  /** labels[i] is 0 or 1 */
  labels: number[];
  dim: number;
}

export function gaussianBlobs(
  dim: number,
  samplesPerClass: number,
  rng: Rng,
  separation = 1.5,
  noise = 0.6,
): Dataset {
  const inputs: number[][] = [];
  const labels: number[] = [];
  // fixed interleaved order keeps SGD deterministic without a shuffle pass
  for (let i = 0; i < samplesPerClass; i++) {
    for (const label of [0, 1]) {
      const sign = label === 0 ? -1 : 1;
      const x = new Array<number>(dim);
      for (let j = 0; j < dim; j++) {
        const centre = j === 0 ? sign * separation : 0;
        x[j] = centre + noise * rng.normal();
      }
      inputs.push(x);
      labels.push(label);
    }
  }
  return { inputs, labels, dim };
}
