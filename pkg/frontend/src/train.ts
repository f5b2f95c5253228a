/**
 * Training entry point: build the dataset, train the residual net, and
 * package the per-layer weight sequence as a weight file plus a metrics
 * report. epochs = 0 exports the (seeded) initialization untouched.
 */
import { Rng } from './rng.js';
import { gaussianBlobs } from './data.js';
import { ResidualNet, TrainConfig, validateConfig } from './model.js';
import { buildWeightFile, MetricsReport, WeightFile } from './export.js';

export interface TrainResult {
  weightFile: WeightFile;
  metrics: MetricsReport;
}

export function trainAndExport(config: TrainConfig): TrainResult {
  validateConfig(config);
  const rng = new Rng(config.seed);
  const net = new ResidualNet(config.depth, config.width, rng);
  const data = gaussianBlobs(config.width, config.samplesPerClass, rng);

  let meanLoss: number | null = null;
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    let total = 0;
    for (let i = 0; i < data.inputs.length; i++) {
      total += net.sgdStep(data.inputs[i], data.labels[i], config.learningRate);
    }
    meanLoss = total / data.inputs.length;
  }

  const metrics: MetricsReport = {
    finalTrainAccuracy: net.accuracy(data),
    meanLoss,
    entry00Increments: net.thetas.map((theta) => theta[0][0]),
  };
  return { weightFile: buildWeightFile(net.thetas, config, metrics), metrics };
}
