/**
 * Command-line front end. Flags mirror TrainConfig; the output is a weight
 * file consumable by the `roughnet` CLI.
 *
 *   npm run train -- --output weights.json [--depth 128] [--width 8]
 *       [--epochs 2] [--learning-rate 0.05] [--seed 1] [--samples 100]
 */
import { writeFileSync } from 'node:fs';
import { DEFAULT_CONFIG, TrainConfig } from './model.js';
import { serializeWeightFile } from './export.js';
import { trainAndExport } from './train.js';

function parseArgs(argv: string[]): { config: TrainConfig; output: string } {
  const config: TrainConfig = { ...DEFAULT_CONFIG };
  let output = '';
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    switch (flag) {
      case '--depth': config.depth = Number(value); break;
      case '--width': config.width = Number(value); break;
      case '--activation':
        config.activation = value as TrainConfig['activation'];
        break;
      case '--epochs': config.epochs = Number(value); break;
      case '--learning-rate': config.learningRate = Number(value); break;
      case '--seed': config.seed = Number(value); break;
      case '--samples': config.samplesPerClass = Number(value); break;
      case '--output': output = value; break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!output) throw new Error('--output is required');
  return { config, output };
}

function main(): number {
  let parsed;
  try {
    parsed = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const { weightFile, metrics } = trainAndExport(parsed.config);
    writeFileSync(parsed.output, serializeWeightFile(weightFile));
    console.error(
      `wrote ${parsed.output}: depth ${weightFile.N}, width ${weightFile.m}, ` +
      `train accuracy ${metrics.finalTrainAccuracy.toFixed(3)}`,
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main());
