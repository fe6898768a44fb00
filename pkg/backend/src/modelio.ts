// Filesystem load/save for tfjs layers models without the tfjs-node binding:
// a model directory holds model.json (topology + weight specs), weights.bin,
// and labels.json (class index -> label name).

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { join, dirname } from 'node:path';
import * as tf from '@tensorflow/tfjs';

export interface LoadedModel {
  model: tf.LayersModel;
  labels: string[];
}

function modelDir(modelPath: string): string {
  return modelPath.endsWith('.json') ? dirname(modelPath) : modelPath;
}

export async function loadModel(modelPath: string): Promise<LoadedModel> {
  const dir = modelDir(modelPath);
  const manifest = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf-8'));
  const weightData = readFileSync(join(dir, 'weights.bin'));
  const model = await tf.loadLayersModel({
    load: async () => ({
      modelTopology: manifest.modelTopology,
      weightSpecs: manifest.weightsManifest[0].weights,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength,
      ),
    }),
  });
  const labels = JSON.parse(readFileSync(join(dir, 'labels.json'), 'utf-8'));
  return { model, labels };
}

export async function saveModel(model: tf.LayersModel, dir: string, labels: string[]): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const manifest = {
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      };
      writeFileSync(join(dir, 'model.json'), JSON.stringify(manifest));
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(artifacts.weightData as ArrayBuffer));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    }),
  );
  writeFileSync(join(dir, 'labels.json'), JSON.stringify(labels));
}
