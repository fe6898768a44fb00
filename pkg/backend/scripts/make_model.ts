// Builds the committed test model and image fixtures.
//
// The model is a real (if tiny) fully-convolutional net: Laplacian edge
// filters (+/- pair through relu, summed by a 1x1 conv) followed by 8x8
// average pooling, i.e. a grid of local contrast energy. Uniform images
// produce zero energy everywhere; a figure against a plain background
// lights up the cells along its outline. Class 0 is "person".

import { mkdirSync, writeFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';
import { saveModel } from '../src/modelio.js';
import { Detector } from '../src/detector.js';

const HERE = dirname(fileURLToPath(import.meta.url));
const FIXTURES = join(HERE, '..', '..', 'fixtures');

function buildModel(): tf.LayersModel {
  const model = tf.sequential({ name: 'edge-energy-tiny' });
  model.add(tf.layers.conv2d({
    inputShape: [null, null, 1] as unknown as number[],
    filters: 2,
    kernelSize: 3,
    padding: 'valid',  // zero padding would fake edges along the image border
    activation: 'relu',
    useBias: false,
  }));
  model.add(tf.layers.conv2d({
    filters: 1,
    kernelSize: 1,
    padding: 'same',
    useBias: false,
  }));
  model.add(tf.layers.averagePooling2d({ poolSize: 8, strides: 8, padding: 'valid' }));

  const lap = [
    [0, 1, 0],
    [1, -4, 1],
    [0, 1, 0],
  ];
  // kernel layout [kh, kw, inCh, outCh]: channel 0 is +Laplacian, 1 is -Laplacian
  const k1 = tf.tensor4d(lap.flat().flatMap((v) => [v, -v]), [3, 3, 1, 2]);
  model.layers[0].setWeights([k1]);
  model.layers[1].setWeights([tf.tensor4d([1, 1], [1, 1, 2, 1])]);
  return model;
}

function writePng(path: string, width: number, height: number,
                  shade: (x: number, y: number) => number): void {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const v = shade(x, y);
      const o = (y * width + x) * 4;
      png.data[o] = v;
      png.data[o + 1] = v;
      png.data[o + 2] = v;
      png.data[o + 3] = 255;
    }
  }
  writeFileSync(path, PNG.sync.write(png));
}

function personShade(x: number, y: number): number {
  // head: circle at (32, 18) r=7; body: rectangle x 24..40, y 26..54
  const inHead = (x - 32) ** 2 + (y - 18) ** 2 <= 49;
  const inBody = x >= 24 && x <= 40 && y >= 26 && y <= 54;
  return inHead || inBody ? 25 : 245;
}

async function main() {
  mkdirSync(FIXTURES, { recursive: true });
  const model = buildModel();
  const modelDir = join(FIXTURES, 'model');
  await saveModel(model, modelDir, ['person']);

  writePng(join(FIXTURES, 'blank.png'), 64, 64, () => 245);
  writePng(join(FIXTURES, 'person.png'), 64, 64, personShade);

  // sanity-check the committed artifacts behave as the tests expect
  const detector = await Detector.open(modelDir, 0.25);
  const blank = detector.detectFile(join(FIXTURES, 'blank.png'));
  const person = detector.detectFile(join(FIXTURES, 'person.png'));
  console.log('blank boxes:', blank.length);
  console.log('person boxes:', person.map((b) => `${b.label}@${b.score.toFixed(3)}`).join(' '));
  if (blank.length !== 0) throw new Error('blank fixture must yield zero boxes');
  if (!person.some((b) => b.label === 'person' && b.score >= 0.5)) {
    throw new Error('person fixture must yield a confident person box');
  }
  console.log('model + fixtures written to', FIXTURES);
}

main();
