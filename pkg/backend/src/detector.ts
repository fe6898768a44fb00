// Detection around a fully-convolutional tfjs model.
//
// The model maps a [1, H, W, 1] grayscale image to a [1, gh, gw, 1] grid of
// nonnegative activation energy (stride = H / gh). Decoding turns the grid
// into boxes: cells whose score = 1 - exp(-gain * energy) clears min_score
// are grouped into 4-connected components, one box per component, labelled
// with the model's class-0 label and scored by the component's best cell.

import * as tf from '@tensorflow/tfjs';
import { Box } from './protocol.js';
import { GrayImage, readGrayPng } from './png.js';
import { loadModel } from './modelio.js';

const SCORE_GAIN = 8.0;

export class Detector {
  private constructor(
    readonly model: tf.LayersModel,
    readonly labels: string[],
    readonly minScore: number,
  ) {}

  static async open(modelPath: string, minScore: number): Promise<Detector> {
    const { model, labels } = await loadModel(modelPath);
    return new Detector(model, labels, minScore);
  }

  get name(): string {
    return this.model.name;
  }

  detectFile(path: string): Box[] {
    return this.detect(readGrayPng(path));
  }

  detect(image: GrayImage): Box[] {
    const grid = tf.tidy(() => {
      const input = tf
        .tensor(image.pixels, [1, image.height, image.width, 1]);
      const out = this.model.predict(input) as tf.Tensor4D;
      return { data: out.arraySync()[0], gh: out.shape[1], gw: out.shape[2] };
    });
    const strideY = image.height / grid.gh;
    const strideX = image.width / grid.gw;

    const scores: number[][] = [];
    for (let y = 0; y < grid.gh; y++) {
      scores.push([]);
      for (let x = 0; x < grid.gw; x++) {
        scores[y].push(1 - Math.exp(-SCORE_GAIN * grid.data[y][x][0]));
      }
    }
    return this.components(scores, strideX, strideY, image.width, image.height);
  }

  /** One box per 4-connected component of cells at or above minScore. */
  private components(
    scores: number[][],
    strideX: number,
    strideY: number,
    width: number,
    height: number,
  ): Box[] {
    const gh = scores.length;
    const gw = scores[0].length;
    const seen = scores.map((row) => row.map(() => false));
    const boxes: Box[] = [];
    for (let sy = 0; sy < gh; sy++) {
      for (let sx = 0; sx < gw; sx++) {
        if (seen[sy][sx] || scores[sy][sx] < this.minScore) continue;
        let minX = sx, maxX = sx, minY = sy, maxY = sy, best = 0;
        const stack = [[sy, sx]];
        seen[sy][sx] = true;
        while (stack.length) {
          const [y, x] = stack.pop()!;
          best = Math.max(best, scores[y][x]);
          minX = Math.min(minX, x); maxX = Math.max(maxX, x);
          minY = Math.min(minY, y); maxY = Math.max(maxY, y);
          for (const [dy, dx] of [[1, 0], [-1, 0], [0, 1], [0, -1]]) {
            const ny = y + dy, nx = x + dx;
            if (ny >= 0 && ny < gh && nx >= 0 && nx < gw &&
                !seen[ny][nx] && scores[ny][nx] >= this.minScore) {
              seen[ny][nx] = true;
              stack.push([ny, nx]);
            }
          }
        }
        const x0 = Math.max(0, Math.floor(minX * strideX));
        const y0 = Math.max(0, Math.floor(minY * strideY));
        const x1 = Math.min(width, Math.ceil((maxX + 1) * strideX));
        const y1 = Math.min(height, Math.ceil((maxY + 1) * strideY));
        boxes.push({
          x: x0,
          y: y0,
          w: x1 - x0,
          h: y1 - y0,
          label: this.labels[0] ?? 'person',
          score: Math.min(1, best),
        });
      }
    }
    return boxes;
  }
}
