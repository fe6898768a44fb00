import { readFileSync } from 'node:fs';
import { PNG } from 'pngjs';

export interface GrayImage {
  width: number;
  height: number;
  /** row-major grayscale, 0..1 */
  pixels: Float32Array;
}

/** Decode a PNG file to grayscale (mean of R, G, B; alpha ignored). */
export function readGrayPng(path: string): GrayImage {
  const png = PNG.sync.read(readFileSync(path));
  const pixels = new Float32Array(png.width * png.height);
  for (let i = 0; i < pixels.length; i++) {
    const o = i * 4;
    pixels[i] = (png.data[o] + png.data[o + 1] + png.data[o + 2]) / (3 * 255);
  }
  return { width: png.width, height: png.height, pixels };
}
