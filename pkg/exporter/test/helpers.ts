/** Shared test utilities: tiny synthetic image trees. */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { PNG } from "pngjs";

export type PixelFn = (x: number, y: number) => [number, number, number];

export function writePng(
  path: string,
  width: number,
  height: number,
  pixel: PixelFn,
): void {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = pixel(x, y);
      const at = 4 * (y * width + x);
      png.data[at] = r;
      png.data[at + 1] = g;
      png.data[at + 2] = b;
      png.data[at + 3] = 255;
    }
  }
  writeFileSync(path, PNG.sync.write(png));
}

export function writePpm(
  path: string,
  width: number,
  height: number,
  pixel: PixelFn,
): void {
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  const payload = Buffer.alloc(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = pixel(x, y);
      const at = 3 * (y * width + x);
      payload[at] = r;
      payload[at + 1] = g;
      payload[at + 2] = b;
    }
  }
  writeFileSync(path, Buffer.concat([header, payload]));
}

/**
 * 4 images over 2 classes: reddish gradients under cat/, bluish under dog/.
 * One cat image is a PPM so both decoders get exercised.
 */
export function makeToyTree(root: string): void {
  mkdirSync(join(root, "cat"), { recursive: true });
  mkdirSync(join(root, "dog"), { recursive: true });
  writePng(join(root, "cat", "a.png"), 16, 16, (x, y) => [
    200 + ((x + y) % 40),
    30,
    20,
  ]);
  writePpm(join(root, "cat", "b.ppm"), 12, 16, (x) => [180 + (x % 50), 60, 10]);
  writePng(join(root, "dog", "a.png"), 16, 12, (x, y) => [
    10,
    40,
    190 + ((x * y) % 50),
  ]);
  writePng(join(root, "dog", "b.png"), 16, 16, (_, y) => [
    25,
    80,
    160 + (y % 60),
  ]);
}
