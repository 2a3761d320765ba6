/**
 * Image-directory walking and decoding.
 *
 * The input layout is one subdirectory per class; class ids are assigned
 * by sorted class-name order and rows follow lexicographic relative-path
 * order, so exports are reproducible across platforms and runs.
 *
 * Decoders: PNG (pngjs), JPEG (jpeg-js), and binary PPM/PGM built in.
 */

import { readdirSync, readFileSync, statSync } from "node:fs";
import { join } from "node:path";

import jpeg from "jpeg-js";
import { PNG } from "pngjs";

/** 8-bit RGB pixels, row-major, no alpha. */
export interface DecodedImage {
  width: number;
  height: number;
  pixels: Uint8Array;
}

export interface ImageEntry {
  /** Relative path (class dir + file name), the row sort key. */
  relPath: string;
  absPath: string;
  className: string;
  classIndex: number;
}

const IMAGE_EXTENSIONS = new Set([".png", ".jpg", ".jpeg", ".ppm", ".pgm"]);

function extensionOf(name: string): string {
  const dot = name.lastIndexOf(".");
  return dot < 0 ? "" : name.slice(dot).toLowerCase();
}

/**
 * Enumerate class subdirectories and their image files.
 *
 * Throws when the root has no class subdirectories or when a class
 * subdirectory contains no image files.
 */
export function listImages(imageRoot: string): {
  classNames: string[];
  entries: ImageEntry[];
} {
  const classNames = readdirSync(imageRoot)
    .filter((name) => statSync(join(imageRoot, name)).isDirectory())
    .sort();
  if (classNames.length === 0) {
    throw new Error(`${imageRoot}: no class subdirectories`);
  }
  const entries: ImageEntry[] = [];
  classNames.forEach((className, classIndex) => {
    const dir = join(imageRoot, className);
    const files = readdirSync(dir).filter((f) =>
      IMAGE_EXTENSIONS.has(extensionOf(f)),
    );
    if (files.length === 0) {
      throw new Error(`${dir}: class subdirectory has no images`);
    }
    for (const file of files) {
      entries.push({
        relPath: `${className}/${file}`,
        absPath: join(dir, file),
        className,
        classIndex,
      });
    }
  });
  entries.sort((a, b) => (a.relPath < b.relPath ? -1 : a.relPath > b.relPath ? 1 : 0));
  return { classNames, entries };
}

function decodePng(buf: Buffer): DecodedImage {
  const png = PNG.sync.read(buf);
  const pixels = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    pixels[3 * i] = png.data[4 * i];
    pixels[3 * i + 1] = png.data[4 * i + 1];
    pixels[3 * i + 2] = png.data[4 * i + 2];
  }
  return { width: png.width, height: png.height, pixels };
}

function decodeJpeg(buf: Buffer): DecodedImage {
  const img = jpeg.decode(buf, { useTArray: true, formatAsRGBA: true });
  const pixels = new Uint8Array(img.width * img.height * 3);
  for (let i = 0; i < img.width * img.height; i++) {
    pixels[3 * i] = img.data[4 * i];
    pixels[3 * i + 1] = img.data[4 * i + 1];
    pixels[3 * i + 2] = img.data[4 * i + 2];
  }
  return { width: img.width, height: img.height, pixels };
}

/** Binary PPM (P6, RGB) and PGM (P5, grayscale) with 8-bit samples. */
function decodePnm(buf: Buffer): DecodedImage {
  const header: string[] = [];
  let offset = 0;
  while (header.length < 4) {
    if (offset >= buf.length) {
      throw new Error("truncated PNM header");
    }
    const ch = String.fromCharCode(buf[offset]);
    if (ch === "#") {
      while (offset < buf.length && buf[offset] !== 0x0a) offset++;
      offset++;
      continue;
    }
    if (/\s/.test(ch)) {
      offset++;
      continue;
    }
    let token = "";
    while (offset < buf.length && !/\s/.test(String.fromCharCode(buf[offset]))) {
      token += String.fromCharCode(buf[offset]);
      offset++;
    }
    header.push(token);
  }
  offset++; // single whitespace after maxval
  const [magic, w, h, maxval] = header;
  const width = parseInt(w, 10);
  const height = parseInt(h, 10);
  if (parseInt(maxval, 10) !== 255) {
    throw new Error(`unsupported PNM maxval ${maxval}`);
  }
  const pixels = new Uint8Array(width * height * 3);
  if (magic === "P6") {
    if (buf.length < offset + width * height * 3) {
      throw new Error("truncated P6 payload");
    }
    pixels.set(buf.subarray(offset, offset + width * height * 3));
  } else if (magic === "P5") {
    if (buf.length < offset + width * height) {
      throw new Error("truncated P5 payload");
    }
    for (let i = 0; i < width * height; i++) {
      const g = buf[offset + i];
      pixels[3 * i] = g;
      pixels[3 * i + 1] = g;
      pixels[3 * i + 2] = g;
    }
  } else {
    throw new Error(`unsupported PNM magic ${magic}`);
  }
  return { width, height, pixels };
}

export function decodeImage(path: string): DecodedImage {
  const buf = readFileSync(path);
  const ext = extensionOf(path);
  try {
    if (ext === ".png") return decodePng(buf);
    if (ext === ".jpg" || ext === ".jpeg") return decodeJpeg(buf);
    if (ext === ".ppm" || ext === ".pgm") return decodePnm(buf);
  } catch (err) {
    throw new Error(`${path}: ${(err as Error).message}`);
  }
  throw new Error(`${path}: unsupported image extension ${ext}`);
}
