/**
 * Writers and readers for the engine's binary interchange formats.
 *
 * FSEL (features): magic "FSEL", u32 LE version (=1), u64 LE sample count,
 * u64 LE feature dimension, u32 LE extractor-id byte length, the id as
 * UTF-8, then n*k float32 LE values in row-major order.
 *
 * LSEL (labels): magic "LSEL", u32 LE version (=1), u64 LE sample count,
 * u64 LE class count, then n u32 LE labels.
 *
 * Readers exist so tests can validate emitted files without the engine.
 */

import { writeFileSync, readFileSync } from "node:fs";

export const FORMAT_VERSION = 1;

export interface FeatureFile {
  extractorId: string;
  rows: number;
  dim: number;
  /** Row-major values, length rows * dim. */
  values: Float32Array;
}

export interface LabelFile {
  labels: number[];
  classCount: number;
}

export function encodeFsel(
  extractorId: string,
  rows: number,
  dim: number,
  values: Float32Array,
): Buffer {
  if (values.length !== rows * dim) {
    throw new Error(
      `feature payload length ${values.length} != rows*dim ${rows * dim}`,
    );
  }
  const idBytes = Buffer.from(extractorId, "utf-8");
  const header = Buffer.alloc(28 + idBytes.length);
  header.write("FSEL", 0, "ascii");
  header.writeUInt32LE(FORMAT_VERSION, 4);
  header.writeBigUInt64LE(BigInt(rows), 8);
  header.writeBigUInt64LE(BigInt(dim), 16);
  header.writeUInt32LE(idBytes.length, 24);
  idBytes.copy(header, 28);
  const payload = Buffer.alloc(4 * values.length);
  for (let i = 0; i < values.length; i++) {
    payload.writeFloatLE(values[i], 4 * i);
  }
  return Buffer.concat([header, payload]);
}

export function writeFsel(
  path: string,
  extractorId: string,
  rows: number,
  dim: number,
  values: Float32Array,
): void {
  writeFileSync(path, encodeFsel(extractorId, rows, dim, values));
}

export function readFsel(path: string): FeatureFile {
  const buf = readFileSync(path);
  if (buf.length < 28 || buf.toString("ascii", 0, 4) !== "FSEL") {
    throw new Error(`${path}: not an FSEL file`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: unsupported version ${version}`);
  }
  const rows = Number(buf.readBigUInt64LE(8));
  const dim = Number(buf.readBigUInt64LE(16));
  const idLen = buf.readUInt32LE(24);
  const extractorId = buf.toString("utf-8", 28, 28 + idLen);
  const start = 28 + idLen;
  const expected = start + 4 * rows * dim;
  if (buf.length !== expected) {
    throw new Error(`${path}: size ${buf.length}, expected ${expected}`);
  }
  const values = new Float32Array(rows * dim);
  for (let i = 0; i < values.length; i++) {
    values[i] = buf.readFloatLE(start + 4 * i);
  }
  return { extractorId, rows, dim, values };
}

export function encodeLsel(labels: number[], classCount: number): Buffer {
  const buf = Buffer.alloc(24 + 4 * labels.length);
  buf.write("LSEL", 0, "ascii");
  buf.writeUInt32LE(FORMAT_VERSION, 4);
  buf.writeBigUInt64LE(BigInt(labels.length), 8);
  buf.writeBigUInt64LE(BigInt(classCount), 16);
  labels.forEach((label, i) => {
    if (!Number.isInteger(label) || label < 0 || label >= classCount) {
      throw new Error(`label ${label} outside [0, ${classCount})`);
    }
    buf.writeUInt32LE(label, 24 + 4 * i);
  });
  return buf;
}

export function writeLsel(
  path: string,
  labels: number[],
  classCount: number,
): void {
  writeFileSync(path, encodeLsel(labels, classCount));
}

export function readLsel(path: string): LabelFile {
  const buf = readFileSync(path);
  if (buf.length < 24 || buf.toString("ascii", 0, 4) !== "LSEL") {
    throw new Error(`${path}: not an LSEL file`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: unsupported version ${version}`);
  }
  const rows = Number(buf.readBigUInt64LE(8));
  const classCount = Number(buf.readBigUInt64LE(16));
  if (buf.length !== 24 + 4 * rows) {
    throw new Error(`${path}: truncated label payload`);
  }
  const labels: number[] = [];
  for (let i = 0; i < rows; i++) {
    labels.push(buf.readUInt32LE(24 + 4 * i));
  }
  return { labels, classCount };
}
