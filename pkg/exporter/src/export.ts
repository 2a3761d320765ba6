/**
 * Export orchestration: walk a class-per-folder image tree, embed every
 * readable image, and emit one FSEL file, one LSEL file, and one JSON
 * manifest.  Inference is sequential and file writes are single-threaded;
 * an unreadable image is skipped with a warning and recorded in the
 * manifest, while an unavailable model runtime aborts the whole job.
 */

import { writeFileSync } from "node:fs";

import { writeFsel, writeLsel } from "./fsel.js";
import { decodeImage, listImages } from "./images.js";
import { createBackend } from "./models.js";

export interface ExportJob {
  imageRoot: string;
  modelId: string;
  featuresOut: string;
  labelsOut: string;
  manifestOut?: string;
  batchSize?: number;
}

export interface ExportSummary {
  rows: number;
  dim: number;
  classNames: string[];
  labels: number[];
  skipped: { path: string; reason: string }[];
}

export async function runExport(job: ExportJob): Promise<ExportSummary> {
  const startedAt = Date.now();
  const backend = await createBackend(job.modelId);
  const { classNames, entries } = listImages(job.imageRoot);

  const vectors: Float32Array[] = [];
  const labels: number[] = [];
  const rowPaths: string[] = [];
  const skipped: { path: string; reason: string }[] = [];
  for (const entry of entries) {
    let embedding: Float32Array;
    try {
      embedding = await backend.embed(decodeImage(entry.absPath));
    } catch (err) {
      const reason = (err as Error).message;
      console.warn(`skipping ${entry.relPath}: ${reason}`);
      skipped.push({ path: entry.relPath, reason });
      continue;
    }
    vectors.push(embedding);
    labels.push(entry.classIndex);
    rowPaths.push(entry.relPath);
  }
  if (vectors.length === 0) {
    throw new Error(`${job.imageRoot}: no image could be embedded`);
  }
  const dim = vectors[0].length;
  const flat = new Float32Array(vectors.length * dim);
  vectors.forEach((v, row) => {
    if (v.length !== dim) {
      throw new Error(
        `inconsistent embedding width: row ${row} has ${v.length}, expected ${dim}`,
      );
    }
    flat.set(v, row * dim);
  });

  writeFsel(job.featuresOut, job.modelId, vectors.length, dim, flat);
  writeLsel(job.labelsOut, labels, classNames.length);

  const manifest = {
    model_id: job.modelId,
    pooling: backend.pooling,
    deterministic: backend.deterministic,
    image_root: job.imageRoot,
    class_names: classNames,
    rows: vectors.length,
    dim,
    row_paths: rowPaths,
    skipped,
    features_out: job.featuresOut,
    labels_out: job.labelsOut,
    duration_ms: Date.now() - startedAt,
  };
  if (job.manifestOut) {
    writeFileSync(job.manifestOut, JSON.stringify(manifest, null, 2) + "\n");
  }
  return { rows: vectors.length, dim, classNames, labels, skipped };
}
