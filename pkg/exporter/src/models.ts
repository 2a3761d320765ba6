/**
 * Embedding backends.
 *
 * `grid-mean-<g>` is a built-in deterministic extractor: it box-averages
 * each RGB channel over a g x g grid, producing a 3*g*g vector in [0, 1].
 * It needs no model weights and exists so exports (and the engine contract)
 * can be exercised without network access.
 *
 * `tfjs:<url-or-path>` loads a TensorFlow.js graph model and uses its
 * (pooled) output as the embedding.  The runtime and weights must be
 * available; if they are not, backend construction fails fatally.
 */

import type { DecodedImage } from "./images.js";

export interface EmbeddingBackend {
  readonly modelId: string;
  readonly dim: number;
  /** Recorded in the manifest; how spatial activations become one vector. */
  readonly pooling: string;
  readonly deterministic: boolean;
  embed(image: DecodedImage): Promise<Float32Array>;
}

export class GridMeanBackend implements EmbeddingBackend {
  readonly modelId: string;
  readonly dim: number;
  readonly pooling = "grid-box-mean";
  readonly deterministic = true;
  private readonly grid: number;

  constructor(grid: number) {
    if (!Number.isInteger(grid) || grid < 1 || grid > 64) {
      throw new Error(`grid size must be in [1, 64], got ${grid}`);
    }
    this.grid = grid;
    this.dim = 3 * grid * grid;
    this.modelId = `grid-mean-${grid}`;
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    const { width, height, pixels } = image;
    const g = this.grid;
    const out = new Float32Array(this.dim);
    for (let gy = 0; gy < g; gy++) {
      const y0 = Math.min(Math.floor((gy * height) / g), height - 1);
      const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * height) / g));
      for (let gx = 0; gx < g; gx++) {
        const x0 = Math.min(Math.floor((gx * width) / g), width - 1);
        const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * width) / g));
        let r = 0;
        let gch = 0;
        let b = 0;
        for (let y = y0; y < y1; y++) {
          for (let x = x0; x < x1; x++) {
            const at = 3 * (y * width + x);
            r += pixels[at];
            gch += pixels[at + 1];
            b += pixels[at + 2];
          }
        }
        const count = (y1 - y0) * (x1 - x0) * 255;
        const cell = 3 * (gy * g + gx);
        out[cell] = r / count;
        out[cell + 1] = gch / count;
        out[cell + 2] = b / count;
      }
    }
    return out;
  }
}

/** TensorFlow.js adapter; requires the runtime and reachable weights. */
class TfjsBackend implements EmbeddingBackend {
  readonly modelId: string;
  readonly pooling = "global-average-pool";
  readonly deterministic = false;
  dim = 0;
  // No local type dependency on tfjs: the runtime is optional.
  private tf: any;
  private model: any;
  private readonly url: string;

  constructor(url: string) {
    this.url = url;
    this.modelId = `tfjs:${url}`;
  }

  async load(): Promise<void> {
    try {
      this.tf = await import("@tensorflow/tfjs" as string);
    } catch (err) {
      throw new Error(
        `tfjs runtime unavailable: ${(err as Error).message}`,
      );
    }
    try {
      this.model = await this.tf.loadGraphModel(this.url);
    } catch (err) {
      throw new Error(
        `cannot load model weights from ${this.url}: ${(err as Error).message}`,
      );
    }
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    const tf = this.tf;
    const result = tf.tidy(() => {
      let t = tf
        .tensor3d(Array.from(image.pixels), [image.height, image.width, 3])
        .div(127.5)
        .sub(1.0);
      t = tf.image.resizeBilinear(t, [224, 224]).expandDims(0);
      let out = this.model.predict(t);
      if (Array.isArray(out)) out = out[0];
      if (out.rank === 4) out = out.mean([1, 2]);
      return out.squeeze();
    });
    const data = await result.data();
    result.dispose();
    this.dim = data.length;
    return Float32Array.from(data);
  }
}

export async function createBackend(modelId: string): Promise<EmbeddingBackend> {
  const gridMatch = /^grid-mean-(\d+)$/.exec(modelId);
  if (gridMatch) {
    return new GridMeanBackend(parseInt(gridMatch[1], 10));
  }
  if (modelId.startsWith("tfjs:")) {
    const backend = new TfjsBackend(modelId.slice("tfjs:".length));
    await backend.load();
    return backend;
  }
  throw new Error(
    `unknown model id ${modelId}; expected grid-mean-<g> or tfjs:<url>`,
  );
}
