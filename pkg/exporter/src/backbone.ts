/**
 * Visual feature backbones.
 *
 * The default "tiny-cnn-v1" is a three-block CNN whose weights come from a
 * fixed-seed PRNG, so exports are reproducible anywhere without downloading
 * pretrained checkpoints. A tfjs LayersModel directory can be supplied
 * instead when a real pretrained backbone is available locally.
 */
import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'
import { DecodedImage } from './images.js'

export interface Features {
  pooled: Float32Array
  mapCHW: Float32Array
  /** channels, height, width of mapCHW */
  mapShape: [number, number, number]
}

export interface Backbone {
  name: string
  apply(image: DecodedImage): Features
  dispose(): void
}

/** Deterministic 32-bit PRNG (mulberry32); identical on every platform. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) | 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function glorotFill(rand: () => number, shape: number[], fanIn: number, fanOut: number) {
  const a = Math.sqrt(6 / (fanIn + fanOut))
  const size = shape.reduce((x, y) => x * y, 1)
  const values = new Float32Array(size)
  for (let i = 0; i < size; i++) {
    values[i] = (2 * rand() - 1) * a
  }
  return tf.tensor4d(values, shape as [number, number, number, number])
}

const INPUT_SIZE = 32
const CHANNELS = [3, 16, 32, 64]

export function createTinyCnn(seed: number): Backbone {
  const rand = mulberry32(seed)
  const kernels: tf.Tensor4D[] = []
  for (let i = 0; i + 1 < CHANNELS.length; i++) {
    const [cin, cout] = [CHANNELS[i], CHANNELS[i + 1]]
    kernels.push(glorotFill(rand, [3, 3, cin, cout], 9 * cin, cout) as tf.Tensor4D)
  }
  return {
    name: `tiny-cnn-v1(seed=${seed})`,
    apply(image: DecodedImage): Features {
      let features: Features | undefined
      tf.tidy(() => {
        const input = tf.tensor3d(image.data, [image.height, image.width, 3])
        let x = tf.image.resizeBilinear(input, [INPUT_SIZE, INPUT_SIZE]).expandDims(0)
        for (const kernel of kernels) {
          x = tf.relu(tf.conv2d(x as tf.Tensor4D, kernel, 2, 'same'))
        }
        features = toFeatures(x as tf.Tensor4D)
      })
      return features!
    },
    dispose() {
      kernels.forEach((k) => k.dispose())
    },
  }
}

/** NHWC activation tensor (batch of one) to pooled + channels-first map. */
function toFeatures(x: tf.Tensor4D): Features {
  const [, h, w, c] = x.shape
  const mapCHW = x.squeeze([0]).transpose([2, 0, 1])
  const pooled = tf.mean(x, [1, 2]).squeeze([0])
  return {
    pooled: pooled.dataSync() as Float32Array,
    mapCHW: mapCHW.dataSync() as Float32Array,
    mapShape: [c, h, w] as [number, number, number],
  }
}

/** Load a tfjs LayersModel saved to disk (model.json + weight shards). */
export async function loadDiskBackbone(modelDir: string): Promise<Backbone> {
  const modelJson = JSON.parse(fs.readFileSync(path.join(modelDir, 'model.json'), 'utf8'))
  const manifest = modelJson.weightsManifest as Array<{
    paths: string[]
    weights: tf.io.WeightsManifestEntry[]
  }>
  const buffers: Buffer[] = []
  const weightSpecs: tf.io.WeightsManifestEntry[] = []
  for (const group of manifest) {
    weightSpecs.push(...group.weights)
    for (const rel of group.paths) {
      buffers.push(fs.readFileSync(path.join(modelDir, rel)))
    }
  }
  const weightData = new Uint8Array(Buffer.concat(buffers)).buffer
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: modelJson.modelTopology,
      weightSpecs,
      weightData,
    }),
  )
  const inputShape = model.inputs[0].shape
  const size = inputShape && inputShape[1] ? (inputShape[1] as number) : INPUT_SIZE
  return {
    name: `layers-model(${modelDir})`,
    apply(image: DecodedImage): Features {
      let features: Features | undefined
      tf.tidy(() => {
        const input = tf.tensor3d(image.data, [image.height, image.width, 3])
        const resized = tf.image.resizeBilinear(input, [size, size]).expandDims(0)
        const out = model.predict(resized) as tf.Tensor
        if (out.rank === 4) {
          features = toFeatures(out as tf.Tensor4D)
        } else {
          const pooled = out.squeeze().dataSync() as Float32Array
          features = { pooled, mapCHW: pooled, mapShape: [pooled.length, 1, 1] }
        }
      })
      return features!
    },
    dispose() {
      model.dispose()
    },
  }
}

export async function createBackbone(identifier: string, seed: number): Promise<Backbone> {
  if (identifier === 'tiny-cnn-v1') {
    return createTinyCnn(seed)
  }
  if (fs.existsSync(path.join(identifier, 'model.json'))) {
    return loadDiskBackbone(identifier)
  }
  throw new Error(`unknown backbone ${identifier} (not 'tiny-cnn-v1' nor a model directory)`)
}
