/** PNG/JPEG decoding into float RGB planes in [0, 1]. */
import * as fs from 'fs'
import * as path from 'path'
import jpeg from 'jpeg-js'
import { PNG } from 'pngjs'

export interface DecodedImage {
  /** interleaved RGB, length width * height * 3 */
  data: Float32Array
  width: number
  height: number
}

export const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg'])

export function decodeImage(filePath: string): DecodedImage {
  const ext = path.extname(filePath).toLowerCase()
  const blob = fs.readFileSync(filePath)
  let rgba: Uint8Array
  let width: number
  let height: number
  if (ext === '.png') {
    const png = PNG.sync.read(blob)
    rgba = png.data
    width = png.width
    height = png.height
  } else if (ext === '.jpg' || ext === '.jpeg') {
    const decoded = jpeg.decode(blob, { useTArray: true })
    rgba = decoded.data
    width = decoded.width
    height = decoded.height
  } else {
    throw new Error(`${filePath}: unsupported image extension ${ext}`)
  }
  const data = new Float32Array(width * height * 3)
  for (let i = 0; i < width * height; i++) {
    data[3 * i] = rgba[4 * i] / 255
    data[3 * i + 1] = rgba[4 * i + 1] / 255
    data[3 * i + 2] = rgba[4 * i + 2] / 255
  }
  return { data, width, height }
}
