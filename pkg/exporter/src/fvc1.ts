/**
 * FVC1 bulk vector container, byte-compatible with the morphofv reader:
 * magic "FVC1", LE u32 row count, LE u32 dimension, row-major float32 data,
 * trailing LE u64 checksum = sum of the data bytes mod 2^64.
 */
import * as fs from 'fs'

const MAGIC = Buffer.from('FVC1', 'ascii')

function byteSum(data: Buffer): bigint {
  let sum = 0n
  for (const b of data) {
    sum += BigInt(b)
  }
  return sum & 0xffffffffffffffffn
}

export function writeFvc1(path: string, rows: Float32Array[], dim: number): void {
  for (const row of rows) {
    if (row.length !== dim) {
      throw new Error(`row has ${row.length} values, expected ${dim}`)
    }
  }
  const header = Buffer.alloc(12)
  MAGIC.copy(header, 0)
  header.writeUInt32LE(rows.length, 4)
  header.writeUInt32LE(dim, 8)

  const payload = Buffer.alloc(4 * rows.length * dim)
  rows.forEach((row, r) => {
    for (let i = 0; i < dim; i++) {
      payload.writeFloatLE(row[i], 4 * (r * dim + i))
    }
  })
  const checksum = Buffer.alloc(8)
  checksum.writeBigUInt64LE(byteSum(payload))
  fs.writeFileSync(path, Buffer.concat([header, payload, checksum]))
}

export function readFvc1(path: string): { rows: Float32Array[]; dim: number } {
  const blob = fs.readFileSync(path)
  if (blob.length < 20 || !blob.subarray(0, 4).equals(MAGIC)) {
    throw new Error(`${path}: not an FVC1 file`)
  }
  const nRows = blob.readUInt32LE(4)
  const dim = blob.readUInt32LE(8)
  const expected = 12 + 4 * nRows * dim + 8
  if (blob.length !== expected) {
    throw new Error(`${path}: expected ${expected} bytes, found ${blob.length}`)
  }
  const payload = blob.subarray(12, 12 + 4 * nRows * dim)
  const stored = blob.readBigUInt64LE(blob.length - 8)
  if (stored !== byteSum(payload)) {
    throw new Error(`${path}: checksum mismatch`)
  }
  const rows: Float32Array[] = []
  for (let r = 0; r < nRows; r++) {
    const row = new Float32Array(dim)
    for (let i = 0; i < dim; i++) {
      row[i] = payload.readFloatLE(4 * (r * dim + i))
    }
    rows.push(row)
  }
  return { rows, dim }
}
