import { spawnSync } from 'child_process'
import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'
import { PNG } from 'pngjs'
import { beforeAll, describe, expect, it } from 'vitest'
import { exportDataset } from '../src/export.js'
import { readFvc1 } from '../src/fvc1.js'

let root: string

function writePng(filePath: string, width: number, height: number, pixel: (x: number, y: number) => [number, number, number]) {
  const png = new PNG({ width, height })
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = 4 * (y * width + x)
      const [r, g, b] = pixel(x, y)
      png.data[i] = r
      png.data[i + 1] = g
      png.data[i + 2] = b
      png.data[i + 3] = 255
    }
  }
  fs.writeFileSync(filePath, PNG.sync.write(png))
}

function makeToyFolder(dir: string) {
  const images = path.join(dir, 'images')
  fs.mkdirSync(images, { recursive: true })
  // solid color, checkerboard, gradient: three visually distinct images
  writePng(path.join(images, 'cafe-001.png'), 48, 48, () => [120, 60, 30])
  writePng(path.join(images, 'cafe-002.png'), 48, 48, (x, y) =>
    (x >> 2) % 2 === (y >> 2) % 2 ? [255, 255, 255] : [0, 0, 0],
  )
  writePng(path.join(images, 'tavern-001.png'), 64, 40, (x, y) => [
    Math.round((255 * x) / 63),
    Math.round((255 * y) / 39),
    128,
  ])
  fs.writeFileSync(
    path.join(dir, 'labels.csv'),
    'id,label,split\ncafe-001,cafe,train\ncafe-002,cafe,test\ntavern-001,tavern,train\n',
  )
  fs.writeFileSync(
    path.join(dir, 'proposals.csv'),
    'id,text,confidence\ncafe-001,espresso,0.92\ncafe-001,coffee,0.81\ntavern-001,lager,0.77\n',
  )
  return images
}

function runExport(dir: string, out: string, variant: 'pooled' | 'map' = 'pooled') {
  return exportDataset({
    imagesDir: path.join(dir, 'images'),
    labelsFile: path.join(dir, 'labels.csv'),
    proposalsFile: path.join(dir, 'proposals.csv'),
    outDir: out,
    variant,
    backbone: 'tiny-cnn-v1',
    seed: 0,
  })
}

beforeAll(() => {
  root = fs.mkdtempSync(path.join(os.tmpdir(), 'morphofv-export-'))
  makeToyFolder(root)
})

describe('exportDataset', () => {
  it('writes one feature row and one manifest record per image', async () => {
    const result = await runExport(root, path.join(root, 'out1'))
    expect(result.exported).toBe(3)
    expect(result.skipped).toEqual([])

    const manifest = JSON.parse(fs.readFileSync(result.manifestPath, 'utf8'))
    expect(manifest.format).toBe('morphofv-manifest')
    expect(manifest.classes).toEqual(['cafe', 'tavern'])
    expect(manifest.samples.map((s: { id: string }) => s.id)).toEqual([
      'cafe-001',
      'cafe-002',
      'tavern-001',
    ])
    expect(manifest.samples[0].proposals).toHaveLength(2)
    expect(manifest.samples[1].proposals).toHaveLength(0)

    const { rows, dim } = readFvc1(result.featuresPath)
    expect(rows).toHaveLength(3)
    expect(dim).toBe(manifest.visual.dim)
  })

  it('produces different features for different images', async () => {
    const result = await runExport(root, path.join(root, 'out-diff'))
    const { rows } = readFvc1(result.featuresPath)
    const dist = (a: Float32Array, b: Float32Array) =>
      Math.sqrt(a.reduce((acc, v, i) => acc + (v - b[i]) ** 2, 0))
    expect(dist(rows[0], rows[1])).toBeGreaterThan(1e-4)
    expect(dist(rows[0], rows[2])).toBeGreaterThan(1e-4)
  })

  it('re-export is byte-identical', async () => {
    const a = await runExport(root, path.join(root, 'rep-a'))
    const b = await runExport(root, path.join(root, 'rep-b'))
    expect(fs.readFileSync(a.featuresPath).equals(fs.readFileSync(b.featuresPath))).toBe(true)
    expect(fs.readFileSync(a.manifestPath, 'utf8')).toBe(fs.readFileSync(b.manifestPath, 'utf8'))
  })

  it('spatial map variant records the channels-first shape', async () => {
    const result = await runExport(root, path.join(root, 'out-map'), 'map')
    const manifest = JSON.parse(fs.readFileSync(result.manifestPath, 'utf8'))
    expect(manifest.visual.kind).toBe('map')
    const [c, h, w] = manifest.visual.shape
    const { dim } = readFvc1(result.featuresPath)
    expect(dim).toBe(c * h * w)
  })

  it('skips unreadable images and reports them', async () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'morphofv-bad-'))
    const images = makeToyFolder(dir)
    fs.writeFileSync(path.join(images, 'cafe-002.png'), 'not a png at all')
    const result = await runExport(dir, path.join(dir, 'out'))
    expect(result.exported).toBe(2)
    expect(result.skipped).toHaveLength(1)
    expect(result.skipped[0].file).toBe('cafe-002.png')
    const report = JSON.parse(fs.readFileSync(result.reportPath, 'utf8'))
    expect(report.skipped[0].reason).toContain('unreadable')
  })
})

describe('morphofv pipeline contract', () => {
  function morphofv(args: string[]) {
    return spawnSync('morphofv', args, { encoding: 'utf8' })
  }

  it('exported artifacts pass validate-manifest and encode-fv', async () => {
    const pipelineAvailable = morphofv(['--help']).status === 0
    if (!pipelineAvailable) {
      console.warn('morphofv CLI not on PATH; skipping cross-package contract test')
      return
    }
    const out = path.join(root, 'contract')
    const result = await runExport(root, out)

    const validate = morphofv(['validate-manifest', result.manifestPath])
    expect(validate.stderr).toBe('')
    expect(validate.status).toBe(0)

    const pca = path.join(out, 'pca.json')
    const gmm = path.join(out, 'gmm.json')
    expect(morphofv(['pca-fit', '--pca-dim', '6', '--output', pca]).status).toBe(0)
    expect(
      morphofv(['gmm-fit', '--pca', pca, '--k', '2', '--seed', '0', '--max-iters', '15',
                '--output', gmm]).status,
    ).toBe(0)
    const encode = morphofv([
      'encode-fv', '--manifest', result.manifestPath,
      '--pca', pca, '--gmm', gmm, '--output', path.join(out, 'fv.fvc1'),
    ])
    expect(encode.stderr).toBe('')
    expect(encode.status).toBe(0)

    const { rows } = readFvc1(path.join(out, 'fv.fvc1'))
    expect(rows).toHaveLength(3)
    // the sample without proposals encodes to the zero vector
    expect(rows[1].every((v) => v === 0)).toBe(true)
    expect(rows[0].some((v) => v !== 0)).toBe(true)
  }, 60000)
})
