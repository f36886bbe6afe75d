/**
 * One-shot export: run the backbone over an image folder and emit the
 * manifest plus FVC1 visual features that the morphofv pipeline consumes.
 *
 * Labels come from a CSV of `id,label,split`; word proposals (optional) from
 * a CSV of `id,text,confidence`. Ids are image file stems. Unreadable or
 * unlabeled images are skipped and listed in `export-report.json`.
 */
import * as fs from 'fs'
import * as path from 'path'
import { Backbone, createBackbone } from './backbone.js'
import { writeFvc1 } from './fvc1.js'
import { IMAGE_EXTENSIONS, decodeImage } from './images.js'
import { Manifest, Proposal, SampleRecord, VisualSpec, writeManifest } from './manifest.js'

export interface ExportConfig {
  imagesDir: string
  labelsFile: string
  proposalsFile?: string
  outDir: string
  variant: 'pooled' | 'map'
  backbone: string
  seed: number
}

export interface ExportResult {
  manifestPath: string
  featuresPath: string
  reportPath: string
  exported: number
  skipped: Array<{ file: string; reason: string }>
}

interface LabelRow {
  label: string
  split: 'train' | 'test'
}

function readCsv(filePath: string): string[][] {
  return fs
    .readFileSync(filePath, 'utf8')
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(',').map((cell) => cell.trim()))
}

function readLabels(filePath: string): Map<string, LabelRow> {
  const out = new Map<string, LabelRow>()
  for (const cells of readCsv(filePath)) {
    if (cells[0] === 'id') continue // header
    const [id, label, split] = cells
    if (!id || !label || (split !== 'train' && split !== 'test')) {
      throw new Error(`${filePath}: bad label row "${cells.join(',')}" (want id,label,train|test)`)
    }
    out.set(id, { label, split })
  }
  return out
}

function readProposals(filePath: string | undefined): Map<string, Proposal[]> {
  const out = new Map<string, Proposal[]>()
  if (!filePath) return out
  for (const cells of readCsv(filePath)) {
    if (cells[0] === 'id') continue
    const [id, text, confidence] = cells
    const value = Number(confidence)
    if (!id || !text || !Number.isFinite(value) || value < 0 || value > 1) {
      throw new Error(`${filePath}: bad proposal row "${cells.join(',')}"`)
    }
    if (!out.has(id)) out.set(id, [])
    out.get(id)!.push({ text, confidence: value })
  }
  return out
}

export async function exportDataset(config: ExportConfig): Promise<ExportResult> {
  const labels = readLabels(config.labelsFile)
  const proposals = readProposals(config.proposalsFile)
  fs.mkdirSync(config.outDir, { recursive: true })

  const files = fs
    .readdirSync(config.imagesDir)
    .filter((f) => IMAGE_EXTENSIONS.has(path.extname(f).toLowerCase()))
    .sort()

  const backbone: Backbone = await createBackbone(config.backbone, config.seed)
  const rows: Float32Array[] = []
  const samples: SampleRecord[] = []
  const skipped: Array<{ file: string; reason: string }> = []
  let visual: VisualSpec | null = null

  try {
    for (const file of files) {
      const id = path.basename(file, path.extname(file))
      const labelRow = labels.get(id)
      if (!labelRow) {
        skipped.push({ file, reason: 'no label entry' })
        continue
      }
      let features
      try {
        features = backbone.apply(decodeImage(path.join(config.imagesDir, file)))
      } catch (err) {
        skipped.push({ file, reason: `unreadable: ${(err as Error).message}` })
        continue
      }
      if (config.variant === 'pooled') {
        rows.push(features.pooled)
        visual ??= { kind: 'pooled', dim: features.pooled.length }
      } else {
        rows.push(features.mapCHW)
        visual ??= { kind: 'map', shape: features.mapShape }
      }
      samples.push({
        id,
        split: labelRow.split,
        label: labelRow.label,
        visual_feature_ref: { file: 'visual.fvc1', offset: rows.length - 1 },
        proposals: proposals.get(id) ?? [],
      })
    }
  } finally {
    backbone.dispose()
  }

  if (!visual) {
    throw new Error(`no exportable images found under ${config.imagesDir}`)
  }
  const dim = config.variant === 'pooled'
    ? (visual as { dim: number }).dim
    : (visual as { shape: number[] }).shape.reduce((a, b) => a * b, 1)

  const featuresPath = path.join(config.outDir, 'visual.fvc1')
  writeFvc1(featuresPath, rows, dim)

  const classes = [...new Set([...labels.values()].map((r) => r.label))].sort()
  const manifest: Manifest = {
    format: 'morphofv-manifest',
    version: 1,
    classes,
    visual,
    samples,
  }
  const manifestPath = path.join(config.outDir, 'manifest.json')
  writeManifest(manifestPath, manifest)

  const reportPath = path.join(config.outDir, 'export-report.json')
  fs.writeFileSync(
    reportPath,
    JSON.stringify({ backbone: backbone.name, exported: samples.length, skipped }, null, 2) + '\n',
  )
  return { manifestPath, featuresPath, reportPath, exported: samples.length, skipped }
}
