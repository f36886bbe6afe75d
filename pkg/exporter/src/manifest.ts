/** Manifest schema shared with the morphofv pipeline (format version 1). */
import * as fs from 'fs'

export interface Proposal {
  text: string
  confidence: number
}

export interface SampleRecord {
  id: string
  split: 'train' | 'test'
  label: string
  visual_feature_ref: { file: string; offset: number }
  proposals: Proposal[]
}

export type VisualSpec =
  | { kind: 'pooled'; dim: number }
  | { kind: 'map'; shape: [number, number, number] }

export interface Manifest {
  format: 'morphofv-manifest'
  version: 1
  classes: string[]
  visual: VisualSpec
  samples: SampleRecord[]
}

/** Stable stringify: objects keyed in sorted order, like the Python writer. */
function sortedJson(value: unknown, indent: number): string {
  const replacer = (_key: string, v: unknown) => {
    if (v && typeof v === 'object' && !Array.isArray(v)) {
      return Object.fromEntries(
        Object.entries(v as Record<string, unknown>).sort(([a], [b]) => (a < b ? -1 : 1)),
      )
    }
    return v
  }
  return JSON.stringify(value, replacer, indent)
}

export function writeManifest(path: string, manifest: Manifest): void {
  fs.writeFileSync(path, sortedJson(manifest, 2) + '\n')
}
