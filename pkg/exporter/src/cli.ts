#!/usr/bin/env node
import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'
import { exportDataset } from './export.js'

async function main() {
  const argv = await yargs(hideBin(process.argv))
    .scriptName('morphofv-export')
    .usage('$0 --images <dir> --labels <csv> --out <dir> [options]')
    .option('images', { type: 'string', demandOption: true, describe: 'image folder' })
    .option('labels', { type: 'string', demandOption: true, describe: 'CSV: id,label,split' })
    .option('proposals', { type: 'string', describe: 'CSV: id,text,confidence' })
    .option('out', { type: 'string', demandOption: true, describe: 'output directory' })
    .option('variant', {
      choices: ['pooled', 'map'] as const,
      default: 'pooled' as const,
      describe: 'pooled channel vector or channels-first spatial map',
    })
    .option('backbone', { type: 'string', default: 'tiny-cnn-v1' })
    .option('seed', { type: 'number', default: 0 })
    .strict()
    .parse()

  const result = await exportDataset({
    imagesDir: argv.images,
    labelsFile: argv.labels,
    proposalsFile: argv.proposals,
    outDir: argv.out,
    variant: argv.variant,
    backbone: argv.backbone,
    seed: argv.seed,
  })
  console.log(
    `exported ${result.exported} images -> ${result.manifestPath}` +
      (result.skipped.length ? ` (${result.skipped.length} skipped, see report)` : ''),
  )
}

main().catch((err) => {
  console.error(`error: ${err.message}`)
  process.exit(1)
})
