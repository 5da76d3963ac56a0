#!/usr/bin/env node
/**
 * specpol-plot <figure-type> --in <dir> --out <file.svg>
 *
 * Figure types:
 *   contour    residuals.csv with eigenvalue/truth overlays (when present)
 *   normality  line plot of normality.csv (s vs commutator norm)
 */

import { existsSync, mkdirSync, readFileSync, writeFileSync } from 'node:fs'
import { dirname, join } from 'node:path'
import { pathToFileURL } from 'node:url'

import { parseEigenvaluesJson, parseResidualCsv, parseSweepCsv, parseTruthJson } from './csv.js'
import { logLevels } from './contour.js'
import { toGridField } from './field.js'
import { renderContourFigure, renderSweepFigure } from './figures.js'

interface Args {
  figure: string
  inDir: string
  out: string
  levels?: number[]
  title?: string
}

function usage(): never {
  console.error('usage: specpol-plot <contour|normality> --in <dir> --out <file.svg> ' +
    '[--levels p1,p2,...] [--title text]')
  process.exit(2)
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) usage()
  const [figure, ...rest] = argv
  if (figure !== 'contour' && figure !== 'normality') usage()
  const args: Partial<Args> = { figure }
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i]
    const value = rest[i + 1]
    if (value === undefined) usage()
    if (key === '--in') args.inDir = value
    else if (key === '--out') args.out = value
    else if (key === '--title') args.title = value
    else if (key === '--levels') {
      args.levels = value.split(',').map((p) => 10 ** -Number(p))
      args.levels.sort((a, b) => a - b)
    } else usage()
  }
  if (!args.inDir || !args.out) usage()
  if (!args.out.endsWith('.svg')) {
    throw new Error('only .svg output is supported; pass a path ending in .svg')
  }
  return args as Args
}

export function renderFromDirectory(args: Args): string {
  if (args.figure === 'normality') {
    const rows = parseSweepCsv(readFileSync(join(args.inDir, 'normality.csv'), 'utf8'))
    return renderSweepFigure(rows, args.title ?? 'deviation from normality')
  }
  const field = toGridField(
    parseResidualCsv(readFileSync(join(args.inDir, 'residuals.csv'), 'utf8')))
  const eigPath = join(args.inDir, 'eigenvalues.json')
  const truthPath = join(args.inDir, 'truth.json')
  const eigenvalues = existsSync(eigPath)
    ? parseEigenvaluesJson(readFileSync(eigPath, 'utf8'))
    : undefined
  let truth
  if (existsSync(truthPath)) {
    truth = parseTruthJson(readFileSync(truthPath, 'utf8'))
  } else {
    console.warn('warning: truth.json not found; rendering without the truth overlay')
  }
  return renderContourFigure({
    field, eigenvalues, truth,
    levels: args.levels ?? logLevels(),
    title: args.title,
  })
}

export function main(argv: string[]): number {
  let args: Args
  try {
    args = parseArgs(argv)
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    return 2
  }
  try {
    const svg = renderFromDirectory(args)
    mkdirSync(dirname(args.out), { recursive: true })
    writeFileSync(args.out, svg)
    console.log(`figure: ${args.out}`)
    return 0
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    return 1
  }
}

if (process.argv[1] !== undefined &&
    import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)))
}
