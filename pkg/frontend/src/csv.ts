/** Parsers for the CSV artifacts written by the specpol CLI. */

export interface ResidualRow {
  re: number
  im: number
  residual: number
}

export interface SweepRow {
  s: number
  deviation: number
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.trim().length > 0)
}

function parseNumber(token: string, line: number, column: string): number {
  const value = Number(token)
  if (token.trim() === '' || Number.isNaN(value) && token.trim() !== 'nan') {
    throw new Error(`line ${line}: cannot parse ${column} from ${JSON.stringify(token)}`)
  }
  return value
}

export function parseResidualCsv(text: string): ResidualRow[] {
  const lines = splitLines(text)
  if (lines.length === 0 || lines[0] !== 're_lambda,im_lambda,residual') {
    throw new Error('residuals CSV must start with header re_lambda,im_lambda,residual')
  }
  const rows: ResidualRow[] = []
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(',')
    if (parts.length !== 3) {
      throw new Error(`line ${i + 1}: expected 3 columns, found ${parts.length}`)
    }
    rows.push({
      re: parseNumber(parts[0], i + 1, 're_lambda'),
      im: parseNumber(parts[1], i + 1, 'im_lambda'),
      residual: parseNumber(parts[2], i + 1, 'residual'),
    })
  }
  if (rows.length === 0) throw new Error('residuals CSV has no data rows')
  return rows
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = splitLines(text)
  if (lines.length === 0 || lines[0] !== 's,deviation') {
    throw new Error('sweep CSV must start with header s,deviation')
  }
  const rows: SweepRow[] = []
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(',')
    if (parts.length !== 2) {
      throw new Error(`line ${i + 1}: expected 2 columns, found ${parts.length}`)
    }
    rows.push({
      s: parseNumber(parts[0], i + 1, 's'),
      deviation: parseNumber(parts[1], i + 1, 'deviation'),
    })
  }
  if (rows.length === 0) throw new Error('sweep CSV has no data rows')
  return rows
}

export interface SpectrumPoint {
  re: number
  im: number
  residual?: number
  accepted?: boolean
}

/** Accepts either a full classification report or a bare point array. */
export function parseEigenvaluesJson(text: string): SpectrumPoint[] {
  const data = JSON.parse(text)
  const entries = Array.isArray(data) ? data : data.eigenvalues
  if (!Array.isArray(entries)) {
    throw new Error('eigenvalues JSON must be an array or contain an "eigenvalues" array')
  }
  return entries.map((e: any) => ({
    re: Number(e.re),
    im: Number(e.im),
    residual: e.residual === undefined ? undefined : Number(e.residual),
    accepted: e.accepted,
  }))
}

export function parseTruthJson(text: string): SpectrumPoint[] {
  const data = JSON.parse(text)
  if (!Array.isArray(data.points)) {
    throw new Error('truth JSON must contain a "points" array')
  }
  return data.points.map((p: any) => ({ re: Number(p.re), im: Number(p.im) }))
}
