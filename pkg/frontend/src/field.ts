/** Rebuild a rectangular lattice from scattered residual rows. */

import type { ResidualRow } from './csv.js'

export interface GridField {
  xs: number[]
  ys: number[]
  /** row-major, y (im) outer, x (re) inner */
  values: Float64Array
}

function uniqueSorted(values: number[]): number[] {
  const out = Array.from(new Set(values))
  out.sort((a, b) => a - b)
  return out
}

export function toGridField(rows: ResidualRow[]): GridField {
  const xs = uniqueSorted(rows.map((r) => r.re))
  const ys = uniqueSorted(rows.map((r) => r.im))
  if (xs.length * ys.length !== rows.length) {
    throw new Error(
      `grid is not a complete rectangular lattice: ${xs.length} x ${ys.length} ` +
      `axis values but ${rows.length} rows`)
  }
  const xi = new Map(xs.map((x, i) => [x, i]))
  const yi = new Map(ys.map((y, i) => [y, i]))
  const values = new Float64Array(rows.length).fill(Number.NaN)
  for (const row of rows) {
    values[yi.get(row.im)! * xs.length + xi.get(row.re)!] = row.residual
  }
  return { xs, ys, values }
}
