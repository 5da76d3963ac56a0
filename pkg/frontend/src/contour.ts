/** Level-set extraction over a gridded residual field. */

import { contours } from 'd3-contour'
import type { GridField } from './field.js'

export interface ContourRing {
  level: number
  /** closed ring in data coordinates */
  points: Array<[number, number]>
}

/**
 * Logarithmically spaced residual levels 10^-p for p = pMax .. pMin,
 * returned strictly increasing.
 */
export function logLevels(pMin = 0.5, pMax = 4, step = 0.5): number[] {
  const out: number[] = []
  for (let p = pMax; p >= pMin - 1e-12; p -= step) out.push(10 ** -p)
  for (let i = 1; i < out.length; i++) {
    if (out[i] <= out[i - 1]) throw new Error('contour levels must be strictly increasing')
  }
  return out
}

export function computeContours(field: GridField, levels: number[]): ContourRing[] {
  const nx = field.xs.length
  const ny = field.ys.length
  const dx = (field.xs[nx - 1] - field.xs[0]) / (nx - 1)
  const dy = (field.ys[ny - 1] - field.ys[0]) / (ny - 1)
  const toData = ([gx, gy]: [number, number]): [number, number] =>
    [field.xs[0] + (gx - 0.5) * dx, field.ys[0] + (gy - 0.5) * dy]

  const generator = contours().size([nx, ny]).thresholds(levels)
  const rings: ContourRing[] = []
  for (const multi of generator(Array.from(field.values))) {
    for (const polygon of multi.coordinates) {
      for (const ring of polygon) {
        rings.push({
          level: multi.value,
          points: ring.map((pt) => toData(pt as [number, number])),
        })
      }
    }
  }
  return rings
}
