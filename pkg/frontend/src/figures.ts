/** Figure builders: residual contour maps with overlays, sweep line plots. */

import type { SpectrumPoint, SweepRow } from './csv.js'
import { computeContours, logLevels } from './contour.js'
import type { GridField } from './field.js'
import { document, fmt, levelColor, makeViewport, pathFromRing, tag } from './svg.js'

const SIZE = 640
const MARGIN = 50

export interface ContourFigureOptions {
  field: GridField
  eigenvalues?: SpectrumPoint[]
  truth?: SpectrumPoint[]
  levels?: number[]
  title?: string
}

export function renderContourFigure(opts: ContourFigureOptions): string {
  const { field } = opts
  const levels = opts.levels ?? logLevels()
  const vp = makeViewport(
    [field.xs[0], field.xs[field.xs.length - 1]],
    [field.ys[0], field.ys[field.ys.length - 1]], SIZE, MARGIN)
  const body: string[] = []

  body.push(tag('rect', {
    x: MARGIN, y: MARGIN, width: SIZE - 2 * MARGIN, height: SIZE - 2 * MARGIN,
    fill: 'white', stroke: 'black', 'stroke-width': 1,
  }))

  const rings = computeContours(field, levels)
  for (const ring of rings) {
    const idx = levels.findIndex((lv) => lv === ring.level)
    const scaled = ring.points.map(([x, y]) => [vp.x(x), vp.y(y)] as [number, number])
    body.push(tag('path', {
      d: pathFromRing(scaled),
      fill: 'none',
      stroke: levelColor(idx < 0 ? 0 : idx, levels.length),
      'stroke-width': 1,
      'data-level': ring.level.toExponential(3),
    }))
  }

  // unit circle guide
  const r = vp.x(1) - vp.x(0)
  body.push(tag('circle', {
    cx: fmt(vp.x(0)), cy: fmt(vp.y(0)), r: fmt(r),
    fill: 'none', stroke: '#4466cc', 'stroke-dasharray': '4 3', 'stroke-width': 1,
  }))

  for (const p of opts.truth ?? []) {
    body.push(tag('circle', {
      cx: fmt(vp.x(p.re)), cy: fmt(vp.y(p.im)), r: 3.5,
      fill: 'black', class: 'truth-point',
    }))
  }
  for (const p of opts.eigenvalues ?? []) {
    const x = vp.x(p.re)
    const y = vp.y(p.im)
    const arm = 4
    const cross =
      `M${fmt(x - arm)} ${fmt(y - arm)}L${fmt(x + arm)} ${fmt(y + arm)}` +
      `M${fmt(x - arm)} ${fmt(y + arm)}L${fmt(x + arm)} ${fmt(y - arm)}`
    body.push(tag('path', {
      d: cross, stroke: '#e07820', 'stroke-width': 2, fill: 'none', class: 'eig-cross',
    }))
  }

  body.push(tag('text', { x: SIZE / 2, y: MARGIN - 14, 'text-anchor': 'middle',
                          'font-size': 15, 'font-family': 'sans-serif' },
                escapeXml(opts.title ?? 'residual levels 10^{-p}')))
  axisLabels(body, vp, field)
  return document(SIZE, SIZE, body)
}

function axisLabels(body: string[], vp: ReturnType<typeof makeViewport>,
                    field: GridField): void {
  const x0 = field.xs[0]
  const x1 = field.xs[field.xs.length - 1]
  const y0 = field.ys[0]
  const y1 = field.ys[field.ys.length - 1]
  const label = (x: number, y: number, text: string, anchor = 'middle') =>
    body.push(tag('text', { x: fmt(x), y: fmt(y), 'text-anchor': anchor,
                            'font-size': 12, 'font-family': 'sans-serif' }, text))
  label(vp.x(x0), SIZE - MARGIN + 18, String(x0))
  label(vp.x(x1), SIZE - MARGIN + 18, String(x1))
  label(vp.x(0), SIZE - MARGIN + 18, 'Re')
  label(MARGIN - 8, vp.y(y0) + 4, String(y0), 'end')
  label(MARGIN - 8, vp.y(y1) + 4, String(y1), 'end')
  label(MARGIN - 8, vp.y(0) + 4, 'Im', 'end')
}

export function renderSweepFigure(rows: SweepRow[], title = 'deviation from normality'): string {
  if (rows.length === 0) throw new Error('sweep figure needs at least one row')
  const sorted = [...rows].sort((a, b) => a.s - b.s)
  const logs = sorted.map((r) => Math.log10(r.deviation))
  const xDomain: [number, number] = [sorted[0].s, sorted[sorted.length - 1].s]
  const yDomain: [number, number] = [Math.min(...logs), Math.max(...logs)]
  const pad = Math.max(0.1 * (yDomain[1] - yDomain[0]), 0.2)
  const vp = makeViewport(xDomain, [yDomain[0] - pad, yDomain[1] + pad], SIZE, MARGIN)

  const body: string[] = []
  body.push(tag('rect', {
    x: MARGIN, y: MARGIN, width: SIZE - 2 * MARGIN, height: SIZE - 2 * MARGIN,
    fill: 'white', stroke: 'black', 'stroke-width': 1,
  }))
  const pts = sorted.map((r, i) => `${i ? 'L' : 'M'}${fmt(vp.x(r.s))} ${fmt(vp.y(logs[i]))}`)
  body.push(tag('path', { d: pts.join(''), fill: 'none', stroke: '#2255aa',
                          'stroke-width': 2, class: 'sweep-line' }))
  sorted.forEach((r, i) => body.push(tag('circle', {
    cx: fmt(vp.x(r.s)), cy: fmt(vp.y(logs[i])), r: 4, fill: '#2255aa',
    class: 'sweep-point', 'data-s': r.s, 'data-deviation': r.deviation.toExponential(4),
  })))
  sorted.forEach((r) => body.push(tag('text', {
    x: fmt(vp.x(r.s)), y: SIZE - MARGIN + 18, 'text-anchor': 'middle',
    'font-size': 12, 'font-family': 'sans-serif',
  }, `s=${r.s}`)))
  body.push(tag('text', { x: SIZE / 2, y: MARGIN - 14, 'text-anchor': 'middle',
                          'font-size': 15, 'font-family': 'sans-serif' },
                escapeXml(`${title} (log10 scale)`)))
  return document(SIZE, SIZE, body)
}

function escapeXml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}
