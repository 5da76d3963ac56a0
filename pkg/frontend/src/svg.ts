/** Minimal SVG assembly: no DOM, just well-formed strings. */

export function fmt(x: number): string {
  return Number.isInteger(x) ? String(x) : x.toFixed(3).replace(/0+$/, '').replace(/\.$/, '')
}

export function tag(name: string, attrs: Record<string, string | number>, body = ''): string {
  const parts = Object.entries(attrs).map(([k, v]) => `${k}="${v}"`)
  return body
    ? `<${name} ${parts.join(' ')}>${body}</${name}>`
    : `<${name} ${parts.join(' ')}/>`
}

export function pathFromRing(points: Array<[number, number]>): string {
  const [first, ...rest] = points
  const segs = rest.map(([x, y]) => `L${fmt(x)} ${fmt(y)}`)
  return `M${fmt(first[0])} ${fmt(first[1])}${segs.join('')}Z`
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">`,
    ...body,
    '</svg>',
    '',
  ].join('\n')
}

/** Affine map from data coordinates to a square viewport with margins. */
export interface Viewport {
  x: (dataX: number) => number
  y: (dataY: number) => number
}

export function makeViewport(xDomain: [number, number], yDomain: [number, number],
                             size: number, margin: number): Viewport {
  const sx = (size - 2 * margin) / (xDomain[1] - xDomain[0])
  const sy = (size - 2 * margin) / (yDomain[1] - yDomain[0])
  return {
    x: (v) => margin + (v - xDomain[0]) * sx,
    y: (v) => size - margin - (v - yDomain[0]) * sy,  // flip: SVG y grows downward
  }
}

/** Grayscale stroke for level index i of n (darker = deeper level). */
export function levelColor(i: number, n: number): string {
  const shade = Math.round(30 + (200 * i) / Math.max(n - 1, 1))
  return `rgb(${shade},${shade},${shade})`
}
