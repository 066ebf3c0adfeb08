// String-assembled SVG. No DOM, no renderer; attribute order is the
// insertion order of the object literal, so output is deterministic.

export type Attrs = Record<string, string | number>;

export function el(name: string, attrs: Attrs, body = ''): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(' ');
  return body === ''
    ? `<${name} ${parts}/>`
    : `<${name} ${parts}>${body}</${name}>`;
}

export function text(x: string, y: string, s: string, attrs: Attrs = {}): string {
  return el('text', { x, y, 'font-size': 11, 'font-family': 'sans-serif', ...attrs }, escapeText(s));
}

export function escapeText(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>\n` +
    body +
    '\n</svg>\n'
  );
}

export const PALETTE = ['#35618f', '#c4453c', '#3d8a52', '#8a5fa8'];

export function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length];
}
