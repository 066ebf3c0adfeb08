// Aspect-ratio histograms, one panel per mesh label, shared bins on
// [0, 1]. Panels keep the label order of first appearance in the CSV.

import { AspectRow } from './csv.js';
import { Frame, axes } from './axes.js';
import { linearScale, px } from './scale.js';
import { document, el, seriesColor, text } from './svg.js';

export interface Histogram {
  label: string;
  edges: number[]; // nBins + 1 edges spanning [0, 1]
  counts: number[];
  total: number;
}

export function binAspectRatios(rows: AspectRow[], nBins = 20): Histogram[] {
  if (nBins < 1) {
    throw new Error('need at least one bin');
  }
  const order: string[] = [];
  const byLabel = new Map<string, number[]>();
  for (const r of rows) {
    if (r.aspectRatio < 0 || r.aspectRatio > 1 + 1e-12) {
      throw new Error(`aspect ratio ${r.aspectRatio} outside [0, 1]`);
    }
    let bucket = byLabel.get(r.mesh);
    if (!bucket) {
      bucket = new Array(nBins).fill(0);
      byLabel.set(r.mesh, bucket);
      order.push(r.mesh);
    }
    // values of exactly 1 belong to the last bin
    const i = Math.min(Math.floor(r.aspectRatio * nBins), nBins - 1);
    bucket[i] += 1;
  }
  const edges = Array.from({ length: nBins + 1 }, (_, i) => i / nBins);
  return order.map((label) => {
    const counts = byLabel.get(label)!;
    return {
      label,
      edges,
      counts,
      total: counts.reduce((a, b) => a + b, 0),
    };
  });
}

const PANEL_W = 480;
const PANEL_H = 150;
const GAP = 46;

export function histogramFigure(rows: AspectRow[], nBins = 20): string {
  const hists = binAspectRatios(rows, nBins);
  if (hists.length === 0) {
    throw new Error('no aspect-ratio rows');
  }
  const width = PANEL_W + 110;
  const height = 30 + hists.length * (PANEL_H + GAP);
  const body: string[] = [];
  hists.forEach((h, pi) => {
    const top = 30 + pi * (PANEL_H + GAP);
    const f: Frame = { left: 70, right: 70 + PANEL_W, top, bottom: top + PANEL_H };
    const peak = Math.max(...h.counts, 1);
    const x = linearScale(0, 1, f.left, f.right);
    const y = linearScale(0, peak, f.bottom, f.top);
    const color = seriesColor(pi);
    h.counts.forEach((c, i) => {
      if (c === 0) return;
      const x0 = x(h.edges[i]);
      const x1 = x(h.edges[i + 1]);
      body.push(
        el('rect', {
          x: px(x0),
          y: px(y(c)),
          width: px(x1 - x0),
          height: px(f.bottom - y(c)),
          fill: color,
          'fill-opacity': '0.75',
          stroke: 'white',
          'stroke-width': '0.5',
        }),
      );
    });
    body.push(axes(f, x, y, pi === hists.length - 1 ? 'aspect ratio' : '', 'elements'));
    body.push(
      text(px(f.left + 6), px(top - 6), `${h.label} (${h.total} elements)`, {
        'font-size': 12,
      }),
    );
  });
  return document(width, height, body.join('\n'));
}
