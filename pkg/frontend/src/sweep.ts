// Refinement-sweep figure: median error vs edge length on log-log axes,
// one line per series, interquartile range as a shaded band.

import { ResultRow } from './csv.js';
import { Frame, axes, legend } from './axes.js';
import { Scale, logScale, px } from './scale.js';
import { document, el, seriesColor, text } from './svg.js';

export interface SweepSeries {
  label: string;
  rows: ResultRow[];
}

export interface SweepOptions {
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

const WIDTH = 560;
const HEIGHT = 420;
const FRAME: Frame = { left: 70, right: WIDTH - 20, top: 40, bottom: HEIGHT - 60 };

// polygon tracing q3 left to right, then q1 back; exported so tests can
// check the band against the CSV columns directly
export function bandPoints(rows: ResultRow[], x: Scale, y: Scale): string {
  const upper = rows.map((r) => `${px(x(r.level))},${px(y(r.q3))}`);
  const lower = [...rows].reverse().map((r) => `${px(x(r.level))},${px(y(r.q1))}`);
  return [...upper, ...lower].join(' ');
}

export function sweepScales(series: SweepSeries[]): { x: Scale; y: Scale } {
  if (series.length === 0) {
    throw new Error('sweep figure needs at least one series');
  }
  for (const s of series) {
    // log axes cannot represent zero medians/quartiles
    for (const r of s.rows) {
      if (r.median <= 0 || r.q1 <= 0 || r.q3 <= 0) {
        throw new Error(`${s.label}: level ${r.level} has non-positive quartiles`);
      }
    }
  }
  const all = series.flatMap((s) => s.rows);
  const xs = all.map((r) => r.level);
  const ys = all.flatMap((r) => [r.q1, r.q3, r.median]);
  return {
    x: logScale(Math.min(...xs), Math.max(...xs), FRAME.left, FRAME.right),
    y: logScale(Math.min(...ys), Math.max(...ys), FRAME.bottom, FRAME.top),
  };
}

export function sweepFigure(series: SweepSeries[], opts: SweepOptions = {}): string {
  const { x, y } = sweepScales(series);

  const body: string[] = [];
  series.forEach((s, i) => {
    const rows = [...s.rows].sort((a, b) => a.level - b.level);
    const color = seriesColor(i);
    body.push(
      el('polygon', {
        points: bandPoints(rows, x, y),
        fill: color,
        'fill-opacity': '0.18',
        stroke: 'none',
      }),
    );
    body.push(
      el('polyline', {
        points: rows.map((r) => `${px(x(r.level))},${px(y(r.median))}`).join(' '),
        fill: 'none',
        stroke: color,
        'stroke-width': 2,
      }),
    );
    for (const r of rows) {
      body.push(
        el('circle', { cx: px(x(r.level)), cy: px(y(r.median)), r: 3, fill: color }),
      );
    }
  });
  body.push(
    axes(FRAME, x, y, opts.xLabel ?? 'target edge length', opts.yLabel ?? 'median error'),
  );
  body.push(legend(FRAME, series.map((s, i) => ({ label: s.label, color: seriesColor(i) }))));
  if (opts.title) {
    body.push(
      text(px(WIDTH / 2), px(24), opts.title, { 'text-anchor': 'middle', 'font-size': 14 }),
    );
  }
  return document(WIDTH, HEIGHT, body.join('\n'));
}
