// Simulation time-series figure: total surface area on top, median
// aspect ratio with interquartile band below, shared time axis.

import { SeriesData } from './csv.js';
import { Frame, axes, legend } from './axes.js';
import { Scale, linearScale, px } from './scale.js';
import { document, el, seriesColor, text } from './svg.js';

export interface NamedSeries {
  label: string;
  data: SeriesData;
}

const WIDTH = 620;
const PANEL_H = 170;
const TOP: Frame = { left: 70, right: WIDTH - 20, top: 40, bottom: 40 + PANEL_H };
const BOT: Frame = {
  left: 70,
  right: WIDTH - 20,
  top: TOP.bottom + 50,
  bottom: TOP.bottom + 50 + PANEL_H,
};
const HEIGHT = BOT.bottom + 60;

export function arBandPoints(data: SeriesData, x: Scale, y: Scale): string {
  const upper = data.samples.map((s) => `${px(x(s.time))},${px(y(s.q3))}`);
  const lower = [...data.samples]
    .reverse()
    .map((s) => `${px(x(s.time))},${px(y(s.q1))}`);
  return [...upper, ...lower].join(' ');
}

export function timeseriesScales(series: NamedSeries[]): {
  x: Scale;
  yArea: Scale;
  yAr: Scale;
} {
  if (series.length === 0) {
    throw new Error('time-series figure needs at least one series');
  }
  const all = series.flatMap((s) => s.data.samples);
  const tMax = Math.max(...all.map((s) => s.time));
  const areas = all.map((s) => s.totalArea);
  const ars = all.flatMap((s) => [s.q1, s.q3, s.medianAr]);
  return {
    x: linearScale(0, tMax, TOP.left, TOP.right),
    yArea: linearScale(
      Math.min(...areas), Math.max(...areas), TOP.bottom, TOP.top),
    yAr: linearScale(
      Math.min(...ars), Math.max(...ars), BOT.bottom, BOT.top),
  };
}

export function timeseriesFigure(series: NamedSeries[], title?: string): string {
  const { x, yArea, yAr } = timeseriesScales(series);

  const body: string[] = [];
  series.forEach((s, i) => {
    const color = seriesColor(i);
    body.push(
      el('polyline', {
        points: s.data.samples
          .map((p) => `${px(x(p.time))},${px(yArea(p.totalArea))}`)
          .join(' '),
        fill: 'none',
        stroke: color,
        'stroke-width': 2,
      }),
    );
    body.push(
      el('polygon', {
        points: arBandPoints(s.data, x, yAr),
        fill: color,
        'fill-opacity': '0.18',
        stroke: 'none',
      }),
    );
    body.push(
      el('polyline', {
        points: s.data.samples
          .map((p) => `${px(x(p.time))},${px(yAr(p.medianAr))}`)
          .join(' '),
        fill: 'none',
        stroke: color,
        'stroke-width': 2,
      }),
    );
    if (s.data.status) {
      // a diverged run ends early; flag it where the line stops
      const last = s.data.samples[s.data.samples.length - 1];
      body.push(
        text(px(x(last.time)), px(yArea(last.totalArea) - 8),
          `${s.label}: ${s.data.status}`, { fill: color, 'text-anchor': 'end' }),
      );
    }
  });
  body.push(axes(TOP, x, yArea, '', 'total area'));
  body.push(axes(BOT, x, yAr, 'time', 'median aspect ratio'));
  body.push(
    legend(TOP, series.map((s, i) => ({ label: s.label, color: seriesColor(i) }))),
  );
  if (title) {
    body.push(
      text(px(WIDTH / 2), px(22), title, { 'text-anchor': 'middle', 'font-size': 14 }),
    );
  }
  return document(WIDTH, HEIGHT, body.join('\n'));
}
