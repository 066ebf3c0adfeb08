import { Scale, fmtTick, px } from './scale.js';
import { el, text } from './svg.js';

export interface Frame {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

// frame rectangle, tick marks and numeric labels for one panel;
// y scales are expected to map data-low to pixel-bottom
export function axes(
  f: Frame,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const out: string[] = [];
  out.push(
    el('rect', {
      x: px(f.left),
      y: px(f.top),
      width: px(f.right - f.left),
      height: px(f.bottom - f.top),
      fill: 'none',
      stroke: '#444',
    }),
  );
  for (const t of x.ticks) {
    const tx = px(x(t));
    out.push(
      el('line', {
        x1: tx, y1: px(f.bottom), x2: tx, y2: px(f.bottom + 4),
        stroke: '#444',
      }),
    );
    out.push(
      text(tx, px(f.bottom + 16), fmtTick(t), { 'text-anchor': 'middle' }),
    );
  }
  for (const t of y.ticks) {
    const ty = px(y(t));
    out.push(
      el('line', {
        x1: px(f.left - 4), y1: ty, x2: px(f.left), y2: ty,
        stroke: '#444',
      }),
    );
    out.push(
      text(px(f.left - 7), px(y(t) + 4), fmtTick(t), { 'text-anchor': 'end' }),
    );
  }
  const cx = px((f.left + f.right) / 2);
  out.push(text(cx, px(f.bottom + 32), xLabel, { 'text-anchor': 'middle' }));
  const cy = (f.top + f.bottom) / 2;
  out.push(
    text(px(f.left - 44), px(cy), yLabel, {
      'text-anchor': 'middle',
      transform: `rotate(-90 ${px(f.left - 44)} ${px(cy)})`,
    }),
  );
  return out.join('\n');
}

export function legend(
  f: Frame,
  entries: { label: string; color: string }[],
): string {
  const out: string[] = [];
  entries.forEach((e, i) => {
    const y = f.top + 10 + 16 * i;
    out.push(
      el('line', {
        x1: px(f.right - 110), y1: px(y), x2: px(f.right - 90), y2: px(y),
        stroke: e.color, 'stroke-width': 2,
      }),
    );
    out.push(text(px(f.right - 85), px(y + 4), e.label));
  });
  return out.join('\n');
}
