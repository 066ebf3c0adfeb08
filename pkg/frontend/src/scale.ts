// Axis scales and tick placement. Everything here is a pure function of
// its inputs so rendered figures are reproducible byte for byte.

export interface Scale {
  (v: number): number;
  ticks: number[];
}

export function linearScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  const span = hi - lo || 1;
  const f = ((v: number) => pxLo + ((v - lo) / span) * (pxHi - pxLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

export function logScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error('log scale needs positive bounds');
  }
  const llo = Math.log10(lo);
  const span = Math.log10(hi) - llo || 1;
  const f = ((v: number) =>
    pxLo + ((Math.log10(v) - llo) / span) * (pxHi - pxLo)) as Scale;
  f.ticks = logTicks(lo, hi);
  return f;
}

// 4-7 round-valued ticks covering [lo, hi]
export function linearTicks(lo: number, hi: number): number[] {
  const span = hi - lo || 1;
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

// powers of ten inside [lo, hi]; endpoints added when the range spans
// less than one decade so the axis never comes out bare
export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (
    let e = Math.ceil(Math.log10(lo) - 1e-9);
    e <= Math.floor(Math.log10(hi) + 1e-9);
    e++
  ) {
    out.push(Math.pow(10, e));
  }
  if (out.length < 2) {
    return [lo, ...out.filter((t) => t > lo && t < hi), hi];
  }
  return out;
}

export function fmtTick(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(0).replace('+', '');
  }
  return String(Number(v.toPrecision(6)));
}

// fixed-point pixel coordinates keep the SVG stable across platforms
export function px(v: number): string {
  return v.toFixed(2);
}
