// Readers for the three CSV schemas the experiment harness writes.
// Headers are matched exactly; anything else is a hard error so schema
// drift shows up here and not as a silently wrong figure.

export interface ResultRow {
  level: number;
  median: number;
  q1: number;
  q3: number;
  min: number;
  max: number;
  nSamples: number;
  achievedEdgeLength: number;
  seed: number;
}

export interface SeriesSample {
  time: number;
  totalArea: number;
  medianAr: number;
  q1: number;
  q3: number;
}

export interface SeriesData {
  samples: SeriesSample[];
  status: string | null;
}

export interface AspectRow {
  mesh: string;
  element: number;
  aspectRatio: number;
}

const RESULT_HEADER =
  'level,median,q1,q3,min,max,n_samples,achieved_edge_length,seed';
const SERIES_HEADER = 'time,total_area,median_ar,q1,q3';
const ASPECT_HEADER = 'mesh,element,aspect_ratio';

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
}

function num(field: string, line: number, name: string): number {
  const v = Number(field);
  if (field === '' || Number.isNaN(v)) {
    throw new Error(`${name}: line ${line}: bad number '${field}'`);
  }
  return v;
}

function checkHeader(lines: string[], expected: string, name: string): void {
  if (lines.length === 0) {
    throw new Error(`${name}: empty file`);
  }
  if (lines[0] !== expected) {
    throw new Error(`${name}: expected header '${expected}'`);
  }
}

export function parseResultCsv(text: string, name = 'results'): ResultRow[] {
  const lines = splitLines(text);
  checkHeader(lines, RESULT_HEADER, name);
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const f = lines[i].split(',');
    if (f.length !== 9) {
      throw new Error(`${name}: line ${i + 1}: expected 9 fields`);
    }
    rows.push({
      level: num(f[0], i + 1, name),
      median: num(f[1], i + 1, name),
      q1: num(f[2], i + 1, name),
      q3: num(f[3], i + 1, name),
      min: num(f[4], i + 1, name),
      max: num(f[5], i + 1, name),
      nSamples: num(f[6], i + 1, name),
      achievedEdgeLength: num(f[7], i + 1, name),
      seed: num(f[8], i + 1, name),
    });
  }
  if (rows.length === 0) {
    throw new Error(`${name}: no data rows`);
  }
  return rows;
}

export function parseSeriesCsv(text: string, name = 'series'): SeriesData {
  const lines = splitLines(text);
  checkHeader(lines, SERIES_HEADER, name);
  const samples: SeriesSample[] = [];
  let status: string | null = null;
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.startsWith('#')) {
      const m = line.match(/^#\s*status:\s*(.*)$/);
      if (m) status = m[1];
      continue;
    }
    const f = line.split(',');
    if (f.length !== 5) {
      throw new Error(`${name}: line ${i + 1}: expected 5 fields`);
    }
    samples.push({
      time: num(f[0], i + 1, name),
      totalArea: num(f[1], i + 1, name),
      medianAr: num(f[2], i + 1, name),
      q1: num(f[3], i + 1, name),
      q3: num(f[4], i + 1, name),
    });
  }
  if (samples.length === 0) {
    throw new Error(`${name}: no data rows`);
  }
  return { samples, status };
}

export function parseAspectCsv(text: string, name = 'aspect'): AspectRow[] {
  const lines = splitLines(text);
  checkHeader(lines, ASPECT_HEADER, name);
  const rows: AspectRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const f = lines[i].split(',');
    if (f.length !== 3) {
      throw new Error(`${name}: line ${i + 1}: expected 3 fields`);
    }
    rows.push({
      mesh: f[0],
      element: num(f[1], i + 1, name),
      aspectRatio: num(f[2], i + 1, name),
    });
  }
  if (rows.length === 0) {
    throw new Error(`${name}: no data rows`);
  }
  return rows;
}
