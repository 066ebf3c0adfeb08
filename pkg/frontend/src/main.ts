// CLI: render experiment CSVs to SVG figures.
//
//   plot-sweep      out.svg series.csv [series.csv ...]
//   plot-histogram  out.svg aspect_ratios.csv
//   plot-timeseries out.svg series.csv [series.csv ...]
//
// Series labels come from the file names.

import { readFileSync, writeFileSync } from 'fs';
import { basename } from 'path';

import { parseAspectCsv, parseResultCsv, parseSeriesCsv } from './csv.js';
import { sweepFigure } from './sweep.js';
import { histogramFigure } from './histogram.js';
import { timeseriesFigure } from './timeseries.js';

function label(path: string): string {
  return basename(path).replace(/\.csv$/i, '');
}

function read(path: string): string {
  return readFileSync(path, 'utf8');
}

export function render(argv: string[]): { out: string; svg: string } {
  const [cmd, out, ...inputs] = argv;
  if (!cmd || !out || inputs.length === 0) {
    throw new Error(
      'usage: plot-sweep|plot-histogram|plot-timeseries OUT.svg INPUT.csv...',
    );
  }
  if (cmd === 'plot-sweep') {
    const series = inputs.map((p) => ({
      label: label(p),
      rows: parseResultCsv(read(p), label(p)),
    }));
    return { out, svg: sweepFigure(series) };
  }
  if (cmd === 'plot-histogram') {
    if (inputs.length !== 1) {
      throw new Error('plot-histogram takes exactly one CSV');
    }
    return { out, svg: histogramFigure(parseAspectCsv(read(inputs[0]), label(inputs[0]))) };
  }
  if (cmd === 'plot-timeseries') {
    const series = inputs.map((p) => ({
      label: label(p),
      data: parseSeriesCsv(read(p), label(p)),
    }));
    return { out, svg: timeseriesFigure(series) };
  }
  throw new Error(`unknown command '${cmd}'`);
}

export function main(argv: string[]): number {
  try {
    const { out, svg } = render(argv);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url.endsWith(basename(process.argv[1]))) {
  process.exit(main(process.argv.slice(2)));
}
