import { readFileSync } from 'fs';
import { join } from 'path';
import { fileURLToPath } from 'url';
import { describe, expect, it } from 'vitest';

import { parseAspectCsv, parseResultCsv, parseSeriesCsv } from '../src/csv.js';

const FIX = fileURLToPath(new URL('./fixtures', import.meta.url));

function fixture(name: string): string {
  return readFileSync(join(FIX, name), 'utf8');
}

describe('parseResultCsv', () => {
  it('reads the sweep fixture', () => {
    const rows = parseResultCsv(fixture('square_old_sweep.csv'));
    expect(rows.length).toBe(3);
    expect(rows[0].level).toBe(0.5);
    expect(rows.map((r) => r.level)).toEqual([0.5, 0.25, 0.1]);
    for (const r of rows) {
      expect(r.q1).toBeLessThanOrEqual(r.median);
      expect(r.median).toBeLessThanOrEqual(r.q3);
      expect(r.nSamples).toBeGreaterThan(0);
      expect(Number.isInteger(r.seed)).toBe(true);
    }
  });

  it('rejects a wrong header', () => {
    expect(() => parseResultCsv('a,b,c\n1,2,3')).toThrow(/expected header/);
  });

  it('rejects short rows and bad numbers', () => {
    const header =
      'level,median,q1,q3,min,max,n_samples,achieved_edge_length,seed';
    expect(() => parseResultCsv(`${header}\n1,2,3`)).toThrow(/9 fields/);
    expect(() =>
      parseResultCsv(`${header}\n1,2,x,4,5,6,7,8,9`),
    ).toThrow(/line 2: bad number 'x'/);
  });

  it('rejects an empty file and a header-only file', () => {
    expect(() => parseResultCsv('')).toThrow(/empty file/);
    expect(() =>
      parseResultCsv(
        'level,median,q1,q3,min,max,n_samples,achieved_edge_length,seed',
      ),
    ).toThrow(/no data rows/);
  });
});

describe('parseSeriesCsv', () => {
  it('reads the simulation fixtures', () => {
    for (const name of ['sim_fixed.csv', 'sim_remeshed.csv']) {
      const { samples, status } = parseSeriesCsv(fixture(name), name);
      expect(samples.length).toBeGreaterThan(5);
      expect(status).toBeNull();
      for (let i = 1; i < samples.length; i++) {
        expect(samples[i].time).toBeGreaterThan(samples[i - 1].time);
      }
      for (const s of samples) {
        expect(s.totalArea).toBeGreaterThan(0);
        expect(s.q1).toBeLessThanOrEqual(s.medianAr);
        expect(s.medianAr).toBeLessThanOrEqual(s.q3);
      }
    }
  });

  it('captures the status comment of a diverged run', () => {
    const text =
      'time,total_area,median_ar,q1,q3\n' +
      '0,1,0.9,0.8,0.95\n' +
      '0.5,1.1,0.85,0.7,0.9\n' +
      '# status: diverged time=0.5 node=12\n';
    const { samples, status } = parseSeriesCsv(text);
    expect(samples.length).toBe(2);
    expect(status).toBe('diverged time=0.5 node=12');
  });
});

describe('parseAspectCsv', () => {
  it('reads the aspect-ratio fixture', () => {
    const rows = parseAspectCsv(fixture('aspect_ratios.csv'));
    expect(rows.length).toBe(980);
    const labels = new Set(rows.map((r) => r.mesh));
    expect(labels).toEqual(
      new Set(['old_initial', 'old_current', 'new_initial', 'new_current']),
    );
    for (const r of rows) {
      expect(r.aspectRatio).toBeGreaterThanOrEqual(0);
      expect(r.aspectRatio).toBeLessThanOrEqual(1);
    }
  });

  it('rejects malformed rows', () => {
    expect(() =>
      parseAspectCsv('mesh,element,aspect_ratio\nfoo,0'),
    ).toThrow(/3 fields/);
  });
});
