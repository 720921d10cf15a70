// PubChem PUG-REST client for bulk SMILES-by-CID download with polite rate
// limiting and resumable output. The HTTP transport is injectable so tests
// run fully offline.

import { readFileSync, appendFileSync, existsSync } from "node:fs";

export type HttpGet = (url: string) => Promise<{ status: number; body: string }>;

export interface FetchPoolOptions {
  cidStart: number;
  cidEnd: number;
  outPath: string;
  requestsPerSecond?: number;
  batchSize?: number;
  httpGet?: HttpGet;
  log?: (message: string) => void;
}

export interface FetchPoolSummary {
  requested: number;
  fetched: number;
  skipped: number;
  unresolved: number;
}

const BASE_URL = "https://pubchem.ncbi.nlm.nih.gov/rest/pug/compound/cid";

const defaultHttpGet: HttpGet = async (url) => {
  const response = await fetch(url);
  return { status: response.status, body: await response.text() };
};

export class RateLimiter {
  private nextSlot = 0;
  private readonly interval: number;

  constructor(requestsPerSecond: number) {
    if (requestsPerSecond <= 0) {
      throw new Error("requestsPerSecond must be positive");
    }
    this.interval = 1000 / requestsPerSecond;
  }

  /** Resolves when the caller may issue its next request. */
  async acquire(now: () => number = Date.now, sleep = defaultSleep): Promise<void> {
    const current = now();
    const slot = Math.max(this.nextSlot, current);
    this.nextSlot = slot + this.interval;
    if (slot > current) {
      await sleep(slot - current);
    }
  }
}

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** CIDs already present in a partial output file (for resumption). */
export function existingCids(outPath: string): Set<number> {
  if (!existsSync(outPath)) return new Set();
  const seen = new Set<number>();
  for (const line of readFileSync(outPath, "utf-8").split("\n")) {
    const cid = Number(line.split("\t")[1]);
    if (Number.isFinite(cid) && cid > 0) seen.add(cid);
  }
  return seen;
}

/**
 * Downloads SMILES for a CID range into a tab-separated `smiles\tcid` file.
 *
 * Already-present CIDs are skipped, so an interrupted run can simply be
 * re-invoked. Unresolvable CIDs (PubChem 404) are counted, not fatal; any
 * other transport failure aborts with the partial output retained.
 */
export async function fetchPool(options: FetchPoolOptions): Promise<FetchPoolSummary> {
  const {
    cidStart,
    cidEnd,
    outPath,
    requestsPerSecond = 5,
    batchSize = 100,
    httpGet = defaultHttpGet,
    log = () => {},
  } = options;
  if (!Number.isInteger(cidStart) || !Number.isInteger(cidEnd) || cidStart < 1 || cidStart > cidEnd) {
    throw new Error(`invalid CID range ${cidStart}..${cidEnd}`);
  }

  const done = existingCids(outPath);
  const pending: number[] = [];
  for (let cid = cidStart; cid <= cidEnd; cid++) {
    if (!done.has(cid)) pending.push(cid);
  }
  const summary: FetchPoolSummary = {
    requested: cidEnd - cidStart + 1,
    fetched: 0,
    skipped: done.size,
    unresolved: 0,
  };

  const limiter = new RateLimiter(requestsPerSecond);
  for (let i = 0; i < pending.length; i += batchSize) {
    const batch = pending.slice(i, i + batchSize);
    await limiter.acquire();
    const url = `${BASE_URL}/${batch.join(",")}/property/CanonicalSMILES/CSV`;
    const { status, body } = await httpGet(url);
    if (status === 404) {
      // None of the batch resolves.
      summary.unresolved += batch.length;
      continue;
    }
    if (status !== 200) {
      throw new Error(`PubChem request failed with HTTP ${status}; partial output kept`);
    }
    const resolved = new Map<number, string>();
    for (const line of body.split("\n").slice(1)) {
      const match = line.match(/^(\d+),"?([^",]+)"?\s*$/);
      if (match) resolved.set(Number(match[1]), match[2]!);
    }
    const rows: string[] = [];
    for (const cid of batch) {
      const smiles = resolved.get(cid);
      if (smiles === undefined) {
        summary.unresolved += 1;
      } else {
        rows.push(`${smiles}\t${cid}`);
        summary.fetched += 1;
      }
    }
    if (rows.length > 0) {
      appendFileSync(outPath, rows.join("\n") + "\n", "utf-8");
    }
    log(`fetched ${summary.fetched}/${pending.length} (unresolved ${summary.unresolved})`);
  }
  if (summary.fetched === 0 && summary.skipped === 0) {
    log(`warning: no CID in ${cidStart}..${cidEnd} resolved`);
  }
  return summary;
}
