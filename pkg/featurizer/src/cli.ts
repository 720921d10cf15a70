#!/usr/bin/env node
// CLI: `featurize` (SMILES -> dataset file) and `fetch-pool` (PubChem CID
// range -> SMILES file). Exit codes: 0 success, 1 runtime failure, 2 usage.

import { parseArgs } from "node:util";

import { featurizeFile } from "./featurize.js";
import { fetchPool } from "./pubchem.js";

function usage(): never {
  console.error(
    [
      "usage:",
      "  featurizer featurize --in F --out F2 [--bits 2048] [--radius 2]",
      "  featurizer fetch-pool --start N --end M --out F [--rps 5]",
    ].join("\n"),
  );
  process.exit(2);
}

async function main(argv: string[]): Promise<number> {
  const command = argv[0];
  const rest = argv.slice(1);
  if (command === "featurize") {
    const { values } = parseArgs({
      args: rest,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        bits: { type: "string", default: "2048" },
        radius: { type: "string", default: "2" },
      },
    });
    if (!values.in || !values.out) usage();
    const summary = featurizeFile(
      values.in,
      values.out,
      Number(values.bits),
      Number(values.radius),
    );
    console.log(
      `featurized ${summary.parsed} records (${summary.rejected} rejected) -> ${values.out}`,
    );
    return 0;
  }
  if (command === "fetch-pool") {
    const { values } = parseArgs({
      args: rest,
      options: {
        start: { type: "string" },
        end: { type: "string" },
        out: { type: "string" },
        rps: { type: "string", default: "5" },
      },
    });
    if (!values.start || !values.end || !values.out) usage();
    const summary = await fetchPool({
      cidStart: Number(values.start),
      cidEnd: Number(values.end),
      outPath: values.out,
      requestsPerSecond: Number(values.rps),
      log: (m) => console.error(m),
    });
    console.log(
      `fetched ${summary.fetched}, skipped ${summary.skipped} existing, ` +
        `${summary.unresolved} unresolved -> ${values.out}`,
    );
    return 0;
  }
  usage();
}

main(process.argv.slice(2)).then(
  (code) => process.exit(code),
  (err) => {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  },
);
