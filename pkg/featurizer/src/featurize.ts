// featurize_file: SMILES input -> dcsim dataset file of Morgan fingerprints.

import { readFileSync, writeFileSync } from "node:fs";

import { datasetHeader, formatDatasetRow, parseInputFile } from "./dataset.js";
import { morganBits } from "./morgan.js";
import { parseSmiles, SmilesError } from "./smiles.js";

export interface FeaturizeSummary {
  parsed: number;
  rejected: number;
}

export class FeaturizeError extends Error {}

/**
 * Featurizes every record of a SMILES/CSV input file into the dataset
 * format. Unparseable SMILES are rejected and logged (never silently
 * dropped); an input where every record is rejected is an error. Output is
 * a pure function of the input bytes and parameters.
 */
export function featurizeFile(
  inPath: string,
  outPath: string,
  nBits = 2048,
  radius = 2,
  log: (message: string) => void = (m) => console.error(m),
): FeaturizeSummary {
  const records = parseInputFile(readFileSync(inPath, "utf-8"));
  const rows: string[] = [datasetHeader(nBits)];
  let rejected = 0;
  for (let i = 0; i < records.length; i++) {
    const record = records[i]!;
    try {
      const bits = morganBits(parseSmiles(record.smiles), radius, nBits);
      rows.push(formatDatasetRow(record.label, bits));
    } catch (err) {
      if (err instanceof SmilesError) {
        rejected += 1;
        const id = record.sourceId ? ` (id ${record.sourceId})` : "";
        log(`rejected record ${i + 1}${id}: ${err.message}`);
      } else {
        throw err;
      }
    }
  }
  const parsed = rows.length - 1;
  if (parsed === 0) {
    throw new FeaturizeError(
      `no record of ${records.length} in ${inPath} could be featurized`,
    );
  }
  writeFileSync(outPath, rows.join("\n") + "\n", "utf-8");
  return { parsed, rejected };
}
