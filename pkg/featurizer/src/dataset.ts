// Reading SMILES inputs and writing/validating the dcsim dataset format:
//
//   #dcsim-dataset v1 m=<bits>
//   <label>\t<comma separated ascending set-bit indices>
//
// where <label> is 0, 1, or ? for unlabeled, and a row with no set bits has
// an empty bit field.

export interface SmilesRecord {
  smiles: string;
  label: 0 | 1 | null;
  sourceId: string | null;
}

export class InputFormatError extends Error {}

/**
 * Parses a SMILES input file. Two shapes are accepted:
 *  - plain `.smi`-style lines: `SMILES[<whitespace>id]`
 *  - CSV with a header naming a `smiles` column and optional `label` /
 *    `cid` / `id` columns.
 * Blank lines and `#` comments are skipped.
 */
export function parseInputFile(text: string): SmilesRecord[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== "" && !l.startsWith("#"));
  if (lines.length === 0) return [];

  const header = lines[0]!.toLowerCase();
  if (header.includes(",") && header.split(",").some((c) => c.trim() === "smiles")) {
    return parseCsv(lines);
  }
  return lines.map((line, i) => {
    const parts = line.trim().split(/\s+/);
    if (parts.length === 0 || parts[0] === "") {
      throw new InputFormatError(`line ${i + 1}: no SMILES field`);
    }
    return { smiles: parts[0]!, label: null, sourceId: parts[1] ?? null };
  });
}

function parseCsv(lines: string[]): SmilesRecord[] {
  const header = lines[0]!.split(",").map((c) => c.trim().toLowerCase());
  const smilesCol = header.indexOf("smiles");
  const labelCol = header.indexOf("label");
  const idCol = header.findIndex((c) => c === "cid" || c === "id");

  const records: SmilesRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",").map((c) => c.trim());
    const smiles = cells[smilesCol];
    if (!smiles) {
      throw new InputFormatError(`line ${i + 1}: missing SMILES cell`);
    }
    let label: 0 | 1 | null = null;
    if (labelCol >= 0 && cells[labelCol] !== undefined && cells[labelCol] !== "") {
      const raw = cells[labelCol]!;
      if (raw !== "0" && raw !== "1" && raw !== "?") {
        throw new InputFormatError(`line ${i + 1}: label must be 0, 1, or ?, got '${raw}'`);
      }
      label = raw === "?" ? null : (Number(raw) as 0 | 1);
    }
    records.push({
      smiles,
      label,
      sourceId: idCol >= 0 ? cells[idCol] ?? null : null,
    });
  }
  return records;
}

export function formatDatasetRow(label: 0 | 1 | null, bits: number[]): string {
  for (let i = 1; i < bits.length; i++) {
    if (bits[i]! <= bits[i - 1]!) {
      throw new Error("bit indices must be strictly ascending");
    }
  }
  const labelToken = label === null ? "?" : String(label);
  return `${labelToken}\t${bits.join(",")}`;
}

export function datasetHeader(nBits: number): string {
  return `#dcsim-dataset v1 m=${nBits}`;
}

/**
 * Validates a full dataset file; throws with a line reference on the first
 * violation. Returns the number of data rows.
 */
export function validateDatasetText(text: string): number {
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  const headerMatch = lines[0]?.match(/^#dcsim-dataset v1 m=(\d+)$/);
  if (!headerMatch) {
    throw new InputFormatError(`line 1: bad header '${lines[0] ?? ""}'`);
  }
  const m = Number(headerMatch[1]);
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i]!;
    const tab = line.indexOf("\t");
    if (tab < 0) throw new InputFormatError(`line ${i + 1}: missing tab separator`);
    const label = line.slice(0, tab);
    if (label !== "0" && label !== "1" && label !== "?") {
      throw new InputFormatError(`line ${i + 1}: bad label '${label}'`);
    }
    const bitsField = line.slice(tab + 1);
    if (bitsField === "") continue; // all-zero row
    let previous = -1;
    for (const token of bitsField.split(",")) {
      if (!/^\d+$/.test(token)) {
        throw new InputFormatError(`line ${i + 1}: bad bit index '${token}'`);
      }
      const idx = Number(token);
      if (idx <= previous) {
        throw new InputFormatError(`line ${i + 1}: bit indices not ascending`);
      }
      if (idx >= m) {
        throw new InputFormatError(`line ${i + 1}: bit index ${idx} out of range (m=${m})`);
      }
      previous = idx;
    }
  }
  return lines.length - 1;
}
