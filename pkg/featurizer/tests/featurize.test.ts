import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { validateDatasetText } from "../src/dataset.js";
import { featurizeFile, FeaturizeError } from "../src/featurize.js";

function tmpDir(): string {
  return mkdtempSync(join(tmpdir(), "featurize-"));
}

describe("featurizeFile", () => {
  it("featurizes an unlabeled SMILES file into ?-labeled rows", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.smi");
    const outPath = join(dir, "out.dcsim");
    writeFileSync(inPath, "CCO\n");
    const summary = featurizeFile(inPath, outPath);
    expect(summary).toEqual({ parsed: 1, rejected: 0 });
    const text = readFileSync(outPath, "utf-8");
    expect(text.startsWith("#dcsim-dataset v1 m=2048\n?\t")).toBe(true);
    const bits = text.split("\n")[1]!.split("\t")[1]!.split(",");
    expect(bits.length).toBeGreaterThanOrEqual(1);
    expect(bits.length).toBeLessThan(2048 / 4);
  });

  it("is byte-identical across runs", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.csv");
    writeFileSync(inPath, "smiles,label\nCCO,1\nc1ccccc1,0\n");
    const a = join(dir, "a.dcsim");
    const b = join(dir, "b.dcsim");
    featurizeFile(inPath, a);
    featurizeFile(inPath, b);
    expect(readFileSync(a, "utf-8")).toBe(readFileSync(b, "utf-8"));
  });

  it("preserves labels in input order", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.csv");
    writeFileSync(inPath, "smiles,label\nCCO,1\nCC,0\nCN,?\n");
    const outPath = join(dir, "out.dcsim");
    featurizeFile(inPath, outPath);
    const labels = readFileSync(outPath, "utf-8")
      .trim()
      .split("\n")
      .slice(1)
      .map((line) => line.split("\t")[0]);
    expect(labels).toEqual(["1", "0", "?"]);
  });

  it("rejects and logs garbage records while keeping the rest", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.smi");
    writeFileSync(inPath, "CCO\nnot_a_molecule\nCC\n");
    const outPath = join(dir, "out.dcsim");
    const logged: string[] = [];
    const summary = featurizeFile(inPath, outPath, 2048, 2, (m) => logged.push(m));
    expect(summary).toEqual({ parsed: 2, rejected: 1 });
    expect(logged).toHaveLength(1);
    expect(logged[0]).toContain("record 2");
    expect(validateDatasetText(readFileSync(outPath, "utf-8"))).toBe(2);
  });

  it("errors when every record is rejected", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.smi");
    writeFileSync(inPath, "???bad???\n");
    expect(() => featurizeFile(inPath, join(dir, "out.dcsim"))).toThrow(FeaturizeError);
  });

  it("honors custom bit width and radius", () => {
    const dir = tmpDir();
    const inPath = join(dir, "in.smi");
    writeFileSync(inPath, "CC(C)Cc1ccc(cc1)C(C)C(=O)O\n");
    const outPath = join(dir, "out.dcsim");
    featurizeFile(inPath, outPath, 128, 1);
    const text = readFileSync(outPath, "utf-8");
    expect(text.startsWith("#dcsim-dataset v1 m=128\n")).toBe(true);
    expect(validateDatasetText(text)).toBe(1);
  });
});
