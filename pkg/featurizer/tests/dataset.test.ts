import { describe, expect, it } from "vitest";

import {
  datasetHeader,
  formatDatasetRow,
  InputFormatError,
  parseInputFile,
  validateDatasetText,
} from "../src/dataset.js";

describe("parseInputFile", () => {
  it("parses plain SMILES lines with optional ids", () => {
    const records = parseInputFile("CCO 42\nCC(=O)O\n");
    expect(records).toEqual([
      { smiles: "CCO", label: null, sourceId: "42" },
      { smiles: "CC(=O)O", label: null, sourceId: null },
    ]);
  });

  it("parses tab-separated fetch-pool output", () => {
    const records = parseInputFile("CCO\t17\n");
    expect(records[0]).toEqual({ smiles: "CCO", label: null, sourceId: "17" });
  });

  it("parses CSV with labels and ids", () => {
    const records = parseInputFile("smiles,label,id\nCCO,1,m1\nCC,0,m2\nCN,?,m3\n");
    expect(records.map((r) => r.label)).toEqual([1, 0, null]);
    expect(records.map((r) => r.sourceId)).toEqual(["m1", "m2", "m3"]);
  });

  it("skips blank lines and comments", () => {
    expect(parseInputFile("\n# note\nCCO\n\n")).toHaveLength(1);
  });

  it("rejects bad CSV labels", () => {
    expect(() => parseInputFile("smiles,label\nCCO,yes\n")).toThrow(InputFormatError);
  });

  it("returns empty for an empty file", () => {
    expect(parseInputFile("")).toEqual([]);
  });
});

describe("dataset writing and validation", () => {
  it("formats rows with the expected tokens", () => {
    expect(formatDatasetRow(1, [0, 5, 9])).toBe("1\t0,5,9");
    expect(formatDatasetRow(null, [])).toBe("?\t");
  });

  it("rejects non-ascending bits", () => {
    expect(() => formatDatasetRow(0, [3, 3])).toThrow();
    expect(() => formatDatasetRow(0, [5, 2])).toThrow();
  });

  it("accepts a well-formed file", () => {
    const text = `${datasetHeader(16)}\n1\t0,7,15\n?\t\n0\t3\n`;
    expect(validateDatasetText(text)).toBe(3);
  });

  it.each([
    ["no header", "1\t0\n"],
    ["bad label", "#dcsim-dataset v1 m=8\n2\t0\n"],
    ["out of range", "#dcsim-dataset v1 m=8\n1\t8\n"],
    ["not ascending", "#dcsim-dataset v1 m=8\n1\t4,2\n"],
    ["missing tab", "#dcsim-dataset v1 m=8\n1 0\n"],
    ["bad token", "#dcsim-dataset v1 m=8\n1\t0,x\n"],
  ])("rejects %s", (_name, text) => {
    expect(() => validateDatasetText(text)).toThrow(InputFormatError);
  });
});
