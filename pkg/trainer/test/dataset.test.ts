import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { bucketByLength, makeRng, parseDataset, shuffled } from "../src/dataset";
import { contactHidden, contactLayers, syntheticHidden, syntheticLayers } from "../src/model";

const FIXTURES = path.join(__dirname, "fixtures");

function tempFile(content: string): string {
  const file = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "ds-")), "d.tsv");
  fs.writeFileSync(file, content);
  return file;
}

describe("dataset parsing", () => {
  it("reads the parity fixture", () => {
    const data = parseDataset(path.join(FIXTURES, "parity_train.tsv"));
    expect(data.alphabet).toEqual(["a"]);
    expect(data.words.length).toBe(600);
    for (let i = 0; i < data.words.length; i++) {
      expect(data.labels[i]).toBe(data.words[i].length % 2);
    }
  });

  it("handles the empty word", () => {
    const data = parseDataset(tempFile("0\t\n1\ta\n"));
    expect(data.words[0]).toEqual([]);
    expect(data.words[1]).toEqual([0]);
  });

  it("rejects bad labels", () => {
    expect(() => parseDataset(tempFile("2\ta\n"))).toThrow(/bad label/);
  });

  it("rejects letters outside a fixed alphabet", () => {
    expect(() => parseDataset(tempFile("1\tz\n"), ["a", "b"])).toThrow(/not in alphabet/);
  });

  it("buckets by length", () => {
    const buckets = bucketByLength([[0], [0, 0], [1], []]);
    expect([...buckets.get(1)!]).toEqual([0, 2]);
    expect(buckets.get(0)).toEqual([3]);
  });

  it("seeded shuffle is deterministic", () => {
    const items = [1, 2, 3, 4, 5, 6, 7];
    expect(shuffled(items, makeRng(9))).toEqual(shuffled(items, makeRng(9)));
    expect(shuffled(items, makeRng(9))).not.toEqual(items);
  });
});

describe("sizing formulas", () => {
  it("synthetic: 30-state instance gets hidden 600 and 4 layers", () => {
    expect(syntheticHidden(30)).toBe(600);
    expect(syntheticLayers(30)).toBe(4);
  });

  it("contact: small networks are floored at hidden 100, 2 layers", () => {
    expect(contactHidden(4)).toBe(100);
    expect(contactLayers(4)).toBe(2);
    expect(contactHidden(250)).toBe(250);
    expect(contactLayers(250)).toBe(4);
  });
});
