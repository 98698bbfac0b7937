import { describe, expect, it } from "vitest";

import {
  MapError, cellToken, connectors, fromDict, parseCell, toDict, verdict,
} from "../src/mapmodel.js";

function ringDoc(): any {
  return {
    version: 1,
    cell_size: 8.0,
    width: 4,
    height: 4,
    environment_style: "desert",
    seed: null,
    cells: [
      ["RT-NE", "RS-EW", "RS-EW", "RT-NW"],
      ["RS-NS", "EMPTY", "EMPTY", "RS-NS"],
      ["RS-NS", "EMPTY", "EMPTY", "RS-NS"],
      ["RT-SE", "RS-EW", "RS-EW", "RT-SW"],
    ],
  };
}

describe("cell tokens", () => {
  it("round-trips every palette token", () => {
    for (const tok of ["EMPTY", "RS-NS", "RS-EW", "RT-NE", "RT-SW", "IX4",
                       "IX3-N", "HOUSE:2", "TREE", "OBST-NS",
                       "OBST-EW-NB"]) {
      expect(cellToken(parseCell(tok))).toBe(tok);
    }
  });

  it("rejects unknown tokens with the cell position", () => {
    expect(() => parseCell("XYZZY", 3, 1)).toThrowError(/row 3, col 1/);
    expect(() => parseCell("HOUSE:9")).toThrowError(MapError);
    expect(() => parseCell("RT-XX")).toThrowError(MapError);
  });

  it("derives connectors from geometry", () => {
    expect(connectors(parseCell("RS-NS"))).toEqual(new Set(["N", "S"]));
    expect(connectors(parseCell("RT-NE"))).toEqual(new Set(["N", "E"]));
    expect(connectors(parseCell("IX3-W"))).toEqual(new Set(["N", "E", "S"]));
    expect(connectors(parseCell("EMPTY"))).toEqual(new Set());
  });
});

describe("document validation", () => {
  it("accepts a closed ring and round-trips it", () => {
    const m = fromDict(ringDoc());
    expect(m.width).toBe(4);
    expect(toDict(m)).toEqual(ringDoc());
  });

  it("rejects a dangling stub with its coordinates", () => {
    const doc = ringDoc();
    doc.cells[1][1] = "RS-EW"; // opens E/W against empty neighbors
    const v = verdict(doc);
    expect(v.valid).toBe(false);
    expect(v.error).toMatch(/dangling/);
    expect(v.row).toBe(1);
    expect(v.col).toBe(1);
  });

  it("rejects disconnected networks", () => {
    const doc = ringDoc();
    doc.width = 8;
    for (const row of doc.cells) row.push(...row.map(() => "EMPTY"));
    // a second loop that is internally consistent but unreachable
    // (row 0 is the south edge, so it uses north-opening corners)
    doc.cells[0][5] = "RT-NE";
    doc.cells[0][6] = "RT-NW";
    doc.cells[1][5] = "RS-NS";
    doc.cells[1][6] = "RS-NS";
    doc.cells[2][5] = "RS-NS";
    doc.cells[2][6] = "RS-NS";
    doc.cells[3][5] = "RT-SE";
    doc.cells[3][6] = "RT-SW";
    const v = verdict(doc);
    expect(v.valid).toBe(false);
    expect(v.error).toMatch(/not connected/);
  });

  it("rejects wrong version, bad shape, empty maps", () => {
    expect(verdict({ ...ringDoc(), version: 99 }).valid).toBe(false);
    const short = ringDoc();
    short.cells.pop();
    expect(verdict(short).valid).toBe(false);
    const empty = ringDoc();
    empty.cells = empty.cells.map((r: string[]) => r.map(() => "EMPTY"));
    expect(verdict(empty).error).toMatch(/no road cells/);
    expect(verdict({ ...ringDoc(), environment_style: "moon" }).valid)
      .toBe(false);
    expect(verdict(null).valid).toBe(false);
    expect(verdict([1, 2]).valid).toBe(false);
  });
});
