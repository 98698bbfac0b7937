/** Map editor document: a mutable grid with an undo stack, a cell palette,
 * live fault highlighting, and schema-valid JSON export. */

import {
  Cell, EMPTY, GridMap, MapError, cellFaults, parseCell, toDict, fromDict,
  validate,
} from "./mapmodel.js";

export const PALETTE: string[] = [
  "EMPTY", "RS-NS", "RS-EW", "RT-NE", "RT-NW", "RT-SE", "RT-SW",
  "IX4", "IX3-N", "IX3-E", "IX3-S", "IX3-W",
  "HOUSE:0", "HOUSE:1", "HOUSE:2", "HOUSE:3", "TREE",
  "OBST-NS", "OBST-EW",
];

interface Edit {
  row: number;
  col: number;
  before: Cell;
  after: Cell;
}

export class EditorDocument {
  map: GridMap;
  private undoStack: Edit[] = [];
  private redoStack: Edit[] = [];

  constructor(width: number, height: number, cellSize = 8.0,
              style = "desert") {
    this.map = {
      version: 1,
      cellSize,
      width,
      height,
      style,
      seed: null,
      cells: Array.from({ length: height }, () =>
        Array.from({ length: width }, () => EMPTY)),
    };
  }

  static fromJson(doc: any): EditorDocument {
    const map = fromDict(doc);
    const ed = new EditorDocument(map.width, map.height, map.cellSize,
                                  map.style);
    ed.map = map;
    return ed;
  }

  place(row: number, col: number, token: string): void {
    if (row < 0 || row >= this.map.height ||
        col < 0 || col >= this.map.width)
      throw new MapError("cell outside the grid", row, col);
    const after = parseCell(token, row, col);
    const before = this.map.cells[row][col];
    this.map.cells[row][col] = after;
    this.undoStack.push({ row, col, before, after });
    this.redoStack.length = 0;
  }

  undo(): boolean {
    const edit = this.undoStack.pop();
    if (!edit) return false;
    this.map.cells[edit.row][edit.col] = edit.before;
    this.redoStack.push(edit);
    return true;
  }

  redo(): boolean {
    const edit = this.redoStack.pop();
    if (!edit) return false;
    this.map.cells[edit.row][edit.col] = edit.after;
    this.undoStack.push(edit);
    return true;
  }

  /** "row,col" -> message, for live invalid-placement highlighting. */
  faults(): Map<string, string> {
    return cellFaults(this.map);
  }

  isValid(): boolean {
    try {
      validate(this.map);
      return true;
    } catch {
      return false;
    }
  }

  /** Export the document as schema-valid JSON text; throws on an invalid
   * map so a broken document can never be downloaded. */
  exportJson(): string {
    validate(this.map);
    return JSON.stringify(toDict(this.map), null, 1);
  }
}
