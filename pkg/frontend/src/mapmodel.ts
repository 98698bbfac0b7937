/** Block-grid map schema and validation, behaviorally identical to the
 * simulator's loader: same tokens, same structural rules, same error
 * positions (row/col). Row 0 is the south edge, column 0 the west edge. */

export const MAP_FORMAT_VERSION = 1;
export const STYLES = ["desert", "urban"] as const;
export const HOUSE_VARIANTS = [0, 1, 2, 3];

export type Dir = "N" | "E" | "S" | "W";
export const DIRS: Dir[] = ["N", "E", "S", "W"];
export const OPPOSITE: Record<Dir, Dir> = { N: "S", S: "N", E: "W", W: "E" };
/** (drow, dcol) per direction; rows grow northward. */
export const DIR_STEP: Record<Dir, [number, number]> = {
  N: [1, 0], S: [-1, 0], E: [0, 1], W: [0, -1],
};

export type CellKind =
  | "empty" | "straight" | "turn" | "ix4" | "ix3"
  | "house" | "tree" | "obstacle";

export interface Cell {
  kind: CellKind;
  axis?: "NS" | "EW";
  corner?: "NE" | "NW" | "SE" | "SW";
  openSide?: Dir;
  variant?: number;
  laneBlocking?: boolean;
}

export const EMPTY: Cell = { kind: "empty" };

export class MapError extends Error {
  constructor(message: string, public row: number | null = null,
              public col: number | null = null) {
    super(row !== null ? `${message} (row ${row}, col ${col})` : message);
  }
}

export function isRoad(cell: Cell): boolean {
  return ["straight", "turn", "ix4", "ix3", "obstacle"].includes(cell.kind);
}

export function connectors(cell: Cell): Set<Dir> {
  switch (cell.kind) {
    case "straight":
    case "obstacle":
      return new Set(cell.axis === "NS" ? ["N", "S"] : ["E", "W"]);
    case "turn":
      return new Set(cell.corner!.split("") as Dir[]);
    case "ix4":
      return new Set(DIRS);
    case "ix3":
      return new Set(DIRS.filter((d) => d !== cell.openSide));
    default:
      return new Set();
  }
}

export function parseCell(token: string, row: number | null = null,
                          col: number | null = null): Cell {
  if (token === "EMPTY") return EMPTY;
  if (token === "TREE") return { kind: "tree" };
  if (token === "IX4") return { kind: "ix4" };
  if (token.startsWith("RS-")) {
    const axis = token.slice(3);
    if (axis !== "NS" && axis !== "EW")
      throw new MapError(`bad straight axis ${JSON.stringify(token)}`, row, col);
    return { kind: "straight", axis };
  }
  if (token.startsWith("RT-")) {
    const corner = token.slice(3);
    if (!["NE", "NW", "SE", "SW"].includes(corner))
      throw new MapError(`bad turn corner ${JSON.stringify(token)}`, row, col);
    return { kind: "turn", corner: corner as Cell["corner"] };
  }
  if (token.startsWith("IX3-")) {
    const side = token.slice(4);
    if (!DIRS.includes(side as Dir))
      throw new MapError(`bad 3-way open side ${JSON.stringify(token)}`, row, col);
    return { kind: "ix3", openSide: side as Dir };
  }
  if (token.startsWith("HOUSE:")) {
    const variant = Number(token.slice(6));
    if (!HOUSE_VARIANTS.includes(variant))
      throw new MapError(`unknown house variant ${JSON.stringify(token)}`, row, col);
    return { kind: "house", variant };
  }
  if (token.startsWith("OBST-")) {
    let rest = token.slice(5);
    let laneBlocking = true;
    if (rest.endsWith("-NB")) {
      laneBlocking = false;
      rest = rest.slice(0, -3);
    }
    if (rest !== "NS" && rest !== "EW")
      throw new MapError(`bad obstacle axis ${JSON.stringify(token)}`, row, col);
    return { kind: "obstacle", axis: rest, laneBlocking };
  }
  throw new MapError(`unknown cell token ${JSON.stringify(token)}`, row, col);
}

export function cellToken(cell: Cell): string {
  switch (cell.kind) {
    case "empty": return "EMPTY";
    case "tree": return "TREE";
    case "ix4": return "IX4";
    case "straight": return `RS-${cell.axis}`;
    case "turn": return `RT-${cell.corner}`;
    case "ix3": return `IX3-${cell.openSide}`;
    case "house": return `HOUSE:${cell.variant}`;
    case "obstacle":
      return `OBST-${cell.axis}${cell.laneBlocking === false ? "-NB" : ""}`;
  }
}

export interface GridMap {
  version: number;
  cellSize: number;
  width: number;
  height: number;
  style: string;
  seed: number | null;
  cells: Cell[][]; // [row][col]
}

export function fromDict(doc: any): GridMap {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc))
    throw new MapError("map document must be a JSON object");
  if (doc.version !== MAP_FORMAT_VERSION)
    throw new MapError(`unsupported map format version ${doc.version}`);
  const width = doc.width, height = doc.height;
  if (!Number.isInteger(width) || !Number.isInteger(height) ||
      width <= 0 || height <= 0)
    throw new MapError("width/height must be positive integers");
  if (!Array.isArray(doc.cells) || doc.cells.length !== height)
    throw new MapError(`cells must have ${height} rows`);
  const cells: Cell[][] = [];
  for (let r = 0; r < height; r++) {
    const rowTokens = doc.cells[r];
    if (!Array.isArray(rowTokens) || rowTokens.length !== width)
      throw new MapError(`row must have ${width} cells`, r, null);
    cells.push(rowTokens.map((tok: string, c: number) => parseCell(tok, r, c)));
  }
  const m: GridMap = {
    version: doc.version,
    cellSize: doc.cell_size,
    width, height,
    style: doc.environment_style,
    seed: doc.seed ?? null,
    cells,
  };
  validate(m);
  return m;
}

export function toDict(m: GridMap): any {
  return {
    version: m.version,
    cell_size: m.cellSize,
    width: m.width,
    height: m.height,
    environment_style: m.style,
    seed: m.seed,
    cells: m.cells.map((row) => row.map(cellToken)),
  };
}

function neighbor(m: GridMap, r: number, c: number, d: Dir): [number, number] {
  const [dr, dc] = DIR_STEP[d];
  return [r + dr, c + dc];
}

function cellAt(m: GridMap, r: number, c: number): Cell {
  if (r < 0 || r >= m.height || c < 0 || c >= m.width) return EMPTY;
  return m.cells[r][c];
}

/** Per-cell structural faults, for live editor highlighting. Empty result
 * plus a connected network (checked by validate) means the map is valid. */
export function cellFaults(m: GridMap): Map<string, string> {
  const faults = new Map<string, string>();
  for (let r = 0; r < m.height; r++) {
    for (let c = 0; c < m.width; c++) {
      const cell = m.cells[r][c];
      if (!isRoad(cell)) continue;
      for (const d of connectors(cell)) {
        const [nr, nc] = neighbor(m, r, c, d);
        const nb = cellAt(m, nr, nc);
        if (!isRoad(nb) || !connectors(nb).has(OPPOSITE[d])) {
          faults.set(`${r},${c}`, `dangling road connector ${d}`);
        }
      }
      if (cell.kind === "obstacle" && cell.axis !== "NS" && cell.axis !== "EW")
        faults.set(`${r},${c}`, "obstacle without axis");
    }
  }
  return faults;
}

export function validate(m: GridMap): void {
  if (!STYLES.includes(m.style as any))
    throw new MapError(`unknown style ${JSON.stringify(m.style)}`);
  const roads: [number, number][] = [];
  for (let r = 0; r < m.height; r++)
    for (let c = 0; c < m.width; c++)
      if (isRoad(m.cells[r][c])) roads.push([r, c]);
  if (roads.length === 0) throw new MapError("map contains no road cells");
  const faults = cellFaults(m);
  if (faults.size > 0) {
    const [key, msg] = faults.entries().next().value as [string, string];
    const [r, c] = key.split(",").map(Number);
    throw new MapError(msg, r, c);
  }
  // single connected network (flood fill over connectors)
  const seen = new Set<string>([`${roads[0][0]},${roads[0][1]}`]);
  const stack = [roads[0]];
  while (stack.length > 0) {
    const [r, c] = stack.pop()!;
    for (const d of connectors(m.cells[r][c])) {
      const [nr, nc] = neighbor(m, r, c, d);
      const key = `${nr},${nc}`;
      if (!seen.has(key)) {
        seen.add(key);
        stack.push([nr, nc]);
      }
    }
  }
  if (seen.size !== roads.length) {
    const [r, c] = roads.find(([r, c]) => !seen.has(`${r},${c}`))!;
    throw new MapError("road network is not connected", r, c);
  }
}

export interface Verdict {
  valid: boolean;
  error?: string;
  row?: number | null;
  col?: number | null;
}

/** Validation verdict for an arbitrary parsed JSON document. */
export function verdict(doc: any): Verdict {
  try {
    fromDict(doc);
    return { valid: true };
  } catch (e) {
    if (e instanceof MapError)
      return { valid: false, error: e.message, row: e.row, col: e.col };
    return { valid: false, error: String(e) };
  }
}
