// Block tree model for the canvas, plus serialization to scenario text.
//
// The editor never parses scenario text itself; the service is the only
// grammar implementation. The one hard requirement here is the reverse
// direction: serializeProgram must emit exactly the canonical layout the
// service's check endpoint returns, byte for byte (two-space indent, one
// instruction per line, parallel separators alone at the parent indent,
// single spaces around & and |). If the two ever drift the fidelity test
// against the frozen golden text catches it.

export const MAX_NB = 0xffffffff;

export interface CallNode {
  target: string;
  fn: string;
  args: ArgNode[];
}

export type ArgNode =
  | { kind: "number"; value: number }
  | { kind: "call"; call: CallNode }
  | { kind: "cond"; cond: CondNode };

export type CondNode =
  | { kind: "atom"; call: CallNode }
  | { kind: "not"; inner: CondNode }
  | { kind: "group"; inner: CondNode }
  | { kind: "and"; left: CondNode; right: CondNode }
  | { kind: "or"; left: CondNode; right: CondNode };

export type Block =
  | { kind: "action"; call: CallNode; interrupt: boolean }
  | { kind: "timer"; duration: number }
  | { kind: "break" }
  | { kind: "macro"; name: string }
  | { kind: "repeat"; count: number; body: Block[] }
  | { kind: "while"; cond: CondNode | null; body: Block[] }
  | {
      kind: "conditional";
      cond: CondNode | null;
      thenBody: Block[];
      elseBody: Block[] | null;
    }
  | { kind: "eventwait"; cond: CondNode | null; body: Block[] }
  | { kind: "parallel"; branches: Block[][] };

/** What the palette hands to a drop. */
export type PaletteKind =
  | "action"
  | "condition"
  | "macro"
  | "repeat"
  | "while"
  | "conditional"
  | "event"
  | "parallel"
  | "wait"
  | "break";

export type SlotKind = "body" | "cond";

/** Body slots take instruction blocks, cond slots take condition atoms. */
export function canDrop(slot: SlotKind, item: PaletteKind): boolean {
  if (slot === "cond") {
    return item === "condition";
  }
  return item !== "condition";
}

/** A freshly dropped block with empty slots to fill in. */
export function newBlock(kind: Exclude<PaletteKind, "condition">): Block {
  switch (kind) {
    case "action":
      return { kind: "action", call: { target: "", fn: "", args: [] }, interrupt: false };
    case "macro":
      return { kind: "macro", name: "" };
    case "repeat":
      return { kind: "repeat", count: 1, body: [] };
    case "while":
      return { kind: "while", cond: null, body: [] };
    case "conditional":
      return { kind: "conditional", cond: null, thenBody: [], elseBody: null };
    case "event":
      return { kind: "eventwait", cond: null, body: [] };
    case "parallel":
      return { kind: "parallel", branches: [[], []] };
    case "wait":
      return { kind: "timer", duration: 1 };
    case "break":
      return { kind: "break" };
  }
}

export function actionBlock(entity: string, fn: string, args: ArgNode[] = []): Block {
  return { kind: "action", call: { target: entity, fn, args }, interrupt: false };
}

export function conditionAtom(sensor: string, event: string, args: ArgNode[] = []): CondNode {
  return { kind: "atom", call: { target: sensor, fn: event, args } };
}

// --- structural problems ----------------------------------------------------

export interface BlockProblem {
  /**
   * Where the offending block sits: child indices joined with ".",
   * descending through a named slot as ":slot" (":body", ":then",
   * ":else", ":0".. for parallel branches). "1:then.0" is the first
   * block of the then branch of the second canvas block. The canvas
   * renderer builds identical keys, so flags land on the right block
   * even in later parallel branches.
   */
  key: string;
  message: string;
}

const IDENT = /^[A-Za-z_][A-Za-z0-9_]*$/;

function condComplete(cond: CondNode): boolean {
  switch (cond.kind) {
    case "atom":
      return IDENT.test(cond.call.target) && IDENT.test(cond.call.fn);
    case "not":
    case "group":
      return condComplete(cond.inner);
    case "and":
    case "or":
      return condComplete(cond.left) && condComplete(cond.right);
  }
}

function countOk(n: number): boolean {
  return Number.isInteger(n) && n >= 0 && n <= MAX_NB;
}

/** Key for child i of the list a slot prefix addresses. */
export function childKey(prefix: string, index: number): string {
  return prefix === "" ? String(index) : `${prefix}.${index}`;
}

/** Slot prefix for descending out of the block at key. */
export function slotKey(key: string, slot: string): string {
  return `${key}:${slot}`;
}

/**
 * Everything that would make the serialized text fail to parse: empty
 * bodies, unfilled condition slots, out-of-range counts, unnamed calls.
 * The canvas paints these red; save stays disabled while any exist.
 */
export function problems(blocks: Block[], prefix = ""): BlockProblem[] {
  const found: BlockProblem[] = [];
  blocks.forEach((block, i) => {
    const key = childKey(prefix, i);
    const body = (slot: string, label: string, inner: Block[]) => {
      if (inner.length === 0) {
        found.push({ key, message: `${label} needs at least one block` });
      } else {
        found.push(...problems(inner, slotKey(key, slot)));
      }
    };
    switch (block.kind) {
      case "action":
        if (!IDENT.test(block.call.target) || !IDENT.test(block.call.fn)) {
          found.push({ key, message: "action needs an entity function" });
        }
        break;
      case "macro":
        if (!IDENT.test(block.name)) {
          found.push({ key, message: "macro block needs a name" });
        }
        break;
      case "timer":
        if (!countOk(block.duration)) {
          found.push({ key, message: `wait takes 0..${MAX_NB} ticks` });
        }
        break;
      case "break":
        break;
      case "repeat":
        if (!countOk(block.count)) {
          found.push({ key, message: `repeat takes 0..${MAX_NB}` });
        }
        body("body", "repeat body", block.body);
        break;
      case "while":
        if (block.cond === null || !condComplete(block.cond)) {
          found.push({ key, message: "while needs a condition" });
        }
        body("body", "while body", block.body);
        break;
      case "conditional":
        if (block.cond === null || !condComplete(block.cond)) {
          found.push({ key, message: "conditional needs a condition" });
        }
        body("then", "then branch", block.thenBody);
        if (block.elseBody !== null) {
          body("else", "else branch", block.elseBody);
        }
        break;
      case "eventwait":
        if (block.cond === null || !condComplete(block.cond)) {
          found.push({ key, message: "event block needs a condition" });
        }
        body("body", "event body", block.body);
        break;
      case "parallel":
        if (block.branches.length < 2) {
          found.push({ key, message: "parallel needs at least two branches" });
        }
        block.branches.forEach((branch, b) => {
          body(String(b), `branch ${b + 1}`, branch);
        });
        break;
    }
  });
  return found;
}

/** Empty canvas saves nothing; broken trees save nothing. */
export function canSave(blocks: Block[]): boolean {
  return blocks.length > 0 && problems(blocks).length === 0;
}

// --- serialization -----------------------------------------------------------

export function serializeCall(call: CallNode): string {
  const args = call.args.map(serializeArg).join(", ");
  return `${call.target}.${call.fn}(${args})`;
}

export function serializeArg(arg: ArgNode): string {
  switch (arg.kind) {
    case "number":
      return String(arg.value);
    case "call":
      return serializeCall(arg.call);
    case "cond":
      return serializeCond(arg.cond);
  }
}

export function serializeCond(cond: CondNode | null): string {
  if (cond === null) {
    return "";
  }
  switch (cond.kind) {
    case "atom":
      return serializeCall(cond.call);
    case "not":
      return `!(${serializeCond(cond.inner)})`;
    case "group":
      return `(${serializeCond(cond.inner)})`;
    case "and":
      return `${serializeCond(cond.left)} & ${serializeCond(cond.right)}`;
    case "or":
      return `${serializeCond(cond.left)} | ${serializeCond(cond.right)}`;
  }
}

function emit(block: Block, depth: number, lines: string[]): void {
  const pad = "  ".repeat(depth);
  switch (block.kind) {
    case "action":
      if (block.interrupt) {
        lines.push(`${pad}°${serializeCall(block.call)}°;`);
      } else {
        lines.push(`${pad}${serializeCall(block.call)};`);
      }
      break;
    case "timer":
      lines.push(`${pad}WAIT(${block.duration});`);
      break;
    case "break":
      lines.push(`${pad}BREAK;`);
      break;
    case "macro":
      lines.push(`${pad}@${block.name};`);
      break;
    case "repeat":
      lines.push(`${pad}${block.count}*(`);
      emitBody(block.body, depth + 1, lines);
      lines.push(`${pad});`);
      break;
    case "while":
      lines.push(`${pad}*[${serializeCond(block.cond)}](`);
      emitBody(block.body, depth + 1, lines);
      lines.push(`${pad});`);
      break;
    case "conditional":
      lines.push(`${pad}[${serializeCond(block.cond)}](`);
      emitBody(block.thenBody, depth + 1, lines);
      if (block.elseBody === null) {
        lines.push(`${pad});`);
      } else {
        lines.push(`${pad})!(`);
        emitBody(block.elseBody, depth + 1, lines);
        lines.push(`${pad});`);
      }
      break;
    case "eventwait":
      lines.push(`${pad}<${serializeCond(block.cond)}>(`);
      emitBody(block.body, depth + 1, lines);
      lines.push(`${pad});`);
      break;
    case "parallel":
      lines.push(`${pad}/(`);
      block.branches.forEach((branch, i) => {
        if (i > 0) {
          lines.push(`${pad},`);
        }
        emitBody(branch, depth + 1, lines);
      });
      lines.push(`${pad});`);
      break;
  }
}

function emitBody(body: Block[], depth: number, lines: string[]): void {
  for (const block of body) {
    emit(block, depth, lines);
  }
}

/** Canonical text for the whole canvas. No trailing newline. */
export function serializeProgram(blocks: Block[]): string {
  const lines: string[] = [];
  for (const block of blocks) {
    emit(block, 0, lines);
  }
  return lines.join("\n");
}
