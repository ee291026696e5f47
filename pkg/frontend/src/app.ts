// Single-page studio: block palette on the left, canvas and generated
// text in the middle, run monitor on the right. All grammar knowledge
// stays server-side; every edit round-trips through /check.
//
// The canvas re-renders wholesale after each mutation. Blocks are edited
// through closures over their actual parent arrays, so drops, removals,
// and condition fills land on the right slot no matter how deep or which
// parallel branch they sit in.

import {
  ServiceClient,
  openStream,
  type CheckResult,
  type ScenarioMeta,
} from "./api.js";
import {
  Block,
  CondNode,
  PaletteKind,
  actionBlock,
  canDrop,
  canSave,
  childKey,
  conditionAtom,
  newBlock,
  problems,
  serializeProgram,
  slotKey,
} from "./blocks.js";
import { buildPalette, type PaletteModel } from "./palette.js";
import { canSaveMacro, macroCallBlock, macroNameError, saveMacro } from "./macros.js";
import {
  MonitorState,
  RecordJson,
  applyRecord,
  applySnapshot,
  canInject,
  describeRecord,
  entityLanes,
  initialMonitor,
  setConnected,
} from "./monitor.js";

const client = new ServiceClient("");

interface DragPayload {
  kind: PaletteKind;
  entity?: string;
  fn?: string;
  sensor?: string;
  event?: string;
  macro?: string;
}

let palette: PaletteModel = { conditions: [], actions: [], structure: [], macros: [] };
let canvas: Block[] = [];
let selection = new Set<number>();
let scenarios: ScenarioMeta[] = [];
let currentCheck: CheckResult | null = null;
let monitor: MonitorState = initialMonitor();
let checkTimer: ReturnType<typeof setTimeout> | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el;
}

// --- drops ----------------------------------------------------------------------

function blockFromPayload(payload: DragPayload): Block {
  if (payload.kind === "action") {
    return actionBlock(payload.entity ?? "", payload.fn ?? "");
  }
  if (payload.kind === "macro") {
    return macroCallBlock(payload.macro ?? "");
  }
  if (payload.kind === "condition") {
    throw new Error("conditions drop into condition slots only");
  }
  return newBlock(payload.kind);
}

// Repeated drops chain with AND; the mode toggle below the canvas flips
// the next combine to OR or NOT.
let combineMode: "and" | "or" | "not" = "and";

function combineCond(current: CondNode | null, atom: CondNode): CondNode {
  const next = combineMode === "not" ? ({ kind: "not", inner: atom } as CondNode) : atom;
  if (current === null) {
    return next;
  }
  if (combineMode === "or") {
    return { kind: "or", left: current, right: next };
  }
  return { kind: "and", left: current, right: next };
}

function readPayload(ev: DragEvent): DragPayload | null {
  const raw = ev.dataTransfer?.getData("application/json");
  return raw ? (JSON.parse(raw) as DragPayload) : null;
}

// --- rendering -------------------------------------------------------------------

function paletteItem(label: string, payload: DragPayload): HTMLElement {
  const el = document.createElement("div");
  el.className = "palette-item";
  el.textContent = label;
  el.draggable = true;
  el.addEventListener("dragstart", (ev) => {
    ev.dataTransfer?.setData("application/json", JSON.stringify(payload));
  });
  return el;
}

function renderPalette(): void {
  $("panel-conditions").replaceChildren(
    ...palette.conditions.map((c) =>
      paletteItem(`${c.sensor}.${c.event}`, {
        kind: "condition",
        sensor: c.sensor,
        event: c.event,
      }),
    ),
  );
  $("panel-actions").replaceChildren(
    ...palette.actions.map((a) =>
      paletteItem(`${a.entity}.${a.fn}()`, { kind: "action", entity: a.entity, fn: a.fn }),
    ),
  );
  $("panel-structure").replaceChildren(
    ...palette.structure.map((s) => paletteItem(s.label, { kind: s.kind })),
  );
  $("panel-macros").replaceChildren(
    ...palette.macros.map((m) => paletteItem(`@${m}`, { kind: "macro", macro: m })),
  );
}

/** A body slot: drops append to the given list. */
function dropZone(list: Block[], hint: string): HTMLElement {
  const zone = document.createElement("div");
  zone.className = "drop-zone";
  zone.textContent = hint;
  zone.addEventListener("dragover", (ev) => {
    ev.preventDefault();
    zone.classList.add("over");
  });
  zone.addEventListener("dragleave", () => zone.classList.remove("over"));
  zone.addEventListener("drop", (ev) => {
    ev.preventDefault();
    ev.stopPropagation();
    zone.classList.remove("over");
    const payload = readPayload(ev);
    if (payload && canDrop("body", payload.kind)) {
      list.push(blockFromPayload(payload));
      rerender();
    }
  });
  return zone;
}

/** A condition slot: drops combine into the owning block's cond. */
function condSlot(owner: { cond: CondNode | null }): HTMLElement {
  const slot = document.createElement("span");
  slot.className = owner.cond ? "cond-slot filled" : "cond-slot";
  slot.textContent = owner.cond ? renderCondText(owner.cond) : "drop a condition";
  slot.addEventListener("dragover", (ev) => ev.preventDefault());
  slot.addEventListener("drop", (ev) => {
    ev.preventDefault();
    ev.stopPropagation();
    const payload = readPayload(ev);
    if (payload && canDrop("cond", payload.kind)) {
      owner.cond = combineCond(
        owner.cond,
        conditionAtom(payload.sensor ?? "", payload.event ?? ""),
      );
      rerender();
    }
  });
  const clear = document.createElement("button");
  clear.className = "remove";
  clear.textContent = "clear";
  clear.addEventListener("click", () => {
    owner.cond = null;
    rerender();
  });
  if (owner.cond) {
    const wrap = document.createElement("span");
    wrap.append(slot, clear);
    return wrap;
  }
  return slot;
}

function renderCondText(cond: CondNode): string {
  switch (cond.kind) {
    case "atom":
      return `${cond.call.target}.${cond.call.fn}()`;
    case "not":
      return `!(${renderCondText(cond.inner)})`;
    case "group":
      return `(${renderCondText(cond.inner)})`;
    case "and":
      return `${renderCondText(cond.left)} & ${renderCondText(cond.right)}`;
    case "or":
      return `${renderCondText(cond.left)} | ${renderCondText(cond.right)}`;
  }
}

function numberField(value: number, apply: (n: number) => void): HTMLElement {
  const input = document.createElement("input");
  input.type = "number";
  input.min = "0";
  input.value = String(value);
  input.addEventListener("change", () => {
    apply(Number(input.value));
    rerender();
  });
  return input;
}

function bodyContainer(list: Block[], prefix: string, flagged: Set<string>): HTMLElement {
  const holder = document.createElement("div");
  holder.className = "body";
  list.forEach((child, i) => {
    holder.appendChild(renderBlock(child, list, i, childKey(prefix, i), flagged));
  });
  holder.appendChild(dropZone(list, "drop blocks here"));
  return holder;
}

function renderBlock(
  block: Block,
  parentList: Block[],
  index: number,
  key: string,
  flagged: Set<string>,
): HTMLElement {
  const el = document.createElement("div");
  el.className = `block block-${block.kind}`;
  if (flagged.has(key)) {
    el.classList.add("flagged");
  }
  const topLevel = parentList === canvas;
  if (topLevel && selection.has(index)) {
    el.classList.add("selected");
  }
  const head = document.createElement("div");
  head.className = "block-head";
  el.appendChild(head);

  const remove = document.createElement("button");
  remove.className = "remove";
  remove.textContent = "x";
  remove.addEventListener("click", (ev) => {
    ev.stopPropagation();
    parentList.splice(index, 1);
    if (topLevel) {
      selection = new Set();
    }
    rerender();
  });

  switch (block.kind) {
    case "action": {
      head.append(`${block.call.target}.${block.call.fn}()`);
      const toggle = document.createElement("label");
      toggle.className = "interrupt-toggle";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = block.interrupt;
      box.addEventListener("change", () => {
        block.interrupt = box.checked;
        rerender();
      });
      toggle.append(box, "interruptible");
      head.appendChild(toggle);
      break;
    }
    case "timer":
      head.append("wait ");
      head.appendChild(numberField(block.duration, (n) => (block.duration = n)));
      head.append(" ticks");
      break;
    case "break":
      head.append("break");
      break;
    case "macro":
      head.append(`@${block.name}`);
      break;
    case "repeat":
      head.append("repeat ");
      head.appendChild(numberField(block.count, (n) => (block.count = n)));
      head.append(" times");
      el.appendChild(bodyContainer(block.body, slotKey(key, "body"), flagged));
      break;
    case "while":
      head.append("while ");
      head.appendChild(condSlot(block));
      el.appendChild(bodyContainer(block.body, slotKey(key, "body"), flagged));
      break;
    case "conditional": {
      head.append("if ");
      head.appendChild(condSlot(block));
      el.appendChild(bodyContainer(block.thenBody, slotKey(key, "then"), flagged));
      if (block.elseBody === null) {
        const addElse = document.createElement("button");
        addElse.textContent = "add else";
        addElse.addEventListener("click", () => {
          block.elseBody = [];
          rerender();
        });
        el.appendChild(addElse);
      } else {
        const label = document.createElement("div");
        label.className = "else-label";
        label.textContent = "else";
        el.appendChild(label);
        el.appendChild(bodyContainer(block.elseBody, slotKey(key, "else"), flagged));
      }
      break;
    }
    case "eventwait":
      head.append("on ");
      head.appendChild(condSlot(block));
      el.appendChild(bodyContainer(block.body, slotKey(key, "body"), flagged));
      break;
    case "parallel": {
      head.append("in parallel");
      block.branches.forEach((branch, b) => {
        if (b > 0) {
          const sep = document.createElement("div");
          sep.className = "branch-sep";
          el.appendChild(sep);
        }
        el.appendChild(bodyContainer(branch, slotKey(key, String(b)), flagged));
      });
      const addBranch = document.createElement("button");
      addBranch.textContent = "add branch";
      addBranch.addEventListener("click", () => {
        block.branches.push([]);
        rerender();
      });
      el.appendChild(addBranch);
      break;
    }
  }
  head.appendChild(remove);
  if (topLevel) {
    head.addEventListener("click", () => {
      if (selection.has(index)) {
        selection.delete(index);
      } else {
        selection.add(index);
      }
      rerender();
    });
  }
  return el;
}

function renderCanvas(): void {
  const flagged = new Set(problems(canvas).map((p) => p.key));
  const root = $("canvas");
  root.replaceChildren();
  canvas.forEach((block, i) => {
    root.appendChild(renderBlock(block, canvas, i, String(i), flagged));
  });
  root.appendChild(dropZone(canvas, "drop blocks to build the scenario"));
}

function renderText(): void {
  const text = serializeProgram(canvas);
  ($("generated") as HTMLTextAreaElement).value = text;
  ($("save-scenario") as HTMLButtonElement).disabled = !canSave(canvas);
  ($("save-macro") as HTMLButtonElement).disabled = !(
    selectionContiguous() && canSaveMacro(selectedBlocks())
  );

  if (checkTimer) {
    clearTimeout(checkTimer);
  }
  if (text.length === 0) {
    currentCheck = null;
    renderDiagnostics();
    return;
  }
  checkTimer = setTimeout(() => {
    client
      .check(text)
      .then((result) => {
        currentCheck = result;
        renderDiagnostics();
      })
      .catch(() => {
        // service unreachable; the monitor lamp already shows it
      });
  }, 250);
}

function renderDiagnostics(): void {
  const list = $("diagnostics");
  list.replaceChildren();
  for (const d of currentCheck?.diagnostics ?? []) {
    const item = document.createElement("li");
    item.className = d.severity;
    item.textContent = `${d.severity}[${d.code}] ${d.message}`;
    list.appendChild(item);
  }
}

function selectionContiguous(): boolean {
  if (selection.size === 0) {
    return false;
  }
  const sorted = [...selection].sort((a, b) => a - b);
  const first = sorted[0] ?? 0;
  return sorted.every((v, i) => v === first + i);
}

function selectedBlocks(): Block[] {
  return [...selection]
    .sort((a, b) => a - b)
    .flatMap((i) => {
      const block = canvas[i];
      return block ? [block] : [];
    });
}

// --- monitor -------------------------------------------------------------------

function renderMonitor(): void {
  $("run-status").textContent = monitor.status;
  $("run-clock").textContent = monitor.clock === null ? "-" : String(monitor.clock);
  $("stream-lamp").className = monitor.connected ? "lamp on" : "lamp off";

  const lanes = $("lanes");
  lanes.replaceChildren();
  for (const lane of entityLanes(monitor.records)) {
    const column = document.createElement("div");
    column.className = "lane";
    const title = document.createElement("h4");
    title.textContent = lane.entity;
    column.appendChild(title);
    for (const card of lane.cards) {
      const div = document.createElement("div");
      div.className = `card card-${card.type.toLowerCase()}`;
      div.textContent =
        card.type === "OUT"
          ? `T=${card.tick} ${card.fn}(${card.arg ?? ""})`
          : `T=${card.tick} ${card.type} ${card.fn}`;
      column.appendChild(div);
    }
    lanes.appendChild(column);
  }

  const trace = $("trace");
  trace.textContent = monitor.records.map(describeRecord).join("\n");
  trace.scrollTop = trace.scrollHeight;

  const enabled = canInject(monitor.status);
  ($("inject-btn") as HTMLButtonElement).disabled = !enabled;
  ($("tick-btn") as HTMLButtonElement).disabled = !enabled;
}

function refreshSnapshot(): void {
  client
    .snapshot()
    .then((snap) => {
      monitor = applySnapshot(monitor, snap);
      renderMonitor();
    })
    .catch(() => undefined);
}

// --- top bar -------------------------------------------------------------------

function refreshScenarios(): Promise<void> {
  return client.scenarios().then(({ scenarios: list }) => {
    scenarios = list;
    const select = $("scenario-list") as HTMLSelectElement;
    const current = select.value;
    select.replaceChildren(new Option("-- scenarios --", ""));
    for (const s of scenarios.filter((s) => !s.macro)) {
      select.appendChild(new Option(`${s.name} [${s.status}]`, s.id));
    }
    select.value = current;
  });
}

function wireTopBar(): void {
  $("save-scenario").addEventListener("click", () => {
    const name = ($("scenario-name") as HTMLInputElement).value.trim() || "untitled";
    client
      .createScenario(name, serializeProgram(canvas))
      .then(() => refreshScenarios())
      .catch((err) => alert(String(err)));
  });

  $("save-macro").addEventListener("click", () => {
    const name = prompt("macro name") ?? "";
    const error = macroNameError(name, palette.macros);
    if (error) {
      alert(error);
      return;
    }
    saveMacro(client, name, selectedBlocks())
      .then(() => client.registry())
      .then((reg) => {
        palette = buildPalette(reg);
        renderPalette();
      })
      .catch((err) => alert(String(err)));
  });

  $("start-btn").addEventListener("click", () => {
    const id = ($("scenario-list") as HTMLSelectElement).value;
    if (!id) {
      alert("pick a scenario first");
      return;
    }
    const mode = ($("mode-select") as HTMLSelectElement).value as "manual" | "live";
    client
      .start(id, mode)
      .then(() => {
        monitor = initialMonitor();
        refreshSnapshot();
        refreshScenarios().catch(() => undefined);
      })
      .catch((err) => alert(String(err)));
  });

  $("stop-btn").addEventListener("click", () => {
    client.stop().then(refreshSnapshot).catch(() => undefined);
  });

  $("tick-btn").addEventListener("click", () => {
    client.tick(1).then(refreshSnapshot).catch(() => undefined);
  });

  $("inject-btn").addEventListener("click", () => {
    const channel = ($("inject-channel") as HTMLSelectElement).value;
    const [sensor, event] = channel.split(".");
    const rawValue = ($("inject-value") as HTMLInputElement).value;
    const likelihood = Number(($("inject-likelihood") as HTMLInputElement).value) || 100;
    const item = palette.conditions.find((c) => c.sensor === sensor && c.event === event);
    const value =
      item?.type === "none" || rawValue === ""
        ? null
        : item?.type === "integer"
          ? Number(rawValue)
          : rawValue;
    client
      .inject(sensor ?? "", event ?? "", value, likelihood)
      .then(refreshSnapshot)
      .catch((err) => alert(String(err)));
  });

  for (const mode of ["and", "or", "not"] as const) {
    $(`combine-${mode}`).addEventListener("click", () => {
      combineMode = mode;
      for (const m of ["and", "or", "not"]) {
        $(`combine-${m}`).classList.toggle("active", m === mode);
      }
    });
  }
}

function fillInjectChannels(): void {
  const select = $("inject-channel") as HTMLSelectElement;
  select.replaceChildren(
    ...palette.conditions.map(
      (c) => new Option(`${c.sensor}.${c.event}`, `${c.sensor}.${c.event}`),
    ),
  );
}

// --- boot ----------------------------------------------------------------------

function rerender(): void {
  renderCanvas();
  renderText();
  renderMonitor();
}

export function boot(): void {
  wireTopBar();
  client
    .registry()
    .then((reg) => {
      palette = buildPalette(reg);
      renderPalette();
      fillInjectChannels();
      rerender();
    })
    .catch((err) => {
      $("diagnostics").textContent = `cannot reach the service: ${err}`;
    });

  openStream("", {
    onRecord: (record) => {
      monitor = applyRecord(monitor, record as unknown as RecordJson);
      renderMonitor();
    },
    onOpen: () => {
      monitor = setConnected(monitor, true);
      refreshSnapshot();
    },
    onDown: () => {
      monitor = setConnected(monitor, false);
      renderMonitor();
    },
  });

  refreshScenarios().catch(() => undefined);
}

boot();
