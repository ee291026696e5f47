import { describe, expect, it } from "vitest";

import {
  actionBlock,
  canDrop,
  canSave,
  conditionAtom,
  newBlock,
  problems,
  serializeProgram,
  type Block,
} from "../src/blocks.js";

// Frozen copy of the canonical text the service formatter produces for
// the greeting scenario. tests/data/greeting_canonical.scenl in the
// Python package holds the same bytes (plus the file's trailing newline).
const GREETING_CANONICAL = [
  "<env.humanHere()>(",
  "  /(",
  "    bioloid.sayHello();",
  "  ,",
  "    greta.sayHello();",
  "  ,",
  "    nabaztag.sayHello();",
  "  );",
  ");",
].join("\n");

function composeGreeting(): Block[] {
  // the same gesture sequence the canvas performs: drop an event block,
  // fill its condition, drop a parallel into the body, fill branches
  const event = newBlock("event");
  if (event.kind !== "eventwait") throw new Error("unreachable");
  expect(canDrop("cond", "condition")).toBe(true);
  event.cond = conditionAtom("env", "humanHere");

  const parallel = newBlock("parallel");
  if (parallel.kind !== "parallel") throw new Error("unreachable");
  expect(canDrop("body", "parallel")).toBe(true);
  event.body.push(parallel);

  parallel.branches = [
    [actionBlock("bioloid", "sayHello")],
    [actionBlock("greta", "sayHello")],
    [actionBlock("nabaztag", "sayHello")],
  ];
  return [event];
}

describe("greeting composition", () => {
  it("serializes to the canonical text byte for byte", () => {
    expect(serializeProgram(composeGreeting())).toBe(GREETING_CANONICAL);
  });

  it("is a saveable tree", () => {
    const blocks = composeGreeting();
    expect(problems(blocks)).toEqual([]);
    expect(canSave(blocks)).toBe(true);
  });
});

describe("drop rules", () => {
  it("rejects action blocks in condition slots", () => {
    expect(canDrop("cond", "action")).toBe(false);
  });

  it("rejects structure blocks in condition slots", () => {
    for (const kind of ["repeat", "while", "parallel", "wait", "break", "macro"] as const) {
      expect(canDrop("cond", kind)).toBe(false);
    }
  });

  it("rejects condition atoms in body slots", () => {
    expect(canDrop("body", "condition")).toBe(false);
  });

  it("accepts every instruction kind in body slots", () => {
    for (const kind of [
      "action",
      "repeat",
      "while",
      "conditional",
      "event",
      "parallel",
      "wait",
      "break",
      "macro",
    ] as const) {
      expect(canDrop("body", kind)).toBe(true);
    }
  });
});

describe("serialization layout", () => {
  it("renders plain and interruptible actions", () => {
    const plain = actionBlock("robot", "move", [{ kind: "number", value: 40 }]);
    expect(serializeProgram([plain])).toBe("robot.move(40);");
    const interrupt: Block = { ...plain, interrupt: true } as Block;
    expect(serializeProgram([interrupt])).toBe("°robot.move(40)°;");
  });

  it("renders timers, breaks, and macro calls", () => {
    expect(serializeProgram([{ kind: "timer", duration: 5 }])).toBe("WAIT(5);");
    expect(serializeProgram([{ kind: "break" }])).toBe("BREAK;");
    expect(serializeProgram([{ kind: "macro", name: "greetAll" }])).toBe("@greetAll;");
  });

  it("indents repeat bodies by two spaces", () => {
    const block: Block = {
      kind: "repeat",
      count: 3,
      body: [actionBlock("a", "f")],
    };
    expect(serializeProgram([block])).toBe("3*(\n  a.f();\n);");
  });

  it("renders while with its condition in brackets", () => {
    const block: Block = {
      kind: "while",
      cond: { kind: "not", inner: conditionAtom("symbolic", "done") },
      body: [actionBlock("a", "f")],
    };
    expect(serializeProgram([block])).toBe("*[!(symbolic.done())](\n  a.f();\n);");
  });

  it("renders conditionals with and without else", () => {
    const bare: Block = {
      kind: "conditional",
      cond: conditionAtom("env", "dark"),
      thenBody: [actionBlock("lamp", "on")],
      elseBody: null,
    };
    expect(serializeProgram([bare])).toBe("[env.dark()](\n  lamp.on();\n);");
    const full: Block = { ...bare, elseBody: [actionBlock("lamp", "off")] } as Block;
    expect(serializeProgram([full])).toBe(
      "[env.dark()](\n  lamp.on();\n)!(\n  lamp.off();\n);",
    );
  });

  it("spaces condition operators the canonical way", () => {
    const block: Block = {
      kind: "while",
      cond: {
        kind: "or",
        left: {
          kind: "and",
          left: conditionAtom("env", "a"),
          right: conditionAtom("env", "b"),
        },
        right: {
          kind: "group",
          inner: conditionAtom("env", "c"),
        },
      },
      body: [actionBlock("a", "f")],
    };
    expect(serializeProgram([block])).toBe(
      "*[env.a() & env.b() | (env.c())](\n  a.f();\n);",
    );
  });

  it("nests deep structures with one indent step per level", () => {
    const inner: Block = {
      kind: "repeat",
      count: 2,
      body: [actionBlock("a", "f")],
    };
    const outer: Block = {
      kind: "eventwait",
      cond: conditionAtom("env", "go"),
      body: [inner],
    };
    expect(serializeProgram([outer])).toBe(
      "<env.go()>(\n  2*(\n    a.f();\n  );\n);",
    );
  });
});

describe("empty and broken canvases", () => {
  it("empty canvas serializes to nothing and cannot save", () => {
    expect(serializeProgram([])).toBe("");
    expect(canSave([])).toBe(false);
  });

  it("flags an event block with no condition", () => {
    const block = newBlock("event");
    if (block.kind !== "eventwait") throw new Error("unreachable");
    block.body.push(actionBlock("a", "f"));
    const found = problems([block]);
    expect(found.some((p) => p.message.includes("condition"))).toBe(true);
    expect(canSave([block])).toBe(false);
  });

  it("flags empty bodies and short parallels at the offending block", () => {
    const parallel = newBlock("parallel");
    if (parallel.kind !== "parallel") throw new Error("unreachable");
    parallel.branches = [[actionBlock("a", "f")]];
    const found = problems([parallel]);
    expect(found.map((p) => p.key)).toContain("0");
    expect(found.some((p) => p.message.includes("two branches"))).toBe(true);
  });

  it("keys nested problems through their slot", () => {
    const repeat = newBlock("repeat");
    if (repeat.kind !== "repeat") throw new Error("unreachable");
    const wait = newBlock("event");
    if (wait.kind !== "eventwait") throw new Error("unreachable");
    wait.body.push(actionBlock("a", "f"));
    repeat.body.push(wait);
    const found = problems([repeat]);
    expect(found).toHaveLength(1);
    expect(found[0]?.key).toBe("0:body.0");
  });

  it("keys problems in later parallel branches distinctly", () => {
    const parallel = newBlock("parallel");
    if (parallel.kind !== "parallel") throw new Error("unreachable");
    const broken = newBlock("event"); // missing cond and body
    parallel.branches = [[actionBlock("a", "f")], [broken]];
    const keys = problems([parallel]).map((p) => p.key);
    expect(keys).toContain("0:1.0");
    expect(keys).not.toContain("0:0.0");
  });

  it("rejects out-of-range repeat counts", () => {
    const repeat = newBlock("repeat");
    if (repeat.kind !== "repeat") throw new Error("unreachable");
    repeat.count = 0x100000000;
    repeat.body.push(actionBlock("a", "f"));
    expect(problems([repeat]).some((p) => p.message.includes("repeat"))).toBe(true);
  });
});
