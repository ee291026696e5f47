import { describe, expect, it } from "vitest";

import { LineBuffer, ServiceClient } from "../src/api.js";
import { actionBlock, conditionAtom, newBlock, serializeProgram } from "../src/blocks.js";
import { buildPalette } from "../src/palette.js";
import { entityLanes, type RecordJson } from "../src/monitor.js";

describe("ndjson line buffer", () => {
  it("splits complete lines and keeps the remainder", () => {
    const buffer = new LineBuffer();
    expect(buffer.push('{"a":1}\n{"b"')).toEqual(['{"a":1}']);
    expect(buffer.push(':2}\n')).toEqual(['{"b":2}']);
  });

  it("handles several lines in one chunk", () => {
    const buffer = new LineBuffer();
    expect(buffer.push("1\n2\n3\n")).toEqual(["1", "2", "3"]);
  });

  it("ignores blank keepalive lines", () => {
    const buffer = new LineBuffer();
    expect(buffer.push("\n\n1\n")).toEqual(["1"]);
  });

  it("holds an unterminated line across pushes", () => {
    const buffer = new LineBuffer();
    expect(buffer.push("part")).toEqual([]);
    expect(buffer.push("ial\n")).toEqual(["partial"]);
  });
});

// Full round trip against a running service. Start one with
//   scenl serve -r demos/registry/env.sensor -r demos/registry/bioloid.entity \
//     -r demos/registry/greta.entity -r demos/registry/nabaztag.entity \
//     --data-dir /tmp/studio-live --port 7333
// and run the suite with SCENL_SERVICE_URL=http://127.0.0.1:7333
const SERVICE_URL = process.env.SCENL_SERVICE_URL;

describe.skipIf(!SERVICE_URL)("live service round trip", () => {
  function composeGreeting() {
    const event = newBlock("event");
    if (event.kind !== "eventwait") throw new Error("unreachable");
    event.cond = conditionAtom("env", "humanHere");
    const parallel = newBlock("parallel");
    if (parallel.kind !== "parallel") throw new Error("unreachable");
    parallel.branches = [
      [actionBlock("bioloid", "sayHello")],
      [actionBlock("greta", "sayHello")],
      [actionBlock("nabaztag", "sayHello")],
    ];
    event.body.push(parallel);
    return [event];
  }

  it("composed text gets zero diagnostics and matches the service canonical", async () => {
    const client = new ServiceClient(SERVICE_URL);
    const text = serializeProgram(composeGreeting());
    const result = await client.check(text);
    expect(result.diagnostics).toEqual([]);
    expect(result.canonical).toBe(text);
  });

  it("palette mirrors the live registry", async () => {
    const client = new ServiceClient(SERVICE_URL);
    const palette = buildPalette(await client.registry());
    expect(palette.conditions.length).toBeGreaterThan(0);
    expect(palette.actions.length).toBeGreaterThan(0);
  });

  it("injecting the visitor event yields three action cards", async () => {
    const client = new ServiceClient(SERVICE_URL);
    const text = serializeProgram(composeGreeting());
    const doc = await client.createScenario(`studio-live-${Date.now()}`, text);
    expect(doc.diagnostics).toEqual([]);
    await client.start(doc.id, "manual");
    try {
      await client.inject("env", "humanHere", 1, 100);
      const snap = await client.snapshot();
      const records = snap.trace_tail as unknown as RecordJson[];
      const lanes = entityLanes(records);
      expect(lanes.map((l) => l.entity).sort()).toEqual(["bioloid", "greta", "nabaztag"]);
      expect(lanes.every((l) => l.cards.length === 1)).toBe(true);
    } finally {
      await client.stop();
      await client.deleteScenario(doc.id);
    }
  });
});
