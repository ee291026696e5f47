import { describe, expect, it } from "vitest";

import { STRUCTURE_PANEL, buildPalette, type RegistryJson } from "../src/palette.js";

const REGISTRY: RegistryJson = {
  sensors: [
    { sensor: "env", events: [{ name: "humanHere", type: "integer" }] },
    {
      sensor: "thermometer",
      events: [
        { name: "temperature", type: "integer" },
        { name: "battery", type: "integer" },
      ],
    },
  ],
  entities: [
    {
      entity: "bioloid",
      functions: [
        { name: "sayHello", kind: "procedure", arity: 0 },
        { name: "walk", kind: "procedure", arity: 1 },
      ],
    },
    { entity: "greta", functions: [{ name: "sayHello", kind: "procedure", arity: 0 }] },
  ],
  macros: ["greetAll"],
  threshold: 50,
};

describe("palette", () => {
  it("lists every sensor event pair exactly once", () => {
    const palette = buildPalette(REGISTRY);
    const pairs = palette.conditions.map((c) => `${c.sensor}.${c.event}`);
    expect(pairs).toEqual([
      "env.humanHere",
      "thermometer.temperature",
      "thermometer.battery",
    ]);
    expect(new Set(pairs).size).toBe(pairs.length);
  });

  it("lists every entity function pair exactly once", () => {
    const palette = buildPalette(REGISTRY);
    const pairs = palette.actions.map((a) => `${a.entity}.${a.fn}`);
    expect(pairs).toEqual(["bioloid.sayHello", "bioloid.walk", "greta.sayHello"]);
    expect(new Set(pairs).size).toBe(pairs.length);
  });

  it("carries arity through for the argument editor", () => {
    const palette = buildPalette(REGISTRY);
    expect(palette.actions.find((a) => a.fn === "walk")?.arity).toBe(1);
  });

  it("keeps the structure panel static regardless of registry", () => {
    const palette = buildPalette(REGISTRY);
    expect(palette.structure).toBe(STRUCTURE_PANEL);
    expect(palette.structure.map((s) => s.kind)).toEqual([
      "repeat",
      "while",
      "conditional",
      "event",
      "parallel",
      "wait",
      "break",
    ]);
  });

  it("mirrors the macros list", () => {
    expect(buildPalette(REGISTRY).macros).toEqual(["greetAll"]);
    expect(
      buildPalette({ ...REGISTRY, macros: [] }).macros,
    ).toEqual([]);
  });
});
