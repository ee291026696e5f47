// Palette panels derived from the service registry. The conditions and
// actions panels mirror whatever the service declares; the structure
// panel never changes.

import type { PaletteKind } from "./blocks.js";

export interface RegistryJson {
  sensors: { sensor: string; events: { name: string; type: string }[] }[];
  entities: {
    entity: string;
    functions: { name: string; kind: string; arity: number }[];
  }[];
  macros: string[];
  threshold: number;
}

export interface ConditionItem {
  sensor: string;
  event: string;
  type: string;
}

export interface ActionItem {
  entity: string;
  fn: string;
  arity: number;
}

export interface PaletteModel {
  conditions: ConditionItem[];
  actions: ActionItem[];
  structure: readonly StructureItem[];
  macros: string[];
}

export interface StructureItem {
  kind: Exclude<PaletteKind, "action" | "condition" | "macro">;
  label: string;
}

export const STRUCTURE_PANEL: readonly StructureItem[] = [
  { kind: "repeat", label: "repeat n times" },
  { kind: "while", label: "while condition" },
  { kind: "conditional", label: "if / else" },
  { kind: "event", label: "on event" },
  { kind: "parallel", label: "in parallel" },
  { kind: "wait", label: "wait ticks" },
  { kind: "break", label: "break" },
];

export function buildPalette(registry: RegistryJson): PaletteModel {
  const conditions: ConditionItem[] = [];
  for (const sensor of registry.sensors) {
    for (const event of sensor.events) {
      conditions.push({ sensor: sensor.sensor, event: event.name, type: event.type });
    }
  }
  const actions: ActionItem[] = [];
  for (const entity of registry.entities) {
    for (const fn of entity.functions) {
      actions.push({ entity: entity.entity, fn: fn.name, arity: fn.arity });
    }
  }
  return {
    conditions,
    actions,
    structure: STRUCTURE_PANEL,
    macros: [...registry.macros],
  };
}
