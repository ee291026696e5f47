// Macro panel behaviors: saving a canvas selection as a named macro and
// dropping macro calls back into programs. Macros persist as scenario
// documents with the macro flag; the service inlines them at run start.

import { Block, problems, serializeProgram } from "./blocks.js";
import type { ServiceClient, ScenarioDoc } from "./api.js";

const IDENT = /^[A-Za-z_][A-Za-z0-9_]*$/;

/** A selection saves only when it is non-empty and structurally whole. */
export function canSaveMacro(selection: Block[]): boolean {
  return selection.length > 0 && problems(selection).length === 0;
}

/** Null when the name is usable, otherwise what to tell the user. */
export function macroNameError(name: string, existing: string[]): string | null {
  if (!IDENT.test(name)) {
    return "macro names are identifiers (letters, digits, underscore)";
  }
  if (existing.includes(name)) {
    return `a macro named ${name} already exists; pick another name`;
  }
  return null;
}

export function macroCallBlock(name: string): Block {
  return { kind: "macro", name };
}

export function saveMacro(
  client: ServiceClient,
  name: string,
  selection: Block[],
): Promise<ScenarioDoc> {
  return client.createScenario(name, serializeProgram(selection), true);
}
