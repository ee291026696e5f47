"""Seeded random program generator, shaped like parser output.

Every node comes out exactly as the parser would build it: And/Or
chains fold left, a bare call used as an argument is a CallArg rather
than a CondArg(Atom), and Parallel always has at least two branches.
That makes parse(format_program(p)) == p a meaningful round trip.
"""

from __future__ import annotations

import random

from scenl.lang import MAX_NB, ast

TARGETS = ["env", "door", "lamp", "robot", "arm", "cam", "hub", "a", "b2", "c_x"]
FUNCTIONS = ["go", "stop", "ping", "on", "off", "read", "check", "f", "g_h"]
MACROS = ["setup", "sweep", "m1"]


class ProgramGen:
    def __init__(self, seed: int, max_depth: int = 6):
        self.rng = random.Random(seed)
        self.max_depth = max_depth

    # --- names and numbers -------------------------------------------------

    def _number(self) -> int:
        # skew small, but hit the u32 ceiling sometimes
        roll = self.rng.random()
        if roll < 0.7:
            return self.rng.randint(0, 9)
        if roll < 0.95:
            return self.rng.randint(10, 10_000)
        return self.rng.choice([MAX_NB, MAX_NB - 1, 65_536])

    def call(self, depth: int) -> ast.Call:
        n_args = self.rng.choices([0, 1, 2], weights=[6, 3, 1])[0]
        if depth <= 0:
            n_args = min(n_args, 1)
        args = tuple(self.variable(depth - 1) for _ in range(n_args))
        return ast.Call(self.rng.choice(TARGETS), self.rng.choice(FUNCTIONS), args)

    def variable(self, depth: int) -> ast.Variable:
        roll = self.rng.random()
        if depth <= 0 or roll < 0.5:
            return ast.NumberArg(self._number())
        if roll < 0.8:
            return ast.CallArg(self.call(0))
        cond = self.cond(depth)
        if isinstance(cond, ast.Atom):
            # the parser reads a lone call argument as CallArg
            return ast.CallArg(cond.call)
        return ast.CondArg(cond)

    # --- conditions ----------------------------------------------------------

    def primary(self, depth: int) -> ast.Cond:
        roll = self.rng.random()
        if depth <= 0 or roll < 0.6:
            return ast.Atom(self.call(depth))
        if roll < 0.8:
            return ast.Not(self.cond(depth - 1))
        return ast.Group(self.cond(depth - 1))

    def conjunct(self, depth: int) -> ast.Cond:
        node = self.primary(depth)
        for _ in range(self.rng.choices([0, 1, 2], weights=[6, 3, 1])[0]):
            node = ast.And(node, self.primary(depth))
        return node

    def cond(self, depth: int) -> ast.Cond:
        node = self.conjunct(depth)
        for _ in range(self.rng.choices([0, 1, 2], weights=[6, 3, 1])[0]):
            node = ast.Or(node, self.conjunct(depth))
        return node

    # --- instructions ----------------------------------------------------------

    def instr(self, depth: int) -> ast.Instr:
        leaf_kinds = ["action", "action", "interrupt", "timer", "break", "macro"]
        deep_kinds = leaf_kinds + [
            "repeat",
            "while",
            "conditional",
            "eventwait",
            "parallel",
        ] * 2
        kind = self.rng.choice(leaf_kinds if depth <= 0 else deep_kinds)
        if kind == "action":
            return ast.Action(self.call(depth))
        if kind == "interrupt":
            return ast.ActionInterrupt(self.call(depth))
        if kind == "timer":
            return ast.Timer(self._number())
        if kind == "break":
            return ast.Break()
        if kind == "macro":
            return ast.MacroCall(self.rng.choice(MACROS))
        if kind == "repeat":
            return ast.Repeat(self._number(), self.body(depth - 1))
        if kind == "while":
            return ast.While(self.cond(depth - 1), self.body(depth - 1))
        if kind == "conditional":
            else_body = self.body(depth - 1) if self.rng.random() < 0.4 else None
            return ast.Conditional(self.cond(depth - 1), self.body(depth - 1), else_body)
        if kind == "eventwait":
            return ast.EventWait(self.cond(depth - 1), self.body(depth - 1))
        branches = tuple(
            self.body(depth - 1) for _ in range(self.rng.randint(2, 4))
        )
        return ast.Parallel(branches)

    def body(self, depth: int) -> tuple[ast.Instr, ...]:
        return tuple(
            self.instr(depth) for _ in range(self.rng.choices([1, 2, 3], [5, 3, 1])[0])
        )

    def program(self) -> ast.Program:
        return ast.Program(self.body(self.max_depth))


def generate(seed: int, max_depth: int = 6) -> ast.Program:
    return ProgramGen(seed, max_depth).program()
