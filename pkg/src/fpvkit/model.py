"""Finite-state models: explicit Kripke structures and small synchronous FSMs.

Both forms compile to the same explicit representation: a list of
states, each a total assignment of the declared variables, a nonempty
set of initial states, and a total successor relation.  Integer
variables are bounded and exposed bit by bit (``cnt[0]``, ``cnt[1]``)
for toggle accounting; comparisons read them as whole numbers.
"""
from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterable

from .formula import (
    AND, ATOM, CMP, FALSE, IMPLIES, NOT, OR, PAST, STABLE, TRUE, Formula, Term,
    is_state_formula, signals,
)

MAX_FSM_STATES = 1 << 16


class ModelError(ValueError):
    pass


class UndeclaredSignal(ModelError):
    pass


@dataclass(frozen=True)
class VarSpec:
    name: str
    width: int = 1
    is_int: bool = False
    max: int | None = None
    is_input: bool = False

    @property
    def domain(self) -> range:
        if not self.is_int:
            return range(2)
        hi = (1 << self.width) - 1 if self.max is None else self.max
        return range(hi + 1)

    @property
    def bits(self) -> list[str]:
        if not self.is_int:
            return [self.name]
        return [f"{self.name}[{i}]" for i in range(self.width)]


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic path: ``stem`` followed by ``loop`` forever."""

    stem: tuple[int, ...]
    loop: tuple[int, ...]

    @property
    def loop_start(self) -> int:
        return len(self.stem)

    @property
    def states(self) -> tuple[int, ...]:
        return self.stem + self.loop

    def normalized(self) -> "Lasso":
        """Same infinite path with the shortest period and the shortest stem."""
        loop = self.loop
        n = len(loop)
        for p in range(1, n + 1):
            if n % p == 0 and loop == loop[:p] * (n // p):
                loop = loop[:p]
                break
        stem = self.stem
        while stem and stem[-1] == loop[-1]:
            loop = (stem[-1],) + loop[:-1]
            stem = stem[:-1]
        return Lasso(stem, loop)

    def validate(self, model: "Model") -> None:
        if not self.loop:
            raise ModelError("lasso loop is empty")
        seq = self.states
        if seq[0] not in model.init_set:
            raise ModelError(f"lasso starts in non-initial state {seq[0]}")
        for a, b in zip(seq, seq[1:] + (self.loop[0],)):
            if b not in model.succ_sets[a]:
                raise ModelError(f"lasso step {a} -> {b} is not a transition")


_SIGNAL_RE = re.compile(r"^(?:\$past\((?P<pv>[^()\[\]]+)\)|(?P<v>[^\[\]]+))(?:\[(?P<bit>\d+)\])?$")


@dataclass(frozen=True, eq=False)
class Model:
    name: str
    variables: tuple[VarSpec, ...]
    valuations: tuple[tuple[int, ...], ...]
    init: tuple[int, ...]
    succ: tuple[tuple[int, ...], ...]
    deps: frozenset[tuple[str, str]] = frozenset()
    state_names: tuple[str, ...] = ()
    fsm: dict | None = field(default=None, repr=False)
    # augmented state -> state of the model it was derived from
    origin: tuple[int, ...] | None = field(default=None, repr=False)
    base: "Model | None" = field(default=None, repr=False)

    def __post_init__(self):
        if not self.state_names:
            object.__setattr__(self, "state_names", tuple(f"s{i}" for i in range(len(self.valuations))))
        object.__setattr__(self, "_cache", {})
        self._validate()

    def _validate(self) -> None:
        n = len(self.valuations)
        if n == 0:
            raise ModelError("model has no states")
        if not self.init:
            raise ModelError("model has no initial state")
        names = {v.name for v in self.variables}
        for i, val in enumerate(self.valuations):
            if len(val) != len(self.variables):
                raise ModelError(f"state {self.state_names[i]} does not assign every variable")
        for s in self.init:
            if not 0 <= s < n:
                raise ModelError(f"initial state {s} out of range")
        for s, nxt in enumerate(self.succ):
            if not nxt:
                raise ModelError(f"non-total transition relation: state {self.state_names[s]} has no successor")
            if any(not 0 <= t < n for t in nxt):
                raise ModelError(f"transition out of range from state {self.state_names[s]}")
        if len(self.succ) != n:
            raise ModelError("successor table does not cover every state")
        for a, b in self.deps:
            if a not in names or b not in names:
                raise ModelError(f"dependency {a} -> {b} references an undeclared variable")

    # -- basic views
    @property
    def num_states(self) -> int:
        return len(self.valuations)

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    @cached_property
    def var_specs(self) -> dict[str, VarSpec]:
        return {v.name: v for v in self.variables}

    @cached_property
    def source_variables(self) -> list[str]:
        """Declared design variables, without previous-value shadows."""
        return [v.name for v in self.variables if not v.name.startswith("$past(")]

    @cached_property
    def bits(self) -> list[str]:
        return [b for v in self.variables for b in v.bits]

    @cached_property
    def init_set(self) -> frozenset[int]:
        return frozenset(self.init)

    @cached_property
    def succ_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(s) for s in self.succ)

    def value(self, state: int, signal: str) -> int:
        var, bit = self.resolve(signal)
        v = self.valuations[state][self.var_index[var]]
        return v if bit is None else (v >> bit) & 1

    def labels(self, state: int) -> frozenset[str]:
        """Bits that are true in *state*."""
        out = []
        val = self.valuations[state]
        for spec, v in zip(self.variables, val):
            if not spec.is_int:
                if v:
                    out.append(spec.name)
            else:
                out.extend(b for i, b in enumerate(spec.bits) if (v >> i) & 1)
        return frozenset(out)

    def resolve(self, signal: str, past: bool = False) -> tuple[str, int | None]:
        """Map a signal reference to ``(variable, bit)``; raises on unknown names."""
        m = _SIGNAL_RE.match(signal)
        if m is None:
            raise UndeclaredSignal(f"undeclared signal {signal!r}")
        base = m.group("pv") or m.group("v")
        if m.group("pv") or past:
            base = f"$past({base})"
        bit = m.group("bit")
        spec = self.var_specs.get(base)
        if spec is None:
            raise UndeclaredSignal(f"undeclared signal {signal!r}" + (" (previous value not tracked)" if past else ""))
        if bit is not None:
            bit = int(bit)
            if not spec.is_int or bit >= spec.width:
                raise UndeclaredSignal(f"bit select {signal!r} out of range")
        return base, bit

    def source_of(self, signal: str) -> str:
        """Design variable a signal reference belongs to."""
        m = _SIGNAL_RE.match(signal)
        if m is None:
            raise UndeclaredSignal(f"undeclared signal {signal!r}")
        base = m.group("pv") or m.group("v")
        if base not in self.var_specs:
            raise UndeclaredSignal(f"undeclared signal {signal!r}")
        return base

    def check_signals(self, f: Formula) -> None:
        for name, _ in signals(f):
            self.resolve(name)

    # -- state formula evaluation
    def lookup(self, state: int) -> Callable[[str, bool], int]:
        val = self.valuations[state]
        idx = self.var_index

        def get(signal: str, past: bool) -> int:
            var, bit = self.resolve(signal, past)
            v = val[idx[var]]
            return v if bit is None else (v >> bit) & 1

        return get

    def eval_state(self, f: Formula, state: int) -> bool:
        return eval_state_formula(f, self.lookup(state))

    # -- derived models
    def with_past(self, names: Iterable[str]) -> "Model":
        """Augment with ``$past(v)`` shadows holding each variable's previous value.

        At the first cycle a shadow equals the current value.
        """
        names = tuple(sorted({self.source_of(n) for n in names}))
        if not names:
            return self
        key = ("past", names)
        if key in self._cache:
            return self._cache[key]
        idx = [self.var_index[n] for n in names]
        vals = self.valuations

        def shadow(s: int) -> tuple[int, ...]:
            return tuple(vals[s][i] for i in idx)

        start = sorted({(s, shadow(s)) for s in self.init})
        seen = set(start)
        queue = deque(start)
        while queue:
            s, _prev = queue.popleft()
            nxt_prev = shadow(s)
            for t in self.succ[s]:
                node = (t, nxt_prev)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        order = sorted(seen)
        index = {node: i for i, node in enumerate(order)}
        new_vars = self.variables + tuple(
            VarSpec(f"$past({n})", self.var_specs[n].width, self.var_specs[n].is_int, self.var_specs[n].max)
            for n in names
        )
        new_vals = tuple(vals[s] + prev for s, prev in order)
        succ = tuple(tuple(sorted(index[(t, shadow(s))] for t in self.succ[s])) for s, _ in order)
        init = tuple(sorted(index[node] for node in start))
        state_names = tuple(
            f"{self.state_names[s]}|" + ",".join(f"{n}={v}" for n, v in zip(names, prev)) for s, prev in order
        )
        deps = self.deps | {(n, f"$past({n})") for n in names}
        out = Model(self.name, new_vars, new_vals, init, succ, frozenset(deps), state_names,
                    fsm=None, origin=tuple(s for s, _ in order), base=self)
        self._cache[key] = out
        return out

    def havoc(self, names: Iterable[str]) -> "Model":
        """Model in which each named variable takes an arbitrary value at every step."""
        names = tuple(sorted(set(names)))
        for n in names:
            if n not in self.var_specs:
                raise UndeclaredSignal(f"undeclared signal {n!r}")
        if not names:
            return self
        key = ("havoc", names)
        if key in self._cache:
            return self._cache[key]
        if self.fsm is not None:
            out = _havoc_fsm(self, names)
        else:
            out = _havoc_explicit(self, names)
        self._cache[key] = out
        return out

    def reachable_states(self) -> list[int]:
        from .kernels import reachable

        return reachable(self.succ, self.init)

    # -- construction helpers
    @classmethod
    def explicit(cls, variables: dict[str, Any] | list[str], states: dict[str, dict[str, Any]] | list,
                 init: list, transitions: list, deps: Iterable = (), name: str = "model",
                 complete_selfloop: bool = False) -> "Model":
        doc = {"name": name, "variables": variables, "states": states, "init": init,
               "transitions": transitions, "deps": [list(d) for d in deps]}
        return model_from_dict(doc, complete_selfloop=complete_selfloop)


# -- state formula evaluation ----------------------------------------------------

def eval_term(t: Term, get: Callable[[str, bool], int], past: bool = False) -> int:
    op = t.op
    if op == "const":
        return t.value
    if op == "var":
        return get(t.name, past)
    if op == "past":
        return get(t.name, True)
    a, b = (eval_term(x, get, past) for x in t.args)
    return a + b if op == "+" else a - b


_CMP = {
    "==": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
}


def eval_state_formula(f: Formula, get: Callable[[str, bool], int], past: bool = False) -> bool:
    k = f.kind
    if k == ATOM:
        return get(f.name, past) != 0
    if k == TRUE:
        return True
    if k == FALSE:
        return False
    if k == NOT:
        return not eval_state_formula(f.children[0], get, past)
    if k == AND:
        return eval_state_formula(f.children[0], get, past) and eval_state_formula(f.children[1], get, past)
    if k == OR:
        return eval_state_formula(f.children[0], get, past) or eval_state_formula(f.children[1], get, past)
    if k == IMPLIES:
        return (not eval_state_formula(f.children[0], get, past)) or eval_state_formula(f.children[1], get, past)
    if k == CMP:
        a, b = (eval_term(t, get, past) for t in f.terms)
        return _CMP[f.name](a, b)
    if k == PAST:
        return eval_state_formula(f.children[0], get, True)
    if k == STABLE:
        inner = f.children[0]
        if inner.kind == ATOM:
            return get(inner.name, False) == get(inner.name, True)
        return eval_state_formula(inner, get, False) == eval_state_formula(inner, get, True)
    raise ValueError(f"{k} is not a state operator")


# -- loading ----------------------------------------------------------------------

def load_model(source: str | Path | dict, complete_selfloop: bool = False) -> Model:
    """Load a model document (path or parsed JSON)."""
    if isinstance(source, dict):
        return model_from_dict(source, complete_selfloop=complete_selfloop)
    path = Path(source)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelError(f"{path}: model document must be a JSON object")
    doc.setdefault("name", path.stem)
    return model_from_dict(doc, complete_selfloop=complete_selfloop)


def _parse_vars(raw: Any) -> list[VarSpec]:
    if isinstance(raw, list):
        raw = {n: "bool" for n in raw}
    if not isinstance(raw, dict) or not raw:
        raise ModelError("schema: 'variables' must be a nonempty object")
    out = []
    for name, spec in raw.items():
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ModelError(f"schema: bad variable name {name!r}")
        if isinstance(spec, str):
            spec = {"type": spec}
        if not isinstance(spec, dict):
            raise ModelError(f"schema: variables.{name} must be a type name or object")
        typ = spec.get("type", "bool")
        is_input = bool(spec.get("input", False))
        if typ == "bool":
            out.append(VarSpec(name, 1, False, None, is_input))
        elif typ == "int":
            width = spec.get("width")
            vmax = spec.get("max")
            if width is None and vmax is None:
                raise ModelError(f"schema: variables.{name} needs 'width' or 'max'")
            if width is None:
                width = max(1, int(vmax).bit_length())
            width = int(width)
            if width < 1 or width > 16:
                raise ModelError(f"schema: variables.{name}.width must be in 1..16")
            if vmax is not None and not 0 <= int(vmax) < (1 << width):
                raise ModelError(f"schema: variables.{name}.max does not fit in {width} bits")
            out.append(VarSpec(name, width, True, None if vmax is None else int(vmax), is_input))
        else:
            raise ModelError(f"schema: variables.{name}.type must be 'bool' or 'int'")
    return out


def _coerce(spec: VarSpec, value: Any, where: str) -> int:
    if isinstance(value, bool):
        v = int(value)
    elif isinstance(value, int):
        v = value
    else:
        raise ModelError(f"schema: {where} must be a boolean or integer")
    if v not in spec.domain:
        raise ModelError(f"schema: {where} = {v} outside the domain of {spec.name}")
    return v


def _parse_deps(raw: Any, names: set[str]) -> frozenset[tuple[str, str]]:
    if raw is None:
        return frozenset()
    if not isinstance(raw, list):
        raise ModelError("schema: 'deps' must be a list of [from, to] pairs")
    out = set()
    for d in raw:
        if not (isinstance(d, (list, tuple)) and len(d) == 2):
            raise ModelError("schema: 'deps' entries must be [from, to] pairs")
        a, b = d
        for n in (a, b):
            if n not in names:
                raise ModelError(f"undeclared variable {n!r} in deps")
        out.add((a, b))
    return frozenset(out)


def model_from_dict(doc: dict, complete_selfloop: bool = False) -> Model:
    for key in ("variables", "init", "transitions"):
        if key not in doc:
            raise ModelError(f"schema: missing section '{key}'")
    variables = _parse_vars(doc["variables"])
    names = {v.name for v in variables}
    deps = _parse_deps(doc.get("deps"), names)
    name = str(doc.get("name", "model"))
    if isinstance(doc["transitions"], dict):
        return _compile_fsm(name, variables, doc, deps)
    return _build_explicit(name, variables, doc, deps, complete_selfloop)


def _build_explicit(name, variables, doc, deps, complete_selfloop) -> Model:
    states = doc.get("states")
    if isinstance(states, list):
        states = {f"s{i}": s for i, s in enumerate(states)}
    if not isinstance(states, dict) or not states:
        raise ModelError("schema: explicit models need a nonempty 'states' object")
    state_names = list(states)
    index = {s: i for i, s in enumerate(state_names)}
    vals = []
    for sname, assign in states.items():
        if not isinstance(assign, dict):
            raise ModelError(f"schema: states.{sname} must be an object")
        row = []
        for spec in variables:
            if spec.name not in assign:
                raise ModelError(f"schema: state {sname} does not assign {spec.name}")
            row.append(_coerce(spec, assign[spec.name], f"states.{sname}.{spec.name}"))
        extra = set(assign) - {v.name for v in variables}
        if extra:
            raise ModelError(f"undeclared variable {sorted(extra)[0]!r} in state {sname}")
        vals.append(tuple(row))
    init_raw = doc["init"]
    if isinstance(init_raw, str):
        init_raw = [init_raw]
    if not isinstance(init_raw, list):
        raise ModelError("schema: 'init' must list state names for explicit models")
    try:
        init = tuple(sorted({index[s] for s in init_raw}))
    except KeyError as exc:
        raise ModelError(f"schema: unknown initial state {exc.args[0]!r}") from None
    succ: list[set[int]] = [set() for _ in state_names]
    edges = doc["transitions"]
    if not isinstance(edges, list):
        raise ModelError("schema: 'transitions' must be a list of [from, to] pairs or an FSM object")
    for e in edges:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ModelError("schema: transitions entries must be [from, to] pairs")
        a, b = e
        if a not in index or b not in index:
            raise ModelError(f"schema: transition {a} -> {b} names an unknown state")
        succ[index[a]].add(index[b])
    for i, s in enumerate(succ):
        if not s:
            if not complete_selfloop:
                raise ModelError(f"non-total transition relation: state {state_names[i]} has no successor")
            s.add(i)
    return Model(name, tuple(variables), tuple(vals), init, tuple(tuple(sorted(s)) for s in succ),
                 deps, tuple(state_names))


# -- synchronous FSM form ----------------------------------------------------------

def _parse_rules(variables: list[VarSpec], raw: dict) -> dict[str, list[tuple[Formula, Any]]]:
    from .parser import ParseError, parse_formula, parse_term

    specs = {v.name: v for v in variables}
    rules_raw = raw.get("rules", raw)
    if not isinstance(rules_raw, dict):
        raise ModelError("schema: transitions.rules must be an object")
    rules: dict[str, list[tuple[Formula, Any]]] = {}
    for var, body in rules_raw.items():
        spec = specs.get(var)
        if spec is None:
            raise ModelError(f"undeclared variable {var!r} in transition rules")
        if spec.is_input:
            raise ModelError(f"input {var!r} cannot have an update rule")
        cases = [["true", body]] if isinstance(body, (str, int, bool)) else body
        if not isinstance(cases, list):
            raise ModelError(f"schema: rules.{var} must be an expression or a list of [guard, expr]")
        parsed = []
        for case in cases:
            if not (isinstance(case, (list, tuple)) and len(case) == 2):
                raise ModelError(f"schema: rules.{var} cases must be [guard, expr] pairs")
            guard, expr = case
            try:
                g = parse_formula(str(guard).lower() if isinstance(guard, bool) else str(guard))
                if spec.is_int:
                    e = parse_term(str(expr))
                else:
                    e = parse_formula(str(expr).lower() if isinstance(expr, bool) else str(expr))
            except ParseError as exc:
                raise ModelError(f"rules.{var}: {exc}") from None
            for f in (g, e) if isinstance(e, Formula) else (g,):
                if not is_state_formula(f) or any(p for _, p in signals(f)):
                    raise ModelError(f"rules.{var}: update expressions must be past-free state expressions")
            parsed.append((g, e))
        rules[var] = parsed
    return rules


def _rule_reads(rules) -> set[tuple[str, str]]:
    out = set()
    for var, cases in rules.items():
        for g, e in cases:
            refs = {n for n, _ in signals(g)}
            if isinstance(e, Formula):
                refs |= {n for n, _ in signals(e)}
            else:
                refs |= {n for n, _ in e.variables()}
            for r in refs:
                base = re.sub(r"\[\d+\]$", "", r)
                out.add((base, var))
    return out


def _compile_fsm(name: str, variables: list[VarSpec], doc: dict, deps) -> Model:
    from .formula import Term as _Term

    rules = _parse_rules(variables, doc["transitions"])
    specs = {v.name: v for v in variables}
    for a, _ in _rule_reads(rules):
        if a not in specs:
            raise ModelError(f"undeclared variable {a!r} in transition rules")
    total = 1
    for v in variables:
        total *= len(v.domain)
    if total > MAX_FSM_STATES:
        raise ModelError(f"FSM state space too large ({total} > {MAX_FSM_STATES})")
    doms = [v.domain for v in variables]
    space = list(itertools.product(*doms))
    index = {val: i for i, val in enumerate(space)}
    order = [v.name for v in variables]
    pos = {n: i for i, n in enumerate(order)}

    init_raw = doc["init"]
    if not isinstance(init_raw, dict):
        raise ModelError("schema: 'init' must map variables to values for FSM models")
    fixed: dict[str, set[int]] = {}
    for var, value in init_raw.items():
        if var not in specs:
            raise ModelError(f"undeclared variable {var!r} in init")
        values = value if isinstance(value, list) else [value]
        fixed[var] = {_coerce(specs[var], v, f"init.{var}") for v in values}
    init = tuple(i for i, val in enumerate(space)
                 if all(val[pos[v]] in allowed for v, allowed in fixed.items()))
    if not init:
        raise ModelError("init constraints admit no state")

    inputs = [i for i, v in enumerate(variables) if v.is_input]
    input_choices = list(itertools.product(*(doms[i] for i in inputs)))
    succ = []
    for val in space:
        lookup = _valuation_lookup(variables, pos, val)
        regs = list(val)
        for var, cases in rules.items():
            spec = specs[var]
            for g, e in cases:
                if eval_state_formula(g, lookup):
                    if isinstance(e, _Term):
                        nv = eval_term(e, lookup) % (1 << spec.width)
                    else:
                        nv = int(eval_state_formula(e, lookup))
                    if nv not in spec.domain:
                        raise ModelError(f"update of {var} yields {nv}, outside its domain")
                    regs[pos[var]] = nv
                    break
        nxt = set()
        for choice in input_choices:
            for i, c in zip(inputs, choice):
                regs[i] = c
            nxt.add(index[tuple(regs)])
        succ.append(tuple(sorted(nxt)))
    if deps == frozenset() and "deps" not in doc:
        deps = frozenset(_rule_reads(rules))
    state_names = tuple(",".join(f"{n}={v}" for n, v in zip(order, val)) for val in space)
    fsm = {"variables": variables, "rules": rules, "init": fixed, "doc": doc}
    return Model(name, tuple(variables), tuple(space), init, tuple(succ), deps, state_names, fsm=fsm)


def _valuation_lookup(variables, pos, val):
    specs = {v.name: v for v in variables}

    def get(signal: str, past: bool) -> int:
        if past:
            raise ModelError("past values are not available in update rules")
        m = _SIGNAL_RE.match(signal)
        base = m.group("v") if m else None
        if base not in pos:
            raise UndeclaredSignal(f"undeclared signal {signal!r}")
        v = val[pos[base]]
        bit = m.group("bit")
        if bit is not None:
            if int(bit) >= specs[base].width:
                raise UndeclaredSignal(f"bit select {signal!r} out of range")
            return (v >> int(bit)) & 1
        return v

    return get


def _havoc_fsm(m: Model, names: tuple[str, ...]) -> Model:
    fsm = m.fsm
    variables = [VarSpec(v.name, v.width, v.is_int, v.max, v.is_input or v.name in names) for v in fsm["variables"]]
    doc = dict(fsm["doc"])
    tr = doc["transitions"]
    rules_raw = dict(tr.get("rules", tr))
    for n in names:
        rules_raw.pop(n, None)
    doc["transitions"] = {"rules": rules_raw}
    doc["init"] = {k: v for k, v in doc["init"].items() if k not in names}
    doc["variables"] = {
        v.name: ({"type": "int", "width": v.width, **({"max": v.max} if v.max is not None else {}), "input": v.is_input}
                 if v.is_int else {"type": "bool", "input": v.is_input})
        for v in variables
    }
    if "deps" not in doc:
        # havocking removes reads, but the declared influence graph stays that of the design
        doc["deps"] = [list(d) for d in sorted(m.deps)]
    out = model_from_dict(doc)
    return out


def _havoc_explicit(m: Model, names: tuple[str, ...]) -> Model:
    idx = [m.var_index[n] for n in names]
    choices = list(itertools.product(*(m.var_specs[n].domain for n in names)))
    k = len(choices)
    vals, state_names = [], []
    for s, val in enumerate(m.valuations):
        for c in choices:
            row = list(val)
            for i, v in zip(idx, c):
                row[i] = v
            vals.append(tuple(row))
            state_names.append(f"{m.state_names[s]}#" + ",".join(f"{n}={v}" for n, v in zip(names, c)))
    succ = []
    for s in range(m.num_states):
        row = tuple(t * k + j for t in m.succ[s] for j in range(k))
        for _ in range(k):
            succ.append(row)
    init = tuple(s * k + j for s in m.init for j in range(k))
    return Model(m.name, m.variables, tuple(vals), init, tuple(succ), m.deps, tuple(state_names))


# -- queries ----------------------------------------------------------------------

def reachable_states(m: Model) -> list[int]:
    return m.reachable_states()


def cone_of_influence(m: Model, f: Formula | Iterable[Formula]) -> set[str]:
    """Variables that can influence the signals *f* mentions."""
    formulas = [f] if isinstance(f, Formula) else list(f)
    start = set()
    for g in formulas:
        for name, _ in signals(g):
            m.resolve(name)
            start.add(m.source_of(name))
    preds: dict[str, set[str]] = {}
    for a, b in m.deps:
        preds.setdefault(b, set()).add(a)
    seen = set(start)
    stack = list(start)
    while stack:
        v = stack.pop()
        for p in preds.get(v, ()):
            if p.startswith("$past("):
                p = p[6:-1]
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return {v[6:-1] if v.startswith("$past(") else v for v in seen}
