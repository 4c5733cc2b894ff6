"""Coverage figures for a set of proven properties.

* checker coverage: share of design variables in the union of the
  properties' cones of influence (COI), and in the union of their proof
  cores.  A variable is in a property's proof core when letting it
  change arbitrarily makes the property fail.
* stimuli coverage: mean of bit toggle coverage over reachable states
  and the share of declared states that are reachable.
* formal coverage: checker figure combined with stimuli coverage by a
  selectable rule (product by default).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .checker import check
from .formula import Formula
from .model import Model, cone_of_influence
from .sva import SvaProperty

DEFAULT_THRESHOLD = 80.0
RULES = ("product", "min", "harmonic")


class CoverageError(ValueError):
    pass


def _pct(part: int, whole: int) -> float:
    return round(100.0 * part / whole, 6) if whole else 0.0


def _as_props(props) -> list[tuple[str, Formula, Formula | None]]:
    out = []
    for i, p in enumerate(props):
        if isinstance(p, SvaProperty):
            out.append((p.name, p.formula, p.assumption))
        elif isinstance(p, Formula):
            out.append((f"prop_{i}", p, None))
        else:
            name, f, assume = p
            out.append((name, f, assume))
    return out


@dataclass
class PropertyCoverage:
    name: str
    coi: list[str]
    proof_core: list[str]

    def to_dict(self) -> dict:
        return {"name": self.name, "coi": self.coi, "proof_core": self.proof_core}


def property_coverage(m: Model, name: str, f: Formula, assume: Formula | None = None,
                      require_proof: bool = True) -> PropertyCoverage:
    if require_proof and not check(m, f, assume).holds:
        raise CoverageError(f"property {name} does not hold; coverage needs proven properties")
    coi = sorted(cone_of_influence(m, f))
    core = [v for v in coi if not check(m.havoc([v]), f, assume).holds]
    return PropertyCoverage(name, coi, core)


def checker_coverage(m: Model, props) -> tuple[float, float, list[PropertyCoverage]]:
    detail = [property_coverage(m, n, f, a) for n, f, a in _as_props(props)]
    n = len(m.source_variables)
    coi = set().union(*(d.coi for d in detail)) if detail else set()
    core = set().union(*(d.proof_core for d in detail)) if detail else set()
    return _pct(len(coi), n), _pct(len(core), n), detail


@dataclass
class Stimuli:
    toggle: float
    reachability: float
    toggled: list[str]
    untoggled: list[str]

    @property
    def value(self) -> float:
        return round((self.toggle + self.reachability) / 2, 6)


def toggled_bits(m: Model, reachable: Iterable[int] | None = None) -> list[str]:
    states = list(m.reachable_states() if reachable is None else reachable)
    bits = [b for v in m.variables if not v.name.startswith("$past(") for b in v.bits]
    out = []
    for b in bits:
        vals = {m.value(s, b) for s in states}
        if len(vals) == 2:
            out.append(b)
    return out


def stimuli_coverage(m: Model) -> Stimuli:
    reach = m.reachable_states()
    bits = [b for v in m.variables if not v.name.startswith("$past(") for b in v.bits]
    toggled = toggled_bits(m, reach)
    return Stimuli(_pct(len(toggled), len(bits)), _pct(len(reach), m.num_states),
                   toggled, [b for b in bits if b not in set(toggled)])


def formal_coverage(checker: float, stimuli: float, rule: str = "product") -> float:
    if rule == "product":
        value = checker * stimuli / 100.0
    elif rule == "min":
        value = min(checker, stimuli)
    elif rule == "harmonic":
        value = 0.0 if checker + stimuli == 0 else 2 * checker * stimuli / (checker + stimuli)
    else:
        raise ValueError(f"unknown composite rule {rule!r}; expected one of {', '.join(RULES)}")
    return round(value, 6)


@dataclass
class CoverageReport:
    checker_coi: float
    checker_proof_core: float
    stimuli: float
    toggle: float
    reachability: float
    formal_coi: float
    formal_proof_core: float
    rule: str = "product"
    per_property: list[PropertyCoverage] = field(default_factory=list)
    uncovered: list[str] = field(default_factory=list)
    untoggled: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "checker_coi": self.checker_coi,
            "checker_proof_core": self.checker_proof_core,
            "stimuli": self.stimuli,
            "toggle": self.toggle,
            "reachability": self.reachability,
            "formal_coi": self.formal_coi,
            "formal_proof_core": self.formal_proof_core,
            "rule": self.rule,
            "per_property": [p.to_dict() for p in self.per_property],
            "uncovered": self.uncovered,
            "untoggled": self.untoggled,
        }


def report_from_parts(m: Model, detail: Sequence[PropertyCoverage], stim: Stimuli,
                      rule: str = "product") -> CoverageReport:
    n = len(m.source_variables)
    coi = set().union(*(d.coi for d in detail)) if detail else set()
    core = set().union(*(d.proof_core for d in detail)) if detail else set()
    c_coi, c_core = _pct(len(coi), n), _pct(len(core), n)
    return CoverageReport(
        c_coi, c_core, stim.value, stim.toggle, stim.reachability,
        formal_coverage(c_coi, stim.value, rule), formal_coverage(c_core, stim.value, rule),
        rule, list(detail), [v for v in m.source_variables if v not in coi], list(stim.untoggled),
    )


def coverage_report(m: Model, props, rule: str = "product") -> CoverageReport:
    """All coverage figures for proven *props* on *m*."""
    _, _, detail = checker_coverage(m, props)
    return report_from_parts(m, detail, stimuli_coverage(m), rule)


def meets_threshold(r: CoverageReport, threshold: float = DEFAULT_THRESHOLD) -> bool:
    """Inclusive: a formal COI figure equal to the threshold passes."""
    return r.formal_coi >= threshold


def render_table(rows: Sequence[tuple[str, CoverageReport]]) -> str:
    """Per-design coverage table with an average row."""
    head = ("Design", "Checker COI", "Proof Core", "Stimuli", "Formal COI", "Formal Proof Core")
    body = [
        (name, r.checker_coi, r.checker_proof_core, r.stimuli, r.formal_coi, r.formal_proof_core)
        for name, r in rows
    ]
    if body:
        avg = tuple(sum(row[i] for row in body) / len(body) for i in range(1, 6))
        body.append(("Average",) + avg)
    cells = [head] + [(row[0],) + tuple(f"{x:.2f}%" for x in row[1:]) for row in body]
    widths = [max(len(c[i]) for c in cells) for i in range(len(head))]
    lines = []
    for k, c in enumerate(cells):
        lines.append(" | ".join(c[i].ljust(widths[i]) if i == 0 else c[i].rjust(widths[i])
                                for i in range(len(head))))
        if k == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
