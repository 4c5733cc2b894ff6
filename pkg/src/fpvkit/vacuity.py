"""Vacuity analysis by two-sided substitution.

An occurrence of a subformula does not affect a formula in a model when
replacing it by ``true`` and by ``false`` gives the same satisfaction
result.  A formula that holds while some occurrence does not affect it
holds vacuously.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .checker import Verdict, check
from .formula import (
    FALSE, TRUE, Formula, Not, OccurrencePath, occurrences, substitute_many, witness_formula,
)
from .model import Lasso, Model

SINGLE = "single"
ALL_OCCURRENCES = "all-occurrences"
SUBSETS = "subsets"
MODES = (SINGLE, ALL_OCCURRENCES, SUBSETS)
MAX_SUBSET_OCCURRENCES = 12


@dataclass(frozen=True)
class Affects:
    occurrences: tuple[OccurrencePath, ...]
    subformula: Formula
    affects: bool
    sat_true: bool
    sat_false: bool

    @property
    def simultaneous(self) -> bool:
        return len(self.occurrences) > 1

    def to_dict(self) -> dict:
        return {
            "paths": [list(o.path) for o in self.occurrences],
            "polarity": [o.polarity.value for o in self.occurrences],
            "subformula": str(self.subformula),
            "affects": self.affects,
            "sat_true": self.sat_true,
            "sat_false": self.sat_false,
        }


@dataclass
class VacuityReport:
    formula: Formula
    model: str
    holds: bool
    results: list[Affects] = field(default_factory=list)
    verdict: str = "fails"
    counterexample: Lasso | None = None

    @property
    def non_affecting(self) -> list[Affects]:
        return [r for r in self.results if not r.affects]

    @property
    def vacuous(self) -> bool:
        return self.verdict == "vacuous"

    @property
    def non_vacuous(self) -> bool:
        return self.verdict == "non-vacuous"

    def to_dict(self) -> dict:
        return {
            "formula": str(self.formula),
            "model": self.model,
            "holds": self.holds,
            "verdict": self.verdict,
            "results": [r.to_dict() for r in self.results],
        }


def affects(m: Model, f: Formula, at, assume: Formula | None = None) -> Affects:
    """Two-substitution test for one occurrence, or several replaced together."""
    group = (at,) if isinstance(at, OccurrencePath) else tuple(at)
    if not group:
        raise ValueError("no occurrence given")
    sub = f.at(group[0].path)
    sat_true = check(m, substitute_many(f, group, True), assume).holds
    sat_false = check(m, substitute_many(f, group, False), assume).holds
    return Affects(group, sub, sat_true != sat_false, sat_true, sat_false)


def _groups(f: Formula, mode: str) -> list[tuple[OccurrencePath, ...]]:
    occs = [o for o in occurrences(f) if f.at(o.path).kind not in (TRUE, FALSE)]
    out: list[tuple[OccurrencePath, ...]] = [(o,) for o in occs]
    if mode == SINGLE:
        return out
    by_sub: dict[Formula, list[OccurrencePath]] = {}
    for o in occs:
        by_sub.setdefault(f.at(o.path), []).append(o)
    for sub, group in by_sub.items():
        if len(group) < 2:
            continue
        if mode == ALL_OCCURRENCES:
            out.append(tuple(group))
        else:
            if len(group) > MAX_SUBSET_OCCURRENCES:
                raise ValueError(f"{len(group)} occurrences of {sub}; subset mode allows {MAX_SUBSET_OCCURRENCES}")
            for r in range(2, len(group) + 1):
                out.extend(itertools.combinations(group, r))
    return out


def check_vacuity(m: Model, f: Formula, mode: str = ALL_OCCURRENCES,
                  assume: Formula | None = None) -> VacuityReport:
    """Classify *f* on *m* as failing, vacuous or non-vacuous.

    Failing formulas get no occurrence results: vacuity is only defined
    for formulas that hold.
    """
    if mode not in MODES:
        raise ValueError(f"unknown vacuity mode {mode!r}")
    verdict: Verdict = check(m, f, assume)
    report = VacuityReport(f, m.name, verdict.holds)
    if not verdict.holds:
        report.counterexample = verdict.counterexample
        return report
    report.results = [affects(m, f, g, assume) for g in _groups(f, mode)]
    report.verdict = "vacuous" if report.non_affecting else "non-vacuous"
    return report


def interesting_witness(m: Model, f: Formula, assume: Formula | None = None) -> Lasso | None:
    """A path on which *f* holds and every occurrence matters, if one exists."""
    return check(m, Not(witness_formula(f)), assume).counterexample
