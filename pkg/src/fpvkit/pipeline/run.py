"""End-to-end property generation loop.

One run: build a generation prompt per IP, collect candidate assertions
from the provider, parse them (one repair round-trip for rejects),
discard vacuous ones, emit and re-read SVA, model-check, measure
coverage, and keep asking for more assertions with refinement prompts
until the coverage threshold is met or the round budget is spent.
"""
from __future__ import annotations

import datetime as _dt
import json
import logging
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..checker import ResourceLimitError, lasso_digest, render_lasso, trace_signals
from ..coverage import (
    CoverageReport, PropertyCoverage, coverage_report, meets_threshold, property_coverage,
    render_table, report_from_parts, stimuli_coverage,
)
from ..formula import ALWAYS, IMPLIES, Formula
from ..model import Model, ModelError, cone_of_influence
from ..parser import ParseError
from ..printer import pretty_print
from ..sva import emit_sva, parse_property_text
from ..vacuity import ALL_OCCURRENCES, VacuityReport, check_vacuity
from .extract import extract_blocks
from .prompts import Prompt, PromptDatabase, PromptError, build_prompt, prompt_hash
from .providers import GenerationParams, Provider, ProviderExhausted, complete_with_retry
from .retrieval import Chunk, retrieve_context
from .specfile import SpecFile

log = logging.getLogger(__name__)

STATUSES = ("generated", "correct", "non-vacuous", "sva-emitted", "sva-correct", "proved", "failed")
_RANK = {s: i for i, s in enumerate(STATUSES)}
_RANK["failed"] = _RANK["proved"]


@dataclass
class PropertyRecord:
    id: str
    prompt_id: str
    raw_text: str
    iteration: int = 0
    ip: str = ""
    status: str = "generated"
    name: str | None = None
    formula: Formula | None = None
    disable: Formula | None = None
    clock: str | None = None
    error: str | None = None
    fixed_text: str | None = None
    threat_augmented: bool = False
    vacuity: VacuityReport | None = None
    sva: str | None = None
    holds: bool | None = None
    cex: str | None = None
    cex_digest: str | None = None

    @property
    def assumption(self) -> Formula | None:
        from ..formula import Always, Not

        return None if self.disable is None else Always(Not(self.disable))

    def reached(self, status: str) -> bool:
        return _RANK[self.status] >= _RANK[status]

    def advance(self, status: str) -> None:
        if _RANK[status] < _RANK[self.status]:
            raise ValueError(f"record {self.id}: status cannot go back from {self.status} to {status}")
        self.status = status

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "prompt_id": self.prompt_id,
            "iteration": self.iteration,
            "ip": self.ip,
            "status": self.status,
            "name": self.name,
            "raw_text": self.raw_text,
            "fixed_text": self.fixed_text,
            "formula": None if self.formula is None else pretty_print(self.formula),
            "disable": None if self.disable is None else pretty_print(self.disable),
            "error": self.error,
            "threat_augmented": self.threat_augmented,
            "sva": self.sva,
            "holds": self.holds,
            "cex_digest": self.cex_digest,
        }
        if self.vacuity is not None:
            out["vacuity"] = {
                "verdict": self.vacuity.verdict,
                "non_affecting": [str(r.subformula) for r in self.vacuity.non_affecting],
            }
        return out


@dataclass
class RunConfig:
    threshold: float = 80.0
    max_iter: int = 5
    mode: str = ALL_OCCURRENCES
    rule: str = "product"
    top_k: int = 3
    clock: str = "clk"
    attempts: int = 3
    base_delay: float = 0.5
    examples: str | None = None
    template_dir: str | None = None
    prompt_db: str | None = None
    params: GenerationParams = field(default_factory=GenerationParams)

    def __post_init__(self):
        if not 0 <= self.threshold <= 100:
            raise ValueError("threshold must be within [0, 100]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def to_dict(self) -> dict:
        return {"threshold": self.threshold, "max_iter": self.max_iter, "mode": self.mode,
                "rule": self.rule, "top_k": self.top_k, "model": self.params.model,
                "temperature": self.params.temperature, "max_tokens": self.params.max_tokens}


@dataclass
class RunReport:
    header: dict
    body: dict

    @property
    def funnel(self) -> dict:
        return self.body["funnel"]

    @property
    def bugs(self) -> list:
        return self.body["bugs"]

    @property
    def threshold_met(self) -> bool:
        return self.body["threshold_met"]

    @property
    def complete(self) -> bool:
        return self.body["complete"]

    @property
    def trajectory(self) -> list:
        return self.body["trajectory"]

    def to_dict(self) -> dict:
        return {"header": self.header, **self.body}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        return render_report_text(self)


# -- stages ---------------------------------------------------------------------------

class _Run:
    def __init__(self, spec: SpecFile, model: Model, provider: Provider, config: RunConfig,
                 corpus: list[Chunk], sleep: Callable[[float], None]):
        self.spec = spec
        self.model = model
        self.provider = provider
        self.config = config
        self.corpus = corpus
        self.sleep = sleep
        self.records: list[PropertyRecord] = []
        self.exchanges: list[dict] = []
        self.db = PromptDatabase.load(config.prompt_db)
        self._cov_cache: dict = {}
        self._names: set[str] = set()

    def generation_prompt(self, view: dict) -> tuple[Prompt, bool]:
        ip = view["ip"]
        query = " ".join([ip.get("NAME", ""), ip.get("OPERATION", ""), " ".join(map(str, ip.get("SIGNALS", [])))])
        context = retrieve_context(self.corpus, query, self.config.top_k)
        extras = {"clock": self.config.clock}
        if self.config.examples:
            extras["examples"] = self.config.examples
        threat = ip.get("THREAT_MODEL")
        if threat:
            extras["threat_model"] = str(threat)
        return build_prompt("generate", view, context, extras, template_dir=self.config.template_dir), bool(threat)

    def generate(self, prompt: Prompt, iteration: int, ip: str, threat: bool) -> list[PropertyRecord]:
        before = len(self.provider.exchanges)
        out = generate_properties(self.provider, prompt, self.model, self.config.params, self.config.attempts,
                                  self.config.base_delay, self.sleep, self.config.template_dir,
                                  first_id=len(self.records) + 1, iteration=iteration, ip=ip, threat=threat)
        for ex in self.provider.exchanges[before:]:
            self.exchanges.append({"prompt_hash": ex.prompt_hash, "response_hash": prompt_hash(ex.response),
                                   "provider": ex.provider})
        return out

    def evaluate(self, rec: PropertyRecord) -> None:
        if not rec.reached("correct") or rec.formula is None:
            return
        rep = check_vacuity(self.model, rec.formula, self.config.mode, rec.assumption)
        rec.vacuity = rep
        if rep.vacuous:
            return
        # failing properties have no vacuity verdict and continue to the checker
        rec.advance("non-vacuous")
        name = rec.name or rec.id
        if name in self._names:
            name = f"{name}_{rec.id}"
        self._names.add(name)
        sva = emit_sva(rec.formula, name, rec.clock or self.config.clock, rec.disable)
        rec.sva = sva.text
        rec.advance("sva-emitted")
        back = parse_property_text(sva.text)
        if len(back) == 1 and back[0].formula == rec.formula and back[0].disable == rec.disable:
            rec.advance("sva-correct")
        else:
            return
        rec.holds = rep.holds
        if rep.holds:
            rec.advance("proved")
        else:
            rec.advance("failed")
            trace = render_lasso(self.model, rep.counterexample, trace_signals(self.model, rec.formula))
            rec.cex = trace
            rec.cex_digest = lasso_digest(trace)

    def coverage(self) -> CoverageReport:
        detail = []
        for rec in self.records:
            if rec.status != "proved":
                continue
            key = (rec.formula, rec.assumption)
            pc = self._cov_cache.get(key)
            if pc is None:
                pc = property_coverage(self.model, rec.name or rec.id, rec.formula, rec.assumption,
                                       require_proof=False)
                self._cov_cache[key] = pc
            detail.append(PropertyCoverage(rec.name or rec.id, pc.coi, pc.proof_core))
        if not hasattr(self, "_stimuli"):
            self._stimuli = stimuli_coverage(self.model)
        return report_from_parts(self.model, detail, self._stimuli, self.config.rule)

    def bugs(self) -> list[dict]:
        assets = self.spec.asset_signals()
        out = []
        for rec in self.records:
            if rec.status != "failed":
                continue
            coi = cone_of_influence(self.model, rec.formula)
            hit = sorted(a for a, sigs in assets.items()
                         if coi & {s for s in sigs if s in self.model.var_specs})
            if not hit and not rec.threat_augmented:
                continue
            body = rec.formula.children[0] if rec.formula.kind == ALWAYS else rec.formula
            antecedent = consequent = None
            if body.kind == IMPLIES:
                antecedent, consequent = (pretty_print(c) for c in body.children)
            out.append({
                "record": rec.id,
                "property": rec.name,
                "ip": rec.ip,
                "assets": hit,
                "reason": "asset" if hit else "threat-model",
                "antecedent": antecedent,
                "consequent": consequent,
                "sva": rec.sva,
                "cex_digest": rec.cex_digest,
            })
        return out


def _accept(rec: PropertyRecord, text: str, model: Model | None) -> str | None:
    """Parse *text* into *rec*; returns an error message on rejection."""
    try:
        props = parse_property_text(text)
    except ParseError as exc:
        return f"[ERROR] {exc}"
    if len(props) != 1:
        return f"[ERROR] expected one property, found {len(props)}"
    p = props[0]
    if model is not None:
        try:
            model.check_signals(p.formula)
            if p.disable is not None:
                model.check_signals(p.disable)
        except ModelError as exc:
            return f"[ERROR] semantic error: {exc}"
    rec.name, rec.formula, rec.disable, rec.clock = p.name, p.formula, p.disable, p.clock
    rec.error = None
    rec.advance("correct")
    return None


def generate_properties(provider: Provider, prompt: Prompt, model: Model | None = None,
                        params: GenerationParams | None = None, attempts: int = 3, base_delay: float = 0.5,
                        sleep: Callable[[float], None] = time.sleep, template_dir: str | None = None,
                        first_id: int = 1, iteration: int = 0, ip: str = "",
                        threat: bool = False) -> list[PropertyRecord]:
    """Ask *provider* for assertions and parse what comes back.

    A candidate is ``correct`` when it parses to exactly one property and,
    given a *model*, mentions only declared signals.  A rejected candidate
    gets one repair request carrying the error text; if the repair is
    rejected too the record stays at ``generated``.
    """
    response = complete_with_retry(provider, prompt.text, params, attempts, base_delay, sleep)
    blocks = extract_blocks(response)
    if not blocks:
        log.warning("no assertions found in the response to %s", prompt.id)
    out = []
    for raw in blocks:
        rec = PropertyRecord(f"P{first_id + len(out):03d}", prompt.id, raw, iteration, ip, threat_augmented=threat)
        err = _accept(rec, raw, model)
        if err is not None:
            fix = build_prompt("sva-fix", extras={"error": err, "property": raw}, template_dir=template_dir)
            fixed = extract_blocks(complete_with_retry(provider, fix.text, params, attempts, base_delay, sleep))
            err2 = _accept(rec, fixed[0], model) if fixed else "[ERROR] no assertion in the repair response"
            if err2 is None:
                rec.fixed_text = fixed[0]
            else:
                rec.error = err2
        out.append(rec)
    return out


def uncovered_categories(m: Model, cov: CoverageReport) -> set[str]:
    """Keyword categories of the design state no proven assertion reaches."""
    cats: set[str] = set()
    registers = {v.name for v in m.variables if not v.is_input and not v.name.startswith("$past(")}
    feeds: dict[str, set[str]] = {}
    for a, b in m.deps:
        feeds.setdefault(b, set()).add(a)
    for v in cov.uncovered:
        spec = m.var_specs[v]
        if re.search(r"rst|reset", v, re.I):
            cats.add("reset")
        if spec.is_int:
            cats.add("corner")
        if v in registers:
            cats.add("sequential")
            if (feeds.get(v, set()) - {v}) & registers:
                cats.add("multi-cycle")
    if cov.reachability < 100:
        cats.add("unreachable")
    return cats


def funnel_counts(records: list[PropertyRecord]) -> dict:
    return {
        "generated": len(records),
        "correct": sum(r.reached("correct") for r in records),
        "non_vacuous": sum(r.reached("non-vacuous") for r in records),
        "sva_emitted": sum(r.reached("sva-emitted") for r in records),
        "sva_correct": sum(r.reached("sva-correct") for r in records),
        "proved": sum(r.status == "proved" for r in records),
        "failed": sum(r.status == "failed" for r in records),
    }


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def run_pipeline(spec: SpecFile, model: Model, provider: Provider, config: RunConfig | None = None,
                 corpus: list[Chunk] | None = None, sleep: Callable[[float], None] = time.sleep,
                 clock: Callable[[], str] = _now) -> RunReport:
    """Run generation, filtering, checking and coverage-driven refinement."""
    from .. import __version__

    config = config or RunConfig()
    run = _Run(spec, model, provider, config, corpus or [], sleep)
    views = spec.ip_views()
    trajectory: list[dict] = []
    complete, stop_reason = True, "round limit reached"
    cov: CoverageReport | None = None
    iterations = 0
    try:
        for it in range(config.max_iter):
            prompts: list[tuple[Prompt, str, bool]] = []
            if it == 0:
                for view in views:
                    p, threat = run.generation_prompt(view)
                    prompts.append((p, view["ip"]["NAME"], threat))
            else:
                cats = uncovered_categories(model, cov)
                entry = run.db.next_entry(cats)
                if entry is None:
                    stop_reason = "no applicable refinement prompt"
                    break
                for view in views:
                    extras = {
                        "ip_name": view["ip"]["NAME"],
                        "coverage": render_table([(model.name, cov)]).rstrip(),
                        "uncovered": ", ".join(cov.uncovered) or "(none)",
                        "untoggled": ", ".join(cov.untoggled) or "(none)",
                        "entry": entry.text,
                    }
                    p = build_prompt("refinement", extras=extras, template_dir=config.template_dir)
                    prompts.append((p, view["ip"]["NAME"], False))
            iterations = it + 1
            for p, ip, threat in prompts:
                new = run.generate(p, it, ip, threat)
                run.records.extend(new)
                for rec in new:
                    run.evaluate(rec)
            cov = run.coverage()
            trajectory.append({
                "iteration": it,
                "proved": sum(r.status == "proved" for r in run.records),
                "checker_coi": cov.checker_coi,
                "checker_proof_core": cov.checker_proof_core,
                "stimuli": cov.stimuli,
                "formal_coi": cov.formal_coi,
                "formal_proof_core": cov.formal_proof_core,
            })
            if meets_threshold(cov, config.threshold):
                stop_reason = "coverage threshold met"
                break
    except (ProviderExhausted, ResourceLimitError, PromptError) as exc:
        complete, stop_reason = False, f"incomplete: {exc}"
    if cov is None:
        cov = run.coverage()
    failures = [{"record": r.id, "property": r.name, "cex_digest": r.cex_digest, "trace": r.cex}
                for r in run.records if r.status == "failed"]
    body = {
        "spec": {"name": spec.name, "bus": spec.bus, "ips": [ip.name for ip in spec.ip_blocks]},
        "model": model.name,
        "config": config.to_dict(),
        "provider": provider.provider_id,
        "complete": complete,
        "stop_reason": stop_reason,
        "iterations": iterations,
        "funnel": funnel_counts(run.records),
        "records": [r.to_dict() for r in run.records],
        "coverage": cov.to_dict(),
        "coverage_table": render_table([(model.name, cov)]),
        "trajectory": trajectory,
        "threshold_met": meets_threshold(cov, config.threshold),
        "failures": failures,
        "bugs": run.bugs(),
        "exchanges": run.exchanges,
        "refinement_prompts_used": [run.db.entries[i].text for i in run.db.used],
    }
    header = {"generated_at": clock(), "tool": f"fpvkit {__version__}"}
    return RunReport(header, body)


def render_report_text(r: RunReport) -> str:
    b = r.body
    f = b["funnel"]
    lines = [
        f"run report  {r.header['tool']}  {r.header['generated_at']}",
        f"spec: {b['spec']['name']}  model: {b['model']}  provider: {b['provider']}",
        f"status: {'complete' if b['complete'] else 'INCOMPLETE'} ({b['stop_reason']}), rounds: {b['iterations']}",
        "",
        "property funnel",
        "  #generated  #correct  #non-vacuous  #sva-generated  #sva-correct  #proved  #failed",
        "  {generated:>10}  {correct:>8}  {non_vacuous:>12}  {sva_emitted:>14}  {sva_correct:>12}  "
        "{proved:>7}  {failed:>7}".format(**f),
        "",
        "coverage",
    ]
    lines += ["  " + ln for ln in b["coverage_table"].rstrip("\n").splitlines()]
    lines.append(f"  threshold {b['config']['threshold']:.2f}% formal COI: {'met' if b['threshold_met'] else 'NOT met'}")
    lines.append("")
    lines.append("coverage by round (formal COI %)")
    for t in b["trajectory"]:
        lines.append(f"  round {t['iteration']}: {t['formal_coi']:.2f}  ({t['proved']} proved)")
    lines.append("")
    lines.append("properties")
    for rec in b["records"]:
        tag = rec["status"]
        if rec.get("vacuity", {}).get("verdict") == "vacuous":
            tag += " (vacuous: " + "; ".join(rec["vacuity"]["non_affecting"]) + ")"
        lines.append(f"  {rec['id']} {rec['name'] or '-'}: {tag}")
        if rec["error"]:
            lines.append(f"      {rec['error']}")
    if b["failures"]:
        lines.append("")
        lines.append("counterexamples")
        for fl in b["failures"]:
            lines.append(f"  {fl['property']} [{fl['cex_digest']}]")
            lines += ["    " + ln for ln in fl["trace"].rstrip("\n").splitlines()]
    lines.append("")
    lines.append(f"bugs flagged: {len(b['bugs'])}")
    for bug in b["bugs"]:
        shape = f"{bug['antecedent']} |-> {bug['consequent']}" if bug["antecedent"] else bug["sva"]
        lines.append(f"  {bug['property']} ({bug['reason']}: {', '.join(bug['assets']) or 'threat model'}): {shape}")
    return "\n".join(lines) + "\n"


def write_report(report: RunReport, out: str | Path) -> tuple[Path, Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    j, t = out / "run_report.json", out / "run_report.txt"
    j.write_text(report.to_json(), encoding="utf-8")
    t.write_text(report.to_text(), encoding="utf-8")
    return j, t
