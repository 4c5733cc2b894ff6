"""Command-line driver.

Exit codes: 0 success, 1 failures or bugs found, 2 input error,
3 coverage threshold unmet.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .checker import ResourceLimitError, check, lasso_digest, render_lasso, trace_signals
from .coverage import DEFAULT_THRESHOLD, RULES, CoverageError, coverage_report, render_table
from .model import ModelError, load_model
from .parser import ParseError
from .printer import pretty_print
from .sva import load_properties
from .vacuity import ALL_OCCURRENCES, MODES, check_vacuity

EXIT_OK, EXIT_BUGS, EXIT_INPUT, EXIT_THRESHOLD = 0, 1, 2, 3

log = logging.getLogger("fpvkit")


class InputError(Exception):
    pass


def _threshold(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= v <= 100:
        raise argparse.ArgumentTypeError("threshold must be within [0, 100]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpvkit", description="LTL/SVA model checking, vacuity and coverage.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, props=True):
        p.add_argument("--model", required=True, help="model JSON file")
        if props:
            p.add_argument("--props", required=True, nargs="+", help="property files (.sva or line-per-formula)")
        p.add_argument("--complete-selfloop", action="store_true",
                       help="give dead-end states a self-loop instead of rejecting the model")
        p.add_argument("--out", help="also write the output to this file")
        p.add_argument("--json", action="store_true", help="print JSON instead of text")

    p = sub.add_parser("check", help="model-check properties")
    common(p)
    p = sub.add_parser("vacuity", help="vacuity-check properties")
    common(p)
    p.add_argument("--mode", choices=MODES, default=ALL_OCCURRENCES)
    p = sub.add_parser("coverage", help="coverage of proven properties")
    common(p)
    p.add_argument("--rule", choices=RULES, default="product")
    p = sub.add_parser("pipeline", help="generate, filter, check and refine properties")
    common(p, props=False)
    p.add_argument("--spec", required=True, help="spec JSON file")
    p.add_argument("--provider", choices=("replay", "http"), default=None)
    p.add_argument("--transcript", help="replay transcript JSON")
    p.add_argument("--config", help="provider config JSON (credential comes from the environment)")
    p.add_argument("--docs", help="directory of design notes for retrieval")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("--max-iter", type=_positive, default=5, help="generation rounds, first round included")
    p.add_argument("--mode", choices=MODES, default=ALL_OCCURRENCES)
    p.add_argument("--rule", choices=RULES, default="product")
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--strict-spec", action="store_true")
    p.add_argument("--tcl", action="store_true", help="also write a prove.tcl stub next to the report")
    return ap


def _prepare_out(path: str | None, is_dir: bool = False) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    try:
        if is_dir:
            p.mkdir(parents=True, exist_ok=True)
            probe = p / ".fpvkit-write-test"
            probe.write_text("")
            probe.unlink()
        else:
            p.parent.mkdir(parents=True, exist_ok=True)
            p.touch()
    except OSError as exc:
        raise InputError(f"cannot write output {path}: {exc}") from None
    return p


def _load_model(args):
    path = Path(args.model)
    if not path.is_file():
        raise InputError(f"model file not found: {path}")
    try:
        return load_model(path, complete_selfloop=args.complete_selfloop)
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_props(args, m):
    props = []
    for name in args.props:
        path = Path(name)
        if not path.is_file():
            raise InputError(f"property file not found: {path}")
        try:
            loaded = load_properties(path)
        except ParseError as exc:
            raise InputError(f"{path}: {exc}") from None
        for p in loaded:
            try:
                m.check_signals(p.formula)
                if p.disable is not None:
                    m.check_signals(p.disable)
            except ModelError as exc:
                raise InputError(f"{path}: property {p.name}: {exc}") from None
        props.extend(loaded)
    if not props:
        raise InputError("no properties found")
    return props


def _emit(args, text: str, out: Path | None) -> None:
    sys.stdout.write(text)
    if out is not None:
        out.write_text(text, encoding="utf-8")


def cmd_check(args) -> int:
    out = _prepare_out(args.out)
    m = _load_model(args)
    props = _load_props(args, m)
    rows, lines, ok = [], [], True
    for p in props:
        v = check(m, p.formula, p.assumption)
        row = {"name": p.name, "formula": pretty_print(p.formula), "holds": v.holds}
        lines.append(f"{p.name}: {'proved' if v.holds else 'failed'}")
        if not v.holds:
            ok = False
            table = render_lasso(m, v.counterexample, trace_signals(m, p.formula))
            row["counterexample"] = table
            row["digest"] = lasso_digest(table)
            lines += ["  " + ln for ln in table.rstrip("\n").splitlines()]
        rows.append(row)
    text = json.dumps(rows, indent=2) + "\n" if args.json else "\n".join(lines) + "\n"
    _emit(args, text, out)
    return EXIT_OK if ok else EXIT_BUGS


def _occurrence_table(rep) -> list[str]:
    if not rep.results:
        return []
    head = ("subformula", "polarity", "affects", "sat[true]", "sat[false]")
    rows = [(str(r.subformula), ",".join(o.polarity.value for o in r.occurrences),
             str(r.affects), str(r.sat_true), str(r.sat_false)) for r in rep.results]
    widths = [max(len(x[i]) for x in [head] + rows) for i in range(len(head))]
    fmt = lambda row: "  " + "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
    return [fmt(head)] + [fmt(r) for r in rows]


def cmd_vacuity(args) -> int:
    out = _prepare_out(args.out)
    m = _load_model(args)
    props = _load_props(args, m)
    lines, rows, ok = [], [], True
    for p in props:
        rep = check_vacuity(m, p.formula, args.mode, p.assumption)
        rows.append(dict(rep.to_dict(), name=p.name))
        if rep.verdict == "fails":
            lines.append(f"{p.name}: Fails (vacuity undefined)")
            ok = False
            continue
        lines.append(f"{p.name}: Non-Vacuous: {rep.non_vacuous}")
        lines += _occurrence_table(rep)
        ok = ok and rep.non_vacuous
    text = json.dumps(rows, indent=2) + "\n" if args.json else "\n".join(lines) + "\n"
    _emit(args, text, out)
    return EXIT_OK if ok else EXIT_BUGS


def cmd_coverage(args) -> int:
    out = _prepare_out(args.out)
    m = _load_model(args)
    props = _load_props(args, m)
    try:
        rep = coverage_report(m, props, args.rule)
    except CoverageError as exc:
        raise InputError(str(exc)) from None
    text = json.dumps(rep.to_dict(), indent=2) + "\n" if args.json else render_table([(m.name, rep)])
    _emit(args, text, out)
    return EXIT_OK


def _tcl_stub(report) -> str:
    lines = ["# prove script stub; adjust design loading for your flow",
             "analyze -sv09 assertions.sva", "elaborate", "clock clk"]
    lines += [f"prove -property {{*{r['name']}}}" for r in report.body["records"] if r["sva"]]
    return "\n".join(lines) + "\n"


def cmd_pipeline(args) -> int:
    from .pipeline import (ProviderConfig, ProviderExhausted, RunConfig, SpecError, ingest_spec, load_corpus,
                           run_pipeline, write_report)

    out = _prepare_out(args.out or "fpvkit-run", is_dir=True)
    m = _load_model(args)
    if not Path(args.spec).is_file():
        raise InputError(f"spec file not found: {args.spec}")
    try:
        spec = ingest_spec(args.spec, strict=args.strict_spec)
        pc = ProviderConfig.load(args.config) if args.config else ProviderConfig()
        if args.provider:
            pc.kind = args.provider
        if args.transcript:
            pc.transcript = args.transcript
        if pc.kind == "replay" and pc.transcript and not Path(pc.transcript).is_file():
            raise InputError(f"transcript not found: {pc.transcript}")
        provider = pc.build()
        config = RunConfig(threshold=args.threshold, max_iter=args.max_iter, mode=args.mode, rule=args.rule,
                           top_k=args.top_k, attempts=pc.attempts, base_delay=pc.base_delay, params=pc.params())
    except (SpecError, ValueError, OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from None
    corpus = load_corpus(args.docs)
    try:
        report = run_pipeline(spec, m, provider, config, corpus)
    except ProviderExhausted as exc:
        raise InputError(str(exc)) from None
    write_report(report, out)
    sva = "\n".join(r["sva"] for r in report.body["records"] if r["status"] in ("proved", "failed", "sva-correct"))
    (out / "assertions.sva").write_text(sva, encoding="utf-8")
    if args.tcl:
        (out / "prove.tcl").write_text(_tcl_stub(report), encoding="utf-8")
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    if report.bugs:
        return EXIT_BUGS
    if not report.threshold_met:
        return EXIT_THRESHOLD
    return EXIT_OK


COMMANDS = {"check": cmd_check, "vacuity": cmd_vacuity, "coverage": cmd_coverage, "pipeline": cmd_pipeline}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
