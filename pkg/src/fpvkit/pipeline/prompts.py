"""Prompt templates and the refinement prompt database."""
from __future__ import annotations

import hashlib
import json
import re
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

STAGES = ("system-setup", "vacuity-rules", "vacuity-eval", "cex-analysis", "sva-fix",
          "refinement", "spec-extraction", "generate")

_TEMPLATE_FILES = {
    "system-setup": "system_setup.txt",
    "vacuity-rules": "vacuity_rules.txt",
    "vacuity-eval": "vacuity_eval.txt",
    "cex-analysis": "cex_analysis.txt",
    "sva-fix": "sva_fix.txt",
    "refinement": "refinement.txt",
    "spec-extraction": "spec_extraction.txt",
    "generate": "generate.txt",
}

DEFAULT_EXAMPLES = """```systemverilog
property p_example_handshake;
  @(posedge clk) disable iff (rst)
  req |=> ack;
endproperty
assert property (p_example_handshake);
```"""


class PromptError(ValueError):
    pass


def _read_package_text(name: str) -> str:
    return resources.files("fpvkit.pipeline").joinpath(name).read_text(encoding="utf-8")


def load_template(stage: str, template_dir: str | Path | None = None) -> str:
    if stage not in _TEMPLATE_FILES:
        raise PromptError(f"no template for stage {stage!r}")
    fname = _TEMPLATE_FILES[stage]
    if template_dir is not None:
        p = Path(template_dir) / fname
        if p.is_file():
            return p.read_text(encoding="utf-8")
    return _read_package_text(f"templates/{fname}")


def vacuity_theorems() -> str:
    return _read_package_text("templates/vacuity_theorems.txt").strip()


@dataclass(frozen=True)
class Prompt:
    stage: str
    text: str
    attachments: tuple[str, ...] = ()

    @property
    def hash(self) -> str:
        return prompt_hash(self.text)

    @property
    def id(self) -> str:
        return f"{self.stage}:{self.hash[:12]}"


def prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# -- refinement database ------------------------------------------------------------

@dataclass(frozen=True)
class DatabaseEntry:
    tag: str
    text: str


_ENTRY = re.compile(r"^\[(?P<tag>[a-z-]+)\]\s*(?P<text>.+?)\s*$")


@dataclass
class PromptDatabase:
    """Refinement prompts visited round-robin in file order.

    ``next_entry`` skips an entry whose tag names no category present in
    the uncovered design state; with no categories given nothing is
    skipped.
    """

    entries: list[DatabaseEntry]
    cursor: int = 0
    used: list[int] = field(default_factory=list)

    @classmethod
    def parse(cls, text: str) -> "PromptDatabase":
        entries = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#") or line.endswith(":"):
                continue
            m = _ENTRY.match(line)
            if m is None:
                raise PromptError(f"prompt database line {lineno}: expected '[tag] text'")
            entries.append(DatabaseEntry(m.group("tag"), m.group("text").strip('"')))
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "PromptDatabase":
        if path is None:
            return cls.parse(_read_package_text("prompt_database.txt"))
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def next_entry(self, categories: Iterable[str] | None = None) -> DatabaseEntry | None:
        cats = None if categories is None else set(categories)
        n = len(self.entries)
        for step in range(n):
            i = (self.cursor + step) % n
            e = self.entries[i]
            if cats is None or e.tag in cats:
                self.cursor = (i + 1) % n
                self.used.append(i)
                return e
        return None


# -- rendering -----------------------------------------------------------------------

def _fields(template: str) -> list[str]:
    return [f for _, f, _, _ in string.Formatter().parse(template) if f]


def render(template: str, values: dict) -> str:
    missing = [f for f in _fields(template) if f not in values]
    if missing:
        raise PromptError(f"missing substitution(s): {', '.join(sorted(set(missing)))}")
    return template.format(**{k: values[k] for k in _fields(template)})


def _format_context(context) -> tuple[str, tuple[str, ...]]:
    items = []
    for c in context or ():
        chunk = c[0] if isinstance(c, tuple) else c
        text = getattr(chunk, "text", str(chunk))
        source = getattr(chunk, "source", "")
        items.append(f"[{source}#{getattr(chunk, 'id', '')}] {text}" if source else text)
    if not items:
        return "(none)", ()
    return "\n".join(f"- {t}" for t in items), tuple(items)


def build_prompt(stage: str, spec_view: dict | None = None, context=(), extras: dict | None = None,
                 database: PromptDatabase | None = None, template_dir: str | Path | None = None) -> Prompt:
    """Render *stage*'s template.  Identical inputs give byte-identical text."""
    if stage not in STAGES:
        raise PromptError(f"unknown stage {stage!r}")
    extras = dict(extras or {})
    values: dict = {}
    ctx_text, attachments = _format_context(context)
    values["context"] = ctx_text
    if spec_view is not None:
        ip = spec_view.get("ip", {})
        soc = spec_view.get("soc", {})
        values.update({
            "spec_view": json.dumps(spec_view, indent=2, sort_keys=True),
            "ip_name": ip.get("NAME", ""),
            "ip_type": ip.get("TYPE", ""),
            "ip_operation": ip.get("OPERATION", ""),
            "soc_name": soc.get("NAME", ""),
            "bus": soc.get("BUS", ""),
            "target": ip.get("NAME", ""),
        })
    if stage == "vacuity-rules":
        values.setdefault("rules", vacuity_theorems())
    if stage == "generate":
        values["system"] = load_template("system-setup", template_dir).strip()
        rules_values = {"rules": vacuity_theorems(), "target": values.get("target", "the design")}
        rules_values.update({k: v for k, v in extras.items() if k in ("rules", "target")})
        values["vacuity"] = render(load_template("vacuity-rules", template_dir), rules_values).strip()
        values.setdefault("examples", DEFAULT_EXAMPLES)
        values.setdefault("clock", "clk")
        threat = extras.pop("threat_model", None)
        values["threats"] = f"Threat model and security objectives:\n{threat}\n\n" if threat else ""
    if stage == "refinement" and "entry" not in extras:
        if database is None:
            raise PromptError("refinement prompts need a prompt database entry")
        entry = database.next_entry(extras.pop("categories", None))
        if entry is None:
            raise PromptError("no applicable refinement prompt left in the database")
        extras["entry"] = entry.text
    extras.pop("categories", None)
    values.update(extras)
    text = render(load_template(stage, template_dir), values)
    return Prompt(stage, text, attachments)
