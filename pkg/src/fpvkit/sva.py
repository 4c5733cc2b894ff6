"""SVA property blocks: emission and property files."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .formula import ALWAYS, ATOM, Always, Formula, Not
from .parser import ParseError, parse_blocks, parse_formula, block_formula
from .printer import pretty_print, render_sva_body


@dataclass(frozen=True)
class SvaText:
    name: str
    clock: str
    disable: str | None
    body: str
    text: str


@dataclass(frozen=True)
class SvaProperty:
    """One property read from a file.

    ``formula`` is the full temporal meaning (an ordinary assertion is
    wrapped in ``G``).  ``assumption`` is the path constraint derived from
    ``disable iff``: the disable condition never holds.
    """

    name: str
    formula: Formula
    clock: str | None = None
    disable: Formula | None = None
    source: str = ""

    @property
    def assumption(self) -> Formula | None:
        if self.disable is None:
            return None
        return Always(Not(self.disable))


def emit_sva(f: Formula, name: str, clock: str = "clk", disable: str | Formula | None = "rst") -> SvaText:
    """Render *f* as a clocked SVA assertion.

    A top-level ``G`` becomes the implicit every-cycle check of
    ``assert property``; anything else is emitted as an ``initial``
    assertion so that re-parsing gives back the same formula.
    """
    if f.kind == ALWAYS:
        body, prefix = render_sva_body(f.children[0]), ""
    else:
        body, prefix = render_sva_body(f), "initial "
    if isinstance(disable, Formula):
        disable_text = pretty_print(disable) if disable.kind != ATOM else disable.name
    else:
        disable_text = disable
    header = f"  @(posedge {clock})"
    if disable_text:
        header += f" disable iff ({disable_text})"
    text = (
        f"property {name};\n"
        f"{header}\n"
        f"  {body};\n"
        f"endproperty\n"
        f"{prefix}assert property ({name});\n"
    )
    return SvaText(name, clock, disable_text, body, text)


_HAS_BLOCK = re.compile(r"(^|[\s;])property\s+[A-Za-z_]")


def parse_property_text(text: str) -> list[SvaProperty]:
    """Read every property in *text*.

    Files made of ``property ... endproperty`` blocks are parsed as SVA;
    otherwise each non-blank line is a bare formula, optionally prefixed
    with ``name:``.
    """
    if _HAS_BLOCK.search(_strip_comments(text)):
        out = []
        for b in parse_blocks(text):
            out.append(SvaProperty(b.name, block_formula(b), b.clock, b.disable, _block_source(text, b.name)))
        return out
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comments(raw).strip()
        if not line:
            continue
        name = f"prop_{len(out)}"
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$", line)
        if m and m.group(1) not in ("G", "F", "X"):
            name, line = m.group(1), m.group(2)
        try:
            f = parse_formula(line)
        except ParseError as exc:
            raise ParseError(exc.message, lineno, exc.column, exc.token) from None
        out.append(SvaProperty(name, f, source=line))
    return out


def load_properties(path: str | Path) -> list[SvaProperty]:
    return parse_property_text(Path(path).read_text(encoding="utf-8"))


def _strip_comments(text: str) -> str:
    return re.sub(r"//[^\n]*|--(?=\s|$)[^\n]*", "", text)


def _block_source(text: str, name: str) -> str:
    m = re.search(rf"property\s+{re.escape(name)}\s*;.*?endproperty[^\n]*(?:\n[^\n]*assert\s+property[^\n]*)?",
                  text, re.S)
    return m.group(0).strip() if m else ""
