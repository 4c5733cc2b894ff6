"""Pull candidate assertions out of free-form responses.

Recognized: fenced code blocks (several ``property`` blocks in one fence
are split apart) and bare ``property ... endproperty`` spans outside
fences, each with its trailing ``assert property`` line.  Everything
else is ignored.
"""
from __future__ import annotations

import re

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.S)
_PROPERTY_SPAN = re.compile(
    r"\bproperty\s+[A-Za-z_]\w*\s*;.*?\bendproperty\b[^\n]*(?:\s*(?:initial\s+)?assert\s+property\s*\([^)]*\)\s*;)?",
    re.S,
)


def _split_fence(body: str) -> list[str]:
    spans = [m.group(0).strip() for m in _PROPERTY_SPAN.finditer(body)]
    if len(spans) >= 2:
        return spans
    body = body.strip()
    return [body] if body else []


def extract_blocks(response: str) -> list[str]:
    """Candidate assertion texts in document order."""
    found: list[tuple[int, str]] = []
    last = 0
    for m in _FENCE.finditer(response):
        found.extend((last + b.start(), b.group(0).strip())
                     for b in _PROPERTY_SPAN.finditer(response[last:m.start()]))
        found.extend((m.start(), text) for text in _split_fence(m.group(1)))
        last = m.end()
    # text after the last closed fence (including an unterminated fence) is scanned for bare spans
    found.extend((last + b.start(), b.group(0).strip()) for b in _PROPERTY_SPAN.finditer(response[last:]))
    return [text for _, text in sorted(found, key=lambda pt: pt[0])]
