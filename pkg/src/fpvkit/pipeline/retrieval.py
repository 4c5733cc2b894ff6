"""Lexical retrieval over design documents.

Documents are cut into overlapping word windows.  A chunk's score for a
query is the sum, over distinct query terms, of the term's count in the
chunk times ``log(1 + N / df)``.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs; ``rx_parity_err`` yields rx, parity, err."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Chunk:
    id: int
    source: str
    text: str

    @property
    def terms(self) -> Counter:
        return Counter(tokenize(self.text))


def chunk_text(source: str, text: str, size: int = 64, overlap: int = 16, start_id: int = 0) -> list[Chunk]:
    if size <= 0 or not 0 <= overlap < size:
        raise ValueError("need size > 0 and 0 <= overlap < size")
    words = text.split()
    out = []
    step = size - overlap
    i = 0
    while i < len(words):
        out.append(Chunk(start_id + len(out), source, " ".join(words[i:i + size])))
        if i + size >= len(words):
            break
        i += step
    return out


def build_corpus(docs: dict[str, str] | Iterable[tuple[str, str]], size: int = 64, overlap: int = 16) -> list[Chunk]:
    """Chunks for every document, numbered in document-name order."""
    items = sorted(docs.items()) if isinstance(docs, dict) else sorted(docs)
    chunks: list[Chunk] = []
    for name, text in items:
        chunks.extend(chunk_text(name, text, size, overlap, start_id=len(chunks)))
    return chunks


def load_corpus(directory: str | Path | None, size: int = 64, overlap: int = 16) -> list[Chunk]:
    if directory is None:
        return []
    root = Path(directory)
    if not root.is_dir():
        return []
    docs = {p.name: p.read_text(encoding="utf-8") for p in sorted(root.iterdir())
            if p.suffix in (".md", ".txt") and p.is_file()}
    return build_corpus(docs, size, overlap)


def score_chunks(chunks: list[Chunk], query: str) -> list[float]:
    q = sorted(set(tokenize(query)))
    n = len(chunks)
    tfs = [c.terms for c in chunks]
    df = {t: sum(1 for tf in tfs if t in tf) for t in q}
    out = []
    for tf in tfs:
        s = 0.0
        for t in q:
            if tf[t]:
                s += tf[t] * math.log(1 + n / df[t])
        out.append(s)
    return out


def retrieve_context(chunks: list[Chunk], query: str, k: int = 3) -> list[tuple[Chunk, float]]:
    """Top-*k* chunks by score; equal scores keep chunk-id order."""
    if not chunks or k <= 0:
        return []
    scores = score_chunks(chunks, query)
    ranked = sorted(zip(chunks, scores), key=lambda cs: (-cs[1], cs[0].id))
    return ranked[:k]
