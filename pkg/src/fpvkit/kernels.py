"""Backend selection for the search kernels.

The compiled module is used when it was built and importable; setting
``FPVKIT_PURE_PYTHON=1`` forces the pure-Python implementation.  Inputs
the compiled kernel cannot represent (more than 64 distinct literals,
very large products) go to the Python kernel regardless.
"""
from __future__ import annotations

import os
from array import array

from . import _pykernels

_compiled = None
if os.environ.get("FPVKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
FOUND, EMPTY, LIMIT = _pykernels.FOUND, _pykernels.EMPTY, _pykernels.LIMIT

# dense visited arrays above this many product nodes are not worth allocating
_DENSE_MAX = 1 << 27


def csr(succ) -> tuple[array, array]:
    ptr = array("i", [0])
    idx = array("i")
    for row in succ:
        idx.extend(row)
        ptr.append(len(idx))
    return ptr, idx


def reachable(succ, init, backend: str | None = None) -> list[int]:
    ptr, idx = csr(succ)
    init_a = array("i", sorted(set(init)))
    if _use_compiled(backend):
        return _compiled.reachable(ptr, idx, init_a)
    return _pykernels.reachable(ptr, idx, init_a)


def _use_compiled(backend: str | None) -> bool:
    if backend == "python":
        return False
    if backend == "compiled" and _compiled is None:
        raise RuntimeError("compiled kernels are not available")
    return _compiled is not None


def nested_dfs(m_ptr, m_idx, m_init, m_mask, a_ptr, a_idx, a_init, a_pos, a_neg, a_acc, limit,
               backend: str | None = None):
    S, Q = len(m_ptr) - 1, len(a_ptr) - 1
    wide = any(x >> 64 for x in m_mask) or any(x >> 64 for x in a_pos) or any(x >> 64 for x in a_neg)
    if _use_compiled(backend) and not wide and S * Q <= _DENSE_MAX:
        return _compiled.nested_dfs(
            m_ptr, m_idx, array("i", m_init), array("Q", m_mask), a_ptr, a_idx, array("i", a_init),
            array("Q", a_pos), array("Q", a_neg), bytes(a_acc), limit)
    return _pykernels.nested_dfs(m_ptr, m_idx, list(m_init), list(m_mask), a_ptr, a_idx, list(a_init),
                                 list(a_pos), list(a_neg), bytes(a_acc), limit)
