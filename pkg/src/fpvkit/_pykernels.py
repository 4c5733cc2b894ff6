"""Pure-Python search kernels.

Graphs arrive in compressed sparse row form: successors of node ``v``
are ``idx[ptr[v]:ptr[v + 1]]``, already in ascending order.  Product
nodes are numbered ``s * Q + q`` for model state ``s`` and automaton
state ``q``.  The compiled module ``_kernels`` implements the same
functions with the same visiting order.
"""
from __future__ import annotations

from collections import deque

FOUND = 1
EMPTY = 0
LIMIT = -1


def reachable(ptr, idx, init) -> list[int]:
    n = len(ptr) - 1
    seen = bytearray(n)
    queue = deque()
    for s in init:
        if not seen[s]:
            seen[s] = 1
            queue.append(s)
    while queue:
        s = queue.popleft()
        for j in range(ptr[s], ptr[s + 1]):
            t = idx[j]
            if not seen[t]:
                seen[t] = 1
                queue.append(t)
    return [s for s in range(n) if seen[s]]


def nested_dfs(m_ptr, m_idx, m_init, m_mask, a_ptr, a_idx, a_init, a_pos, a_neg, a_acc, limit):
    """Search the product for a reachable accepting cycle.

    Returns ``(status, stem, loop, explored)`` where status is FOUND,
    EMPTY or LIMIT and stem/loop are product node ids.
    """
    Q = len(a_ptr) - 1

    def admits(t: int, r: int) -> bool:
        mask = m_mask[t]
        pos = a_pos[r]
        return (mask & pos) == pos and not (mask & a_neg[r])

    def successors(node: int):
        s, q = divmod(node, Q)
        for j in range(m_ptr[s], m_ptr[s + 1]):
            t = m_idx[j]
            for k in range(a_ptr[q], a_ptr[q + 1]):
                r = a_idx[k]
                if admits(t, r):
                    yield t * Q + r

    visited: set[int] = set()
    inner_seen: set[int] = set()
    on_stack: dict[int, int] = {}  # node -> position on the outer stack
    explored = 0

    def inner(seed: int):
        inner_seen.add(seed)
        path = [seed]
        gens = [successors(seed)]
        while gens:
            for t in gens[-1]:
                if t in on_stack:
                    return path, t
                if t not in inner_seen:
                    inner_seen.add(t)
                    path.append(t)
                    gens.append(successors(t))
                    break
            else:
                gens.pop()
                path.pop()
        return None

    for s in m_init:
        for q in a_init:
            if not admits(s, q):
                continue
            root = s * Q + q
            if root in visited:
                continue
            visited.add(root)
            explored += 1
            if explored > limit:
                return LIMIT, [], [], explored
            stack = [root]
            on_stack[root] = 0
            gens = [successors(root)]
            while gens:
                advanced = False
                for t in gens[-1]:
                    if t not in visited:
                        visited.add(t)
                        explored += 1
                        if explored > limit:
                            return LIMIT, [], [], explored
                        on_stack[t] = len(stack)
                        stack.append(t)
                        gens.append(successors(t))
                        advanced = True
                        break
                if advanced:
                    continue
                node = stack[-1]
                if a_acc[node % Q]:
                    hit = inner(node)
                    if hit is not None:
                        path, t = hit
                        j = on_stack[t]
                        return FOUND, stack[:j], stack[j:] + path[1:], explored
                gens.pop()
                stack.pop()
                del on_stack[node]
    return EMPTY, [], [], explored
