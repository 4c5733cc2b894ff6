# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; same contract and visiting order as ``_pykernels``."""

from libc.stdlib cimport malloc, realloc, free, calloc
from libc.stdint cimport uint64_t, int64_t, int32_t

FOUND = 1
EMPTY = 0
LIMIT = -1


def reachable(const int32_t[:] ptr, const int32_t[:] idx, const int32_t[:] init):
    cdef Py_ssize_t n = ptr.shape[0] - 1
    cdef char* seen = <char*> calloc(n if n > 0 else 1, 1)
    cdef int32_t* queue = <int32_t*> malloc((n if n > 0 else 1) * sizeof(int32_t))
    cdef Py_ssize_t head = 0, tail = 0, i, j
    cdef int32_t s, t
    if seen == NULL or queue == NULL:
        free(seen)
        free(queue)
        raise MemoryError()
    try:
        for i in range(init.shape[0]):
            s = init[i]
            if not seen[s]:
                seen[s] = 1
                queue[tail] = s
                tail += 1
        while head < tail:
            s = queue[head]
            head += 1
            for j in range(ptr[s], ptr[s + 1]):
                t = idx[j]
                if not seen[t]:
                    seen[t] = 1
                    queue[tail] = t
                    tail += 1
        return [i for i in range(n) if seen[i]]
    finally:
        free(seen)
        free(queue)


cdef struct Frame:
    int64_t node
    int32_t j
    int32_t k


cdef struct Stack:
    Frame* data
    Py_ssize_t size
    Py_ssize_t cap


cdef int push(Stack* st, int64_t node, int32_t j, int32_t k) except -1:
    cdef Frame* grown
    if st.size == st.cap:
        st.cap = st.cap * 2 if st.cap else 256
        grown = <Frame*> realloc(st.data, st.cap * sizeof(Frame))
        if grown == NULL:
            raise MemoryError()
        st.data = grown
    st.data[st.size].node = node
    st.data[st.size].j = j
    st.data[st.size].k = k
    st.size += 1
    return 0


cdef class _Product:
    cdef const int32_t[:] m_ptr
    cdef const int32_t[:] m_idx
    cdef const uint64_t[:] m_mask
    cdef const int32_t[:] a_ptr
    cdef const int32_t[:] a_idx
    cdef const uint64_t[:] a_pos
    cdef const uint64_t[:] a_neg
    cdef int64_t Q

    cdef inline bint admits(self, int32_t t, int32_t r) nogil:
        cdef uint64_t mask = self.m_mask[t]
        return (mask & self.a_pos[r]) == self.a_pos[r] and (mask & self.a_neg[r]) == 0

    cdef inline void start(self, Frame* f, int64_t node) nogil:
        f.node = node
        f.j = self.m_ptr[node // self.Q]
        f.k = self.a_ptr[node % self.Q]

    cdef inline int64_t next_succ(self, Frame* f) nogil:
        cdef int64_t s = f.node // self.Q
        cdef int64_t q = f.node % self.Q
        cdef int32_t t, r
        while f.j < self.m_ptr[s + 1]:
            t = self.m_idx[f.j]
            while f.k < self.a_ptr[q + 1]:
                r = self.a_idx[f.k]
                f.k += 1
                if self.admits(t, r):
                    return t * self.Q + r
            f.j += 1
            f.k = self.a_ptr[q]
        return -1


def nested_dfs(const int32_t[:] m_ptr, const int32_t[:] m_idx, const int32_t[:] m_init,
               const uint64_t[:] m_mask, const int32_t[:] a_ptr, const int32_t[:] a_idx,
               const int32_t[:] a_init, const uint64_t[:] a_pos, const uint64_t[:] a_neg,
               const unsigned char[:] a_acc, int64_t limit):
    cdef _Product P = _Product()
    P.m_ptr = m_ptr
    P.m_idx = m_idx
    P.m_mask = m_mask
    P.a_ptr = a_ptr
    P.a_idx = a_idx
    P.a_pos = a_pos
    P.a_neg = a_neg
    P.Q = a_ptr.shape[0] - 1
    cdef int64_t Q = P.Q
    cdef int64_t S = m_ptr.shape[0] - 1
    cdef int64_t N = S * Q
    cdef char* visited = <char*> calloc(N if N > 0 else 1, 1)
    cdef char* inner_seen = <char*> calloc(N if N > 0 else 1, 1)
    # position on the outer stack plus one; zero when not on it
    cdef int64_t* on_stack = <int64_t*> calloc(N if N > 0 else 1, sizeof(int64_t))
    cdef Stack outer
    cdef Stack inner
    outer.data = NULL
    outer.size = outer.cap = 0
    inner.data = NULL
    inner.size = inner.cap = 0
    cdef int64_t explored = 0, root, t, node, u
    cdef Py_ssize_t a, b, j, i
    cdef bint advanced
    if visited == NULL or inner_seen == NULL or on_stack == NULL:
        free(visited)
        free(inner_seen)
        free(on_stack)
        raise MemoryError()
    try:
        for a in range(m_init.shape[0]):
            for b in range(a_init.shape[0]):
                if not P.admits(m_init[a], a_init[b]):
                    continue
                root = m_init[a] * Q + a_init[b]
                if visited[root]:
                    continue
                visited[root] = 1
                explored += 1
                if explored > limit:
                    return LIMIT, [], [], explored
                push(&outer, root, 0, 0)
                P.start(&outer.data[outer.size - 1], root)
                on_stack[root] = outer.size
                while outer.size:
                    advanced = False
                    while True:
                        t = P.next_succ(&outer.data[outer.size - 1])
                        if t < 0:
                            break
                        if not visited[t]:
                            visited[t] = 1
                            explored += 1
                            if explored > limit:
                                return LIMIT, [], [], explored
                            push(&outer, t, 0, 0)
                            P.start(&outer.data[outer.size - 1], t)
                            on_stack[t] = outer.size
                            advanced = True
                            break
                    if advanced:
                        continue
                    node = outer.data[outer.size - 1].node
                    if a_acc[node % Q]:
                        inner.size = 0
                        inner_seen[node] = 1
                        push(&inner, node, 0, 0)
                        P.start(&inner.data[0], node)
                        while inner.size:
                            u = P.next_succ(&inner.data[inner.size - 1])
                            if u < 0:
                                inner.size -= 1
                                continue
                            if on_stack[u]:
                                j = on_stack[u] - 1
                                stem = [outer.data[i].node for i in range(j)]
                                loop = [outer.data[i].node for i in range(j, outer.size)]
                                loop.extend(inner.data[i].node for i in range(1, inner.size))
                                return FOUND, stem, loop, explored
                            if not inner_seen[u]:
                                inner_seen[u] = 1
                                push(&inner, u, 0, 0)
                                P.start(&inner.data[inner.size - 1], u)
                    on_stack[node] = 0
                    outer.size -= 1
        return EMPTY, [], [], explored
    finally:
        free(visited)
        free(inner_seen)
        free(on_stack)
        free(outer.data)
        free(inner.data)
