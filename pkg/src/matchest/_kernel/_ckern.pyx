# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled query kernels: CSR-backed twins of `_pykern`.

Same algorithms, same seeded draw sequences, same probe accounting; only
the data layout differs (CSR arrays instead of adapter objects).  Parity
with the pure implementation is pinned by tests/test_kernel_parity.py.
"""

from cython.operator cimport dereference, preincrement
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libcpp.algorithm cimport sort as cpp_sort
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

import numpy as np

from matchest.rng import RankCollisionError

ctypedef pair[uint64_t, int64_t] RankedEdge
ctypedef vector[RankedEdge] RankedVec

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15


cdef inline uint64_t mix64(uint64_t x) noexcept nogil:
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


cdef inline uint64_t derive2(uint64_t seed, uint64_t tag) noexcept nogil:
    # matches rng.derive_seed(seed, tag)
    return mix64(mix64(seed) + GOLDEN + tag)


cdef inline uint64_t stream_next(uint64_t* state) noexcept nogil:
    state[0] = state[0] + GOLDEN
    return mix64(state[0])


cdef inline uint64_t ekey(uint64_t a, uint64_t b) noexcept nogil:
    if a < b:
        return (a << 32) | b
    return (b << 32) | a


cdef inline int64_t degree_probe_count(int64_t n, int64_t deg) noexcept nogil:
    # probe count of the counted binary search in graph.degree_via_binary_search
    cdef int64_t lo = 0, hi = n, mid, cnt = 0
    while lo < hi:
        mid = (lo + hi) // 2
        cnt += 1
        if mid >= deg:
            hi = mid
        else:
            lo = mid + 1
    return cnt


cdef inline bint csr_has_edge(const int64_t[::1] indptr,
                              const int64_t[::1] srt,
                              int64_t u, int64_t v) noexcept nogil:
    cdef int64_t lo = indptr[u], hi = indptr[u + 1], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if srt[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and srt[lo] == v


def kernel_name():
    return "compiled"


def mix64_py(x):
    """Exposed for parity tests against matchest.rng.mix64."""
    return int(mix64(<uint64_t>(x & 0xFFFFFFFFFFFFFFFF)))


# ---------------------------------------------------------------------------
# sparsification
# ---------------------------------------------------------------------------

def sparsify_list(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const int64_t[::1] order, int64_t c, uint64_t seed,
                  int64_t[::1] pv_probes, int64_t[::1] totals):
    """CSR twin of _pykern.sparsify_list; returns the partner array."""
    cdef int64_t n = indptr.shape[0] - 1
    partner_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] partner = partner_arr
    cdef int64_t oi, v, d, t, x, cnt
    cdef uint64_t st
    with nogil:
        for oi in range(order.shape[0]):
            v = order[oi]
            if partner[v] >= 0:
                continue
            d = indptr[v + 1] - indptr[v]
            cnt = degree_probe_count(n, d)
            pv_probes[v] += cnt
            totals[0] += cnt
            if d == 0:
                continue
            st = derive2(seed, <uint64_t>v)
            for t in range(c):
                x = indices[indptr[v] + <int64_t>(stream_next(&st) % <uint64_t>d)]
                pv_probes[v] += 1
                totals[0] += 1
                if partner[x] < 0:
                    partner[v] = x
                    partner[x] = v
                    break
    return partner_arr


def sparsify_matrix(const int64_t[::1] indptr, const int64_t[::1] srt,
                    int64_t n, int64_t unit_size, int64_t c, uint64_t seed,
                    int64_t[::1] totals):
    """Twin of _pykern.sparsify_matrix over the matrix-backed auxiliary graph.

    Processes secondary copies [n, 2n) first, then primary copies [0, n).
    Returns the partner array over the 2n copy vertices (unit-set partners
    are encoded by their virtual id).  Each sample costs <= 1 matrix probe.
    """
    cdef int64_t core = 2 * n
    partner_arr = np.full(core, -1, dtype=np.int64)
    cdef int64_t[::1] partner = partner_arr
    cdef int64_t pos, vid, d, t, x, base, cand
    cdef uint64_t st, draw
    cdef bint edge, x_matched
    with nogil:
        for pos in range(core):
            vid = n + pos if pos < n else pos - n
            if partner[vid] >= 0:
                continue
            d = n + unit_size if vid >= n else n
            if d == 0:
                continue
            st = derive2(seed, <uint64_t>vid)
            for t in range(c):
                draw = stream_next(&st) % <uint64_t>d
                if vid >= n and <int64_t>draw >= n:
                    # unit-set slot: zero probes, owner is vid itself
                    x = core + (vid - n) * unit_size + (<int64_t>draw - n)
                    x_matched = partner[n + (x - core) // unit_size] == x
                else:
                    base = vid if vid < n else vid - n
                    cand = <int64_t>draw
                    totals[1] += 1
                    edge = base != cand and csr_has_edge(indptr, srt, base, cand)
                    if vid < n:
                        x = cand if edge else n + cand
                    else:
                        x = n + cand if edge else cand
                    x_matched = partner[x] >= 0
                if not x_matched:
                    partner[vid] = x
                    if x < core:
                        partner[x] = vid
                    break
    return partner_arr


# ---------------------------------------------------------------------------
# lazy greedy-matching oracle
# ---------------------------------------------------------------------------

cdef class RgmmOracle:
    """CSR twin of _pykern.RgmmOracle (see there for the algorithm)."""

    cdef const int64_t[::1] indptr
    cdef const int64_t[::1] indices
    cdef int64_t n
    cdef uint8_t[::1] mask
    cdef bint has_mask
    cdef uint64_t rank_mixed
    cdef uint64_t seed_enum
    cdef int64_t tau_log
    cdef int64_t[::1] pv_probes
    cdef int64_t[::1] pv_visits
    cdef int64_t[::1] totals
    cdef unordered_map[int64_t, RankedVec] incident_map
    cdef unordered_map[uint64_t, char] edge_memo
    cdef unordered_map[int64_t, int64_t] partner_map

    def __init__(self, const int64_t[::1] indptr, const int64_t[::1] indices,
                 uint64_t seed_rank, uint64_t seed_enum,
                 int64_t[::1] pv_probes, int64_t[::1] pv_visits,
                 int64_t[::1] totals, mask=None, int64_t tau_log=1):
        self.indptr = indptr
        self.indices = indices
        self.n = indptr.shape[0] - 1
        self.has_mask = mask is not None
        if self.has_mask:
            self.mask = mask
        self.rank_mixed = mix64(seed_rank)
        self.seed_enum = seed_enum
        self.tau_log = tau_log
        self.pv_probes = pv_probes
        self.pv_visits = pv_visits
        self.totals = totals

    cpdef uint64_t rank_u64(self, int64_t u, int64_t v):
        return mix64(ekey(<uint64_t>u, <uint64_t>v) ^ self.rank_mixed)

    cdef RankedVec* _incident(self, int64_t v) except NULL:
        cdef unordered_map[int64_t, RankedVec].iterator it = self.incident_map.find(v)
        if it != self.incident_map.end():
            return &(dereference(it).second)
        cdef int64_t d = self.indptr[v + 1] - self.indptr[v]
        cdef int64_t cnt = degree_probe_count(self.n, d)
        self.pv_probes[v] += cnt
        self.totals[0] += cnt
        cdef unordered_set[int64_t] seen
        cdef int64_t x, tau, misses
        cdef uint64_t st
        if d > 0:
            st = derive2(self.seed_enum, <uint64_t>v)
            if not self.has_mask:
                while <int64_t>seen.size() < d:
                    self.pv_visits[v] += 1
                    x = self.indices[self.indptr[v] +
                                     <int64_t>(stream_next(&st) % <uint64_t>d)]
                    self.pv_probes[v] += 1
                    self.totals[0] += 1
                    seen.insert(x)
            else:
                tau = 2 * d * self.tau_log + 8
                misses = 0
                while misses < tau:
                    self.pv_visits[v] += 1
                    x = self.indices[self.indptr[v] +
                                     <int64_t>(stream_next(&st) % <uint64_t>d)]
                    self.pv_probes[v] += 1
                    self.totals[0] += 1
                    if self.mask[x] == 0 or seen.count(x):
                        misses += 1
                    else:
                        seen.insert(x)
                        misses = 0
        cdef RankedVec vec
        cdef unordered_set[int64_t].iterator sit = seen.begin()
        while sit != seen.end():
            x = dereference(sit)
            vec.push_back(RankedEdge(self.rank_u64(v, x), x))
            preincrement(sit)
        cpp_sort(vec.begin(), vec.end())
        cdef size_t i
        for i in range(1, vec.size()):
            if vec[i].first == vec[i - 1].first:
                raise RankCollisionError(
                    f"rank collision among edges incident to {v}")
        self.incident_map[v] = vec
        it = self.incident_map.find(v)
        return &(dereference(it).second)

    cdef int _edge(self, int64_t u, int64_t v) except -2:
        cdef uint64_t root = ekey(<uint64_t>u, <uint64_t>v)
        cdef unordered_map[uint64_t, char].iterator mit = self.edge_memo.find(root)
        if mit != self.edge_memo.end():
            return dereference(mit).second
        cdef vector[pair[int64_t, int64_t]] stack
        stack.push_back(pair[int64_t, int64_t](u, v))
        cdef int64_t a, b, w, x
        cdef uint64_t key, r
        cdef int verdict
        cdef bint pushed
        cdef RankedVec* vec
        cdef size_t i
        cdef int side
        while stack.size() > 0:
            a = stack.back().first
            b = stack.back().second
            key = ekey(<uint64_t>a, <uint64_t>b)
            if self.edge_memo.count(key):
                stack.pop_back()
                continue
            r = mix64(key ^ self.rank_mixed)
            verdict = 1
            pushed = False
            for side in range(2):
                w = a if side == 0 else b
                vec = self._incident(w)
                for i in range(vec.size()):
                    if dereference(vec)[i].first >= r:
                        break
                    x = dereference(vec)[i].second
                    mit = self.edge_memo.find(ekey(<uint64_t>w, <uint64_t>x))
                    if mit == self.edge_memo.end():
                        stack.push_back(pair[int64_t, int64_t](w, x))
                        pushed = True
                        break
                    if dereference(mit).second:
                        verdict = 0
                        break
                if pushed or verdict == 0:
                    break
            if pushed:
                continue
            self.edge_memo[key] = <char>verdict
            stack.pop_back()
        return self.edge_memo[root]

    cpdef bint edge_in_matching(self, int64_t u, int64_t v):
        return self._edge(u, v) == 1

    cpdef int64_t partner_of(self, int64_t v) except? -3:
        cdef unordered_map[int64_t, int64_t].iterator it = self.partner_map.find(v)
        if it != self.partner_map.end():
            return dereference(it).second
        cdef int64_t p = -1
        cdef RankedVec* vec = self._incident(v)
        cdef size_t i
        for i in range(vec.size()):
            if self._edge(v, dereference(vec)[i].second) == 1:
                p = dereference(vec)[i].second
                break
        self.partner_map[v] = p
        return p

    cpdef bint matched(self, int64_t v):
        return self.partner_of(v) >= 0


# ---------------------------------------------------------------------------
# lazy b-matching oracle over the capacity-duplicated view
# ---------------------------------------------------------------------------

cdef class BMatchOracle:
    """CSR twin of _pykern.BMatchOracle (see there for the algorithm)."""

    cdef const int64_t[::1] indptr
    cdef const int64_t[::1] indices
    cdef int64_t n
    cdef int64_t copies_a, copies_b, cmax
    cdef uint8_t[::1] side_array
    cdef bint has_side_array
    cdef RgmmOracle side_oracle
    cdef uint8_t[::1] universe
    cdef bint has_universe
    cdef uint64_t rank_mixed
    cdef uint64_t seed_enum
    cdef int64_t tau_log
    cdef int64_t[::1] pv_probes
    cdef int64_t[::1] pv_visits
    cdef int64_t[::1] totals
    cdef unordered_map[int64_t, char] side_memo
    cdef unordered_map[int64_t, vector[int64_t]] members_map
    cdef unordered_map[int64_t, RankedVec] incident_map
    cdef unordered_map[uint64_t, char] edge_memo
    cdef unordered_map[int64_t, int64_t] partner_map

    def __init__(self, const int64_t[::1] indptr, const int64_t[::1] indices,
                 uint64_t seed_rank, uint64_t seed_enum,
                 int64_t[::1] pv_probes, int64_t[::1] pv_visits,
                 int64_t[::1] totals, int64_t copies_a, int64_t copies_b,
                 side_array=None, RgmmOracle side_oracle=None,
                 universe=None, int64_t tau_log=1):
        if (side_array is None) == (side_oracle is None):
            raise ValueError("exactly one of side_array / side_oracle required")
        self.indptr = indptr
        self.indices = indices
        self.n = indptr.shape[0] - 1
        self.copies_a = copies_a
        self.copies_b = copies_b
        self.cmax = copies_a if copies_a > copies_b else copies_b
        if self.n * self.cmax >= (<int64_t>1) << 32:
            raise ValueError("virtual id space exceeds 32 bits")
        self.has_side_array = side_array is not None
        if self.has_side_array:
            self.side_array = side_array
        else:
            self.side_oracle = side_oracle
        self.has_universe = universe is not None
        if self.has_universe:
            self.universe = universe
        self.rank_mixed = mix64(seed_rank)
        self.seed_enum = seed_enum
        self.tau_log = tau_log
        self.pv_probes = pv_probes
        self.pv_visits = pv_visits
        self.totals = totals

    cpdef bint in_universe(self, int64_t v):
        return (not self.has_universe) or self.universe[v] != 0

    cpdef bint side_a(self, int64_t v):
        cdef unordered_map[int64_t, char].iterator it = self.side_memo.find(v)
        if it != self.side_memo.end():
            return dereference(it).second != 0
        cdef bint s
        if self.has_side_array:
            s = self.side_array[v] != 0
        else:
            s = self.side_oracle.matched(v)
        self.side_memo[v] = <char>(1 if s else 0)
        return s

    cpdef int64_t copies(self, int64_t v):
        if not self.in_universe(v):
            return 0
        return self.copies_a if self.side_a(v) else self.copies_b

    cdef inline int64_t vid(self, int64_t v, int64_t j) noexcept nogil:
        return v * self.cmax + j

    cdef uint64_t _vrank(self, int64_t vid_u, int64_t vid_v) noexcept nogil:
        return mix64(ekey(<uint64_t>vid_u, <uint64_t>vid_v) ^ self.rank_mixed)

    cdef vector[int64_t]* _members(self, int64_t v) except NULL:
        cdef unordered_map[int64_t, vector[int64_t]].iterator it = \
            self.members_map.find(v)
        if it != self.members_map.end():
            return &(dereference(it).second)
        cdef int64_t d = self.indptr[v + 1] - self.indptr[v]
        cdef int64_t cnt = degree_probe_count(self.n, d)
        self.pv_probes[v] += cnt
        self.totals[0] += cnt
        cdef bint my_side = self.side_a(v)
        cdef unordered_set[int64_t] seen
        cdef int64_t x, tau, misses
        cdef uint64_t st
        if d > 0:
            st = derive2(self.seed_enum, <uint64_t>v)
            tau = 2 * d * self.tau_log + 8
            misses = 0
            while misses < tau:
                self.pv_visits[v] += 1
                x = self.indices[self.indptr[v] +
                                 <int64_t>(stream_next(&st) % <uint64_t>d)]
                self.pv_probes[v] += 1
                self.totals[0] += 1
                if (seen.count(x) or not self.in_universe(x)
                        or self.side_a(x) == my_side):
                    misses += 1
                else:
                    seen.insert(x)
                    misses = 0
        cdef vector[int64_t] members
        cdef unordered_set[int64_t].iterator sit = seen.begin()
        while sit != seen.end():
            members.push_back(dereference(sit))
            preincrement(sit)
        cpp_sort(members.begin(), members.end())
        self.members_map[v] = members
        it = self.members_map.find(v)
        return &(dereference(it).second)

    cdef RankedVec* _incident(self, int64_t v, int64_t j) except NULL:
        cdef int64_t me = self.vid(v, j)
        cdef unordered_map[int64_t, RankedVec].iterator it = \
            self.incident_map.find(me)
        if it != self.incident_map.end():
            return &(dereference(it).second)
        cdef vector[int64_t]* members = self._members(v)
        cdef int64_t other_copies = \
            self.copies_b if self.side_a(v) else self.copies_a
        cdef RankedVec vec
        cdef size_t t
        cdef int64_t x, i, xv
        for t in range(members.size()):
            x = dereference(members)[t]
            for i in range(other_copies):
                xv = self.vid(x, i)
                vec.push_back(RankedEdge(self._vrank(me, xv), xv))
        cpp_sort(vec.begin(), vec.end())
        for t in range(1, vec.size()):
            if vec[t].first == vec[t - 1].first:
                raise RankCollisionError(
                    f"rank collision among virtual edges at ({v}, {j})")
        self.incident_map[me] = vec
        it = self.incident_map.find(me)
        return &(dereference(it).second)

    cdef int _edge(self, int64_t vid_u, int64_t vid_v) except -2:
        cdef uint64_t root = ekey(<uint64_t>vid_u, <uint64_t>vid_v)
        cdef unordered_map[uint64_t, char].iterator mit = self.edge_memo.find(root)
        if mit != self.edge_memo.end():
            return dereference(mit).second
        cdef vector[pair[int64_t, int64_t]] stack
        stack.push_back(pair[int64_t, int64_t](vid_u, vid_v))
        cdef int64_t a, b, w, x
        cdef uint64_t key, r
        cdef int verdict
        cdef bint pushed
        cdef RankedVec* vec
        cdef size_t i
        cdef int side
        while stack.size() > 0:
            a = stack.back().first
            b = stack.back().second
            key = ekey(<uint64_t>a, <uint64_t>b)
            if self.edge_memo.count(key):
                stack.pop_back()
                continue
            r = mix64(key ^ self.rank_mixed)
            verdict = 1
            pushed = False
            for side in range(2):
                w = a if side == 0 else b
                vec = self._incident(w // self.cmax, w % self.cmax)
                for i in range(vec.size()):
                    if dereference(vec)[i].first >= r:
                        break
                    x = dereference(vec)[i].second
                    mit = self.edge_memo.find(ekey(<uint64_t>w, <uint64_t>x))
                    if mit == self.edge_memo.end():
                        stack.push_back(pair[int64_t, int64_t](w, x))
                        pushed = True
                        break
                    if dereference(mit).second:
                        verdict = 0
                        break
                if pushed or verdict == 0:
                    break
            if pushed:
                continue
            self.edge_memo[key] = <char>verdict
            stack.pop_back()
        return self.edge_memo[root]

    cdef int64_t _partner_vid(self, int64_t v, int64_t j) except? -3:
        if j >= self.copies(v):
            return -1
        cdef int64_t me = self.vid(v, j)
        cdef unordered_map[int64_t, int64_t].iterator it = self.partner_map.find(me)
        if it != self.partner_map.end():
            return dereference(it).second
        cdef int64_t p = -1
        cdef RankedVec* vec = self._incident(v, j)
        cdef size_t i
        for i in range(vec.size()):
            if self._edge(me, dereference(vec)[i].second) == 1:
                p = dereference(vec)[i].second
                break
        self.partner_map[me] = p
        return p

    def virtual_partner(self, int64_t v, int64_t j):
        cdef int64_t p = self._partner_vid(v, j)
        if p < 0:
            return None
        return (p // self.cmax, p % self.cmax)

    cpdef bint virtual_matched(self, int64_t v, int64_t j):
        return self._partner_vid(v, j) >= 0

    def base_partners(self, int64_t v):
        cdef int64_t j, p
        out = set()
        for j in range(self.copies(v)):
            p = self._partner_vid(v, j)
            if p >= 0:
                out.add(p // self.cmax)
        return sorted(out)

    def base_partner_multiset(self, int64_t v):
        cdef int64_t j, p
        out = []
        for j in range(self.copies(v)):
            p = self._partner_vid(v, j)
            if p >= 0:
                out.append(p // self.cmax)
        return sorted(out)
