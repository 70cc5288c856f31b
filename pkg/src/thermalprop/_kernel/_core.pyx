# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate-application kernel.

Semantics are identical to ``pykernel.apply_gate`` (same branch rule, same
deterministic old-then-branch reduction order within each merged key); only
the execution strategy differs: one C pass to classify and branch, std::sort
on the branch buffer, and a linear two-way merge into the output arrays.
"""

import numpy as np

cimport numpy as cnp
from libcpp.algorithm cimport sort
from libcpp.vector cimport vector

cnp.import_array()

PAULI = 0
MAJORANA = 1

ctypedef unsigned long long u64

cdef extern from *:
    """
    static inline int popcount_u64(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int popcount_u64(unsigned long long x) nogil


cdef struct Term:
    u64 lo
    u64 hi
    double coef
    int cnt


cdef bint _term_less(const Term& a, const Term& b) noexcept nogil:
    if a.hi != b.hi:
        return a.hi < b.hi
    return a.lo < b.lo


cdef inline int _pauli_sign_exp(u64 lo, u64 hi, u64 glo, u64 ghi, int g_xz) noexcept nogil:
    # power of i in (gate * term), reduced mod 4
    cdef int k = (
        g_xz
        + popcount_u64(lo & hi)
        - popcount_u64((lo ^ glo) & (hi ^ ghi))
        + 2 * popcount_u64(ghi & lo)
    )
    k %= 4
    if k < 0:
        k += 4
    return k


cdef inline int _herm_exp(u64 lo, u64 hi) noexcept nogil:
    return ((popcount_u64(lo) + popcount_u64(hi)) % 4) / 2


def apply_gate(lo_arr, hi_arr, coef_arr, cnt_arr, double id_coeff,
               object glo_obj, object ghi_obj, double ch, double sh, int basis):
    """See pykernel.apply_gate; same contract, same outputs."""
    cdef u64 glo = <u64> int(glo_obj)
    cdef u64 ghi = <u64> int(ghi_obj)
    cdef const u64[:] lo = lo_arr
    cdef const u64[:] hi = hi_arr
    cdef const double[:] coef = coef_arr
    cdef bint track = cnt_arr is not None
    cdef const int[:] cnt = cnt_arr if track else None
    cdef Py_ssize_t n = lo.shape[0]

    cdef int g_xz = popcount_u64(glo & ghi)
    cdef int g_len = popcount_u64(glo) + popcount_u64(ghi)
    cdef int r_g = (g_len % 4) / 2

    # low-bit masks below each set generator bit of the gate (majorana swaps)
    cdef vector[u64] gm_lo
    cdef vector[u64] gm_hi
    cdef vector[int] gm_hi_side
    cdef int p
    if basis == MAJORANA:
        for p in range(64):
            if (glo >> p) & 1:
                gm_lo.push_back((<u64> 1 << p) - 1)
                gm_hi.push_back(0)
                gm_hi_side.push_back(0)
        for p in range(64):
            if (ghi >> p) & 1:
                gm_lo.push_back(<u64> 0xFFFFFFFFFFFFFFFF)
                gm_hi.push_back(((<u64> 1) << p) - 1 if p else 0)
                gm_hi_side.push_back(1)

    cdef vector[Term] branches
    branches.reserve(n + 1)
    cdef vector[char] comm
    comm.resize(n)

    cdef double id_gain = 0.0
    cdef Py_ssize_t i
    cdef u64 tlo, thi, blo, bhi
    cdef int k, lt, shared, s_par
    cdef size_t q
    cdef bint is_comm
    cdef double sign, bc
    cdef Term tm

    for i in range(n):
        tlo = lo[i]
        thi = hi[i]
        if basis == PAULI:
            is_comm = (popcount_u64(glo & thi) + popcount_u64(ghi & tlo)) % 2 == 0
        else:
            lt = popcount_u64(tlo) + popcount_u64(thi)
            shared = popcount_u64(tlo & glo) + popcount_u64(thi & ghi)
            is_comm = (g_len * lt + shared) % 2 == 0
        comm[i] = is_comm
        if not is_comm:
            continue
        blo = tlo ^ glo
        bhi = thi ^ ghi
        if basis == PAULI:
            k = _pauli_sign_exp(tlo, thi, glo, ghi, g_xz)
        else:
            s_par = 0
            for q in range(gm_lo.size()):
                if gm_hi_side[q]:
                    s_par += popcount_u64(tlo) + popcount_u64(thi & gm_hi[q])
                else:
                    s_par += popcount_u64(tlo & gm_lo[q])
            k = r_g + _herm_exp(tlo, thi) - _herm_exp(blo, bhi) + 2 * (s_par % 2)
            k %= 4
            if k < 0:
                k += 4
        sign = 1.0 if k == 0 else -1.0
        bc = -sh * sign * coef[i]
        if blo == 0 and bhi == 0:
            id_gain += bc
            continue
        tm.lo = blo
        tm.hi = bhi
        tm.coef = bc
        tm.cnt = (cnt[i] + 1) if track else 0
        branches.push_back(tm)

    # identity always commutes: spawn the generator itself
    tm.lo = glo
    tm.hi = ghi
    tm.coef = -sh * id_coeff
    tm.cnt = 1
    branches.push_back(tm)

    sort(branches.begin(), branches.end(), _term_less)

    cdef double new_id = ch * id_coeff + id_gain
    cdef Py_ssize_t nb = <Py_ssize_t> branches.size()

    out_lo_arr = np.empty(n + nb, dtype=np.uint64)
    out_hi_arr = np.empty(n + nb, dtype=np.uint64)
    out_coef_arr = np.empty(n + nb, dtype=np.float64)
    out_cnt_arr = np.empty(n + nb, dtype=np.int32) if track else None
    cdef u64[:] olo = out_lo_arr
    cdef u64[:] ohi = out_hi_arr
    cdef double[:] ocoef = out_coef_arr
    cdef int[:] ocnt = out_cnt_arr if track else None

    # two-way merge; an equal key adds the pass-through value first, then the branch
    cdef Py_ssize_t a = 0, b = 0, m = 0
    cdef double oldc
    cdef int oldn
    cdef bint take_old
    while a < n or b < nb:
        if a >= n:
            take_old = False
        elif b >= nb:
            take_old = True
        elif hi[a] != branches[b].hi:
            take_old = hi[a] < branches[b].hi
        else:
            take_old = lo[a] <= branches[b].lo
        if take_old:
            oldc = ch * coef[a] if comm[a] else coef[a]
            oldn = cnt[a] if track else 0
            if b < nb and branches[b].hi == hi[a] and branches[b].lo == lo[a]:
                olo[m] = lo[a]
                ohi[m] = hi[a]
                ocoef[m] = oldc + branches[b].coef
                if track:
                    ocnt[m] = min(oldn, branches[b].cnt)
                b += 1
            else:
                olo[m] = lo[a]
                ohi[m] = hi[a]
                ocoef[m] = oldc
                if track:
                    ocnt[m] = oldn
            a += 1
        else:
            olo[m] = branches[b].lo
            ohi[m] = branches[b].hi
            ocoef[m] = branches[b].coef
            if track:
                ocnt[m] = branches[b].cnt
            b += 1
        m += 1

    # views, not copies: collisions are rare so the slack is small
    if track:
        return (out_lo_arr[:m], out_hi_arr[:m], out_coef_arr[:m], out_cnt_arr[:m], new_id)
    return (out_lo_arr[:m], out_hi_arr[:m], out_coef_arr[:m], None, new_id)


ctypedef fused wnum:
    double
    double complex


def dense_pair_gate(wnum[:, ::1] w, const long long[:] rows, const long long[:] partners,
                    wnum[:] vals_r, wnum[:] vals_p, double ch, double sh):
    """In-place w <- ch*w + sh*P*w for a gate Pauli whose row permutation is the
    involution pairing rows[k] <-> partners[k]; vals_* are the P matrix entries
    feeding each row.  One fused pass over the matrix."""
    cdef Py_ssize_t npairs = rows.shape[0]
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t k, c
    cdef long long r, p
    cdef wnum ar, ap, tmp
    with nogil:
        for k in range(npairs):
            r = rows[k]
            p = partners[k]
            ar = sh * vals_r[k]
            ap = sh * vals_p[k]
            for c in range(m):
                tmp = w[r, c]
                w[r, c] = ch * tmp + ar * w[p, c]
                w[p, c] = ch * w[p, c] + ap * tmp


def dense_diag_gate(wnum[:, ::1] w, wnum[:] scale):
    """In-place w[r, :] *= scale[r] for diagonal gate matrices."""
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t r, c
    cdef wnum s
    with nogil:
        for r in range(n):
            s = scale[r]
            for c in range(m):
                w[r, c] = w[r, c] * s
