"""Pure-numpy fallback for the gate-application hot kernel.

State terms are parallel arrays sorted lexicographically by (hi, lo):

    lo, hi : uint64 key words (Pauli: lo = x bits, hi = z bits;
             Majorana: generator bits 0..63 in lo, 64..127 in hi)
    coef   : float64 coefficients
    cnt    : optional int32 minimal sinh-branch counts

The identity term is carried out-of-band as (id_coeff, count 0).  A gate with
generator g and branching amplitudes (ch, sh) = (cosh θ, sinh θ) maps each
commuting term t to  ch*α_t  on t  and  -sh*φ(g,t)*α_t  on g XOR t, where φ is
the ±1 product sign; anticommuting terms pass through unchanged.  Because
t -> g XOR t is injective, every output key receives at most one pass-through
and one branch contribution, which makes the sorted merge a deterministic
ordered reduction.
"""

from __future__ import annotations

import numpy as np

PAULI = 0
MAJORANA = 1

_U64_ONE = np.uint64(1)


def _bc(a):
    return np.bitwise_count(a).astype(np.int64)


def _low_mask(p: int) -> int:
    return (1 << p) - 1


def _pauli_commute_mask(lo, hi, glo, ghi):
    # commute iff popcount(x_g & z_t) + popcount(z_g & x_t) is even
    return ((_bc(hi & glo) + _bc(lo & ghi)) & 1) == 0


def _majorana_commute_mask(lo, hi, glo, ghi, glen):
    lt = _bc(lo) + _bc(hi)
    shared = _bc(lo & glo) + _bc(hi & ghi)
    return ((glen * lt + shared) & 1) == 0


def _pauli_sign(lo, hi, glo, ghi, blo, bhi, g_xz):
    # i-power of the product g*t, guaranteed even for commuting pairs
    k = g_xz + _bc(lo & hi) - _bc(blo & bhi) + 2 * _bc(ghi & lo)
    return np.where(k % 4 == 0, 1.0, -1.0)


def _hermitian_exp(lo, hi):
    return (_bc(lo) + _bc(hi)) % 4 // 2


def _majorana_sign(lo, hi, blo, bhi, g_bits_int, r_g):
    # phase i^(r_g + r_t - r_b + 2*S); S = swaps moving t's generators past g's
    s = np.zeros(lo.shape, dtype=np.int64)
    gg = g_bits_int
    while gg:
        low = gg & -gg
        p = low.bit_length() - 1
        if p < 64:
            s += _bc(lo & np.uint64(_low_mask(p)))
        else:
            s += _bc(lo) + _bc(hi & np.uint64(_low_mask(p - 64)))
        gg ^= low
    k = r_g + _hermitian_exp(lo, hi) - _hermitian_exp(blo, bhi) + 2 * (s & 1)
    return np.where(k % 4 == 0, 1.0, -1.0)


def apply_gate(lo, hi, coef, cnt, id_coeff, glo, ghi, ch, sh, basis):
    """Apply one imaginary-time gate; returns (lo, hi, coef, cnt, id_coeff).

    Inputs must be sorted by (hi, lo); the output preserves that invariant.
    """
    glo64 = np.uint64(glo)
    ghi64 = np.uint64(ghi)
    track = cnt is not None

    if basis == PAULI:
        cm = _pauli_commute_mask(lo, hi, glo64, ghi64)
    else:
        glen = int(glo).bit_count() + int(ghi).bit_count()
        cm = _majorana_commute_mask(lo, hi, glo64, ghi64, glen)

    # pass-through array: anticommuting rows unchanged, commuting rows scaled
    ncoef = np.where(cm, ch * coef, coef)

    clo = lo[cm]
    chi = hi[cm]
    blo = clo ^ glo64
    bhi = chi ^ ghi64
    if basis == PAULI:
        sign = _pauli_sign(clo, chi, glo64, ghi64, blo, bhi, (glo & ghi).bit_count())
    else:
        g_bits = (int(ghi) << 64) | int(glo)
        r_g = (g_bits.bit_count() % 4) // 2
        sign = _majorana_sign(clo, chi, blo, bhi, g_bits, r_g)
    bcoef = (-sh) * sign * coef[cm]
    bcnt = cnt[cm] + np.int32(1) if track else None

    # branch landing on the identity key routes back to id_coeff
    to_id = (blo == 0) & (bhi == 0)
    id_gain = float(bcoef[to_id].sum()) if to_id.any() else 0.0
    if to_id.any():
        keep = ~to_id
        blo, bhi, bcoef = blo[keep], bhi[keep], bcoef[keep]
        if track:
            bcnt = bcnt[keep]

    # identity always commutes: it spawns the generator itself as a branch
    blo = np.append(blo, glo64)
    bhi = np.append(bhi, ghi64)
    bcoef = np.append(bcoef, -sh * id_coeff)
    if track:
        bcnt = np.append(bcnt, np.int32(1)).astype(np.int32)

    new_id = ch * id_coeff + id_gain

    # deterministic ordered reduction: stable sort keeps pass-through
    # contributions ahead of branch contributions within each key group
    all_lo = np.concatenate([lo, blo])
    all_hi = np.concatenate([hi, bhi])
    all_coef = np.concatenate([ncoef, bcoef])
    order = np.lexsort((all_lo, all_hi))
    slo = all_lo[order]
    shi = all_hi[order]
    scoef = all_coef[order]
    fresh = np.empty(slo.shape, dtype=bool)
    fresh[0] = True
    fresh[1:] = (slo[1:] != slo[:-1]) | (shi[1:] != shi[:-1])
    starts = np.flatnonzero(fresh)
    out_lo = slo[starts]
    out_hi = shi[starts]
    out_coef = np.add.reduceat(scoef, starts)
    if track:
        all_cnt = np.concatenate([cnt, bcnt])
        out_cnt = np.minimum.reduceat(all_cnt[order], starts)
    else:
        out_cnt = None
    return out_lo, out_hi, out_coef, out_cnt, new_id


def dense_pair_gate(w, rows, partners, vals_r, vals_p, ch, sh):
    """In-place w <- ch*w + sh*P*w for an involution row pairing (see _core)."""
    wr = w[rows]
    wp = w[partners]
    w[rows] = ch * wr + (sh * vals_r)[:, None] * wp
    w[partners] = ch * wp + (sh * vals_p)[:, None] * wr


def dense_diag_gate(w, scale):
    """In-place w[r, :] *= scale[r] for diagonal gate matrices."""
    w *= scale[:, None]
