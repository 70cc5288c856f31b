"""Sparse real-coefficient operator expansions with normalization and truncation.

An OperatorMap is the evolving state: a collection of basis elements (Pauli
strings or Majorana monomials) with real coefficients, the identity
coefficient stored out-of-band (it is the partition-function proxy and the
normalization anchor, never subject to truncation), and the running sum of
log renormalization factors.

Internally the terms live in parallel numpy arrays sorted lexicographically
by (hi, lo) key words, which fixes a deterministic merge order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .majorana import MajoranaMonomial
from .pauli import PauliString

_U64 = (1 << 64) - 1


class SimulationDivergedError(RuntimeError):
    """Raised when the identity coefficient stops being a positive finite number."""


@dataclass(frozen=True)
class TruncationPolicy:
    """What to discard after each gate, relative to the normalized state (α_I = 1).

    coeff_threshold: drop non-identity terms with |α| below this value.
    max_weight:      drop terms of Pauli weight / Majorana length above this cutoff.
    max_sinh_count:  drop terms whose cheapest surviving path took more than
                     this many sinh branches (requires sinh tracking).
    """

    coeff_threshold: float = 0.0
    max_weight: int | None = None
    max_sinh_count: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.coeff_threshold < 1.0:
            raise ValueError("coeff_threshold must lie in [0, 1)")
        if self.max_weight is not None and self.max_weight < 1:
            raise ValueError("max_weight must be >= 1 when set")
        if self.max_sinh_count is not None and self.max_sinh_count < 1:
            raise ValueError("max_sinh_count must be >= 1 when set")

    @property
    def is_trivial(self) -> bool:
        return (
            self.coeff_threshold == 0.0
            and self.max_weight is None
            and self.max_sinh_count is None
        )


@dataclass
class TermStats:
    term_count: int
    weight_histogram: dict[int, int]
    max_abs_coeff: float


def pack_element(element) -> tuple[int, int]:
    """Split an element's bits into (lo, hi) uint64 key words."""
    if isinstance(element, PauliString):
        return element.x, element.z
    if isinstance(element, MajoranaMonomial):
        return element.bits & _U64, element.bits >> 64
    raise TypeError(f"not a basis element: {element!r}")


class OperatorMap:
    """Sparse expansion of the state over Pauli strings or Majorana monomials."""

    def __init__(self, basis: str, n: int, track_sinh: bool = False):
        if basis not in ("pauli", "majorana"):
            raise ValueError("basis must be 'pauli' or 'majorana'")
        self.basis = basis
        self.n = n
        self.lo = np.empty(0, dtype=np.uint64)
        self.hi = np.empty(0, dtype=np.uint64)
        self.coef = np.empty(0, dtype=np.float64)
        self.sinh_counts = np.empty(0, dtype=np.int32) if track_sinh else None
        self.identity_coeff = 1.0
        self.accumulated_log_factor = 0.0

    # -- construction ------------------------------------------------------

    @classmethod
    def identity_state(cls, basis: str, n: int, track_sinh: bool = False) -> "OperatorMap":
        return cls(basis, n, track_sinh=track_sinh)

    @classmethod
    def from_terms(cls, basis, n, terms, identity_coeff=1.0) -> "OperatorMap":
        state = cls(basis, n)
        state.identity_coeff = identity_coeff
        for element, coeff in terms.items() if isinstance(terms, dict) else terms:
            state.merge_add(element, coeff)
        return state

    def copy(self) -> "OperatorMap":
        out = OperatorMap(self.basis, self.n, track_sinh=self.sinh_counts is not None)
        out.lo = self.lo.copy()
        out.hi = self.hi.copy()
        out.coef = self.coef.copy()
        if self.sinh_counts is not None:
            out.sinh_counts = self.sinh_counts.copy()
        out.identity_coeff = self.identity_coeff
        out.accumulated_log_factor = self.accumulated_log_factor
        return out

    def _replace_arrays(self, lo, hi, coef, cnt, identity_coeff):
        self.lo = lo
        self.hi = hi
        self.coef = coef
        self.sinh_counts = cnt
        self.identity_coeff = identity_coeff

    # -- element access ----------------------------------------------------

    @property
    def n_terms(self) -> int:
        """Stored non-identity terms."""
        return self.lo.shape[0]

    def element_at(self, i: int):
        lo = int(self.lo[i])
        hi = int(self.hi[i])
        if self.basis == "pauli":
            return PauliString(self.n, lo, hi)
        return MajoranaMonomial(self.n, (hi << 64) | lo)

    def items(self):
        """Yield (element, coefficient) for non-identity terms in canonical order."""
        for i in range(self.n_terms):
            yield self.element_at(i), float(self.coef[i])

    def _check_element(self, element):
        if self.basis == "pauli":
            if not isinstance(element, PauliString) or element.n_qubits != self.n:
                raise ValueError("element does not match state basis/size")
        else:
            if not isinstance(element, MajoranaMonomial) or element.n_generators != self.n:
                raise ValueError("element does not match state basis/size")

    def _find(self, lo: int, hi: int) -> int:
        """Index of key (lo, hi), or -1. Keys sorted by (hi, lo)."""
        h = np.uint64(hi)
        left = int(np.searchsorted(self.hi, h, side="left"))
        right = int(np.searchsorted(self.hi, h, side="right"))
        if left == right:
            return -1
        sub = self.lo[left:right]
        j = int(np.searchsorted(sub, np.uint64(lo)))
        if j < right - left and int(sub[j]) == lo:
            return left + j
        return -1

    def get(self, element) -> float:
        self._check_element(element)
        lo, hi = pack_element(element)
        if lo == 0 and hi == 0:
            return self.identity_coeff
        i = self._find(lo, hi)
        return float(self.coef[i]) if i >= 0 else 0.0

    def lookup_packed(self, qlo, qhi) -> np.ndarray:
        """Coefficients for packed query keys; absent keys contribute 0."""
        out = np.zeros(len(qlo), dtype=np.float64)
        for k, (lo, hi) in enumerate(zip(qlo, qhi)):
            if lo == 0 and hi == 0:
                out[k] = self.identity_coeff
            else:
                i = self._find(int(lo), int(hi))
                if i >= 0:
                    out[k] = self.coef[i]
        return out

    # -- mutation ----------------------------------------------------------

    def merge_add(self, element, delta: float) -> None:
        """Add delta to the coefficient of element (identity routed out-of-band).

        Exact zeros produced by cancellation are left in place; they are purged
        by the next truncation pass, not here.
        """
        if not math.isfinite(delta):
            raise ValueError("non-finite coefficient delta")
        self._check_element(element)
        lo, hi = pack_element(element)
        if lo == 0 and hi == 0:
            self.identity_coeff += delta
            return
        i = self._find(lo, hi)
        if i >= 0:
            self.coef[i] += delta
            return
        # insertion point in (hi, lo) order
        left = int(np.searchsorted(self.hi, np.uint64(hi), side="left"))
        right = int(np.searchsorted(self.hi, np.uint64(hi), side="right"))
        pos = left + int(np.searchsorted(self.lo[left:right], np.uint64(lo)))
        self.lo = np.insert(self.lo, pos, np.uint64(lo))
        self.hi = np.insert(self.hi, pos, np.uint64(hi))
        self.coef = np.insert(self.coef, pos, delta)
        if self.sinh_counts is not None:
            self.sinh_counts = np.insert(self.sinh_counts, pos, np.int32(0))

    def normalize_by_identity(self) -> float:
        """Divide everything by α_I, accumulate log α_I; returns the factor."""
        f = self.identity_coeff
        if not math.isfinite(f) or f <= 0.0:
            raise SimulationDivergedError(
                f"identity coefficient {f!r} is not a positive finite number"
            )
        if f != 1.0:
            self.coef /= f
            self.accumulated_log_factor += math.log(f)
            self.identity_coeff = 1.0
        return f

    def weights(self) -> np.ndarray:
        """Pauli weight or Majorana length per stored term."""
        if self.basis == "pauli":
            return np.bitwise_count(self.lo | self.hi).astype(np.int64)
        return (np.bitwise_count(self.lo) + np.bitwise_count(self.hi)).astype(np.int64)

    def apply_truncation(self, policy: TruncationPolicy) -> int:
        """Drop terms per policy (and exactly-zero coefficients); returns removed count."""
        if self.identity_coeff != 1.0:
            raise ValueError("apply_truncation requires a normalized state (α_I = 1)")
        keep = self.coef != 0.0
        if policy.coeff_threshold > 0.0:
            keep &= np.abs(self.coef) >= policy.coeff_threshold
        if policy.max_weight is not None:
            keep &= self.weights() <= policy.max_weight
        if policy.max_sinh_count is not None:
            if self.sinh_counts is None:
                raise ValueError("max_sinh_count set but sinh counts are not tracked")
            keep &= self.sinh_counts <= policy.max_sinh_count
        removed = int(keep.size - keep.sum())
        if removed:
            self.lo = self.lo[keep]
            self.hi = self.hi[keep]
            self.coef = self.coef[keep]
            if self.sinh_counts is not None:
                self.sinh_counts = self.sinh_counts[keep]
        return removed

    # -- inspection --------------------------------------------------------

    def term_stats(self) -> TermStats:
        """Counts include the identity (weight 0)."""
        hist: dict[int, int] = {0: 1}
        if self.n_terms:
            w, c = np.unique(self.weights(), return_counts=True)
            for wi, ci in zip(w.tolist(), c.tolist()):
                hist[wi] = hist.get(wi, 0) + ci
            max_abs = max(abs(self.identity_coeff), float(np.abs(self.coef).max()))
        else:
            max_abs = abs(self.identity_coeff)
        return TermStats(self.n_terms + 1, hist, max_abs)

    # -- snapshot export ---------------------------------------------------

    def _element_text(self, i: int) -> str:
        return self.element_at(i).to_string()

    def snapshot_text(self) -> str:
        lines = [
            f"basis={self.basis}",
            f"size={self.n}",
            f"log_factor={self.accumulated_log_factor:.17g}",
        ]
        identity = (
            PauliString.identity(self.n)
            if self.basis == "pauli"
            else MajoranaMonomial.identity(self.n)
        )
        lines.append(f"{identity.to_string()} {self.identity_coeff:.17g}")
        for i in range(self.n_terms):
            lines.append(f"{self._element_text(i)} {self.coef[i]:.17g}")
        return "\n".join(lines) + "\n"

    def write_snapshot(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.snapshot_text())

    @classmethod
    def read_snapshot(cls, path) -> "OperatorMap":
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        basis = lines[0].split("=", 1)[1]
        n = int(lines[1].split("=", 1)[1])
        log_factor = float(lines[2].split("=", 1)[1])
        state = cls(basis, n)
        state.accumulated_log_factor = log_factor
        for ln in lines[3:]:
            text, coeff = ln.rsplit(" ", 1)
            if basis == "pauli":
                element = PauliString.from_string(text)
            else:
                inner = text.strip()[2:-1]
                idx = [int(t) for t in inner.split(",")] if inner else []
                element = MajoranaMonomial.from_indices(n, idx)
            if pack_element(element) == (0, 0):
                state.identity_coeff = float(coeff)
            else:
                state.merge_add(element, float(coeff))
        return state
