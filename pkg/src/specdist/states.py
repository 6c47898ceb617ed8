"""Pure states of the truncated plane algebra and their evaluation functionals.

A pure state is represented by its normalized coefficient vector c with
sum |c_m|^2 = 1; evaluation reads off sum_{m,n} conj(c_m) c_n a[m, n].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MoyalElement
from .errors import ParameterError
from .zeta import zeta, zeta_partial

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MoyalPureState:
    """Vector state given by a unit coefficient sequence plus construction metadata."""

    theta: float
    c: np.ndarray = field(repr=False)
    kind: str = "finite"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.theta > 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        v = np.array(self.c, dtype=complex, order="C")
        if v.ndim != 1 or v.size == 0:
            raise ParameterError("state coefficients must be a nonempty 1-d sequence")
        nrm2 = float(np.sum(np.abs(v) ** 2))
        if abs(nrm2 - 1.0) > NORMALIZATION_TOL:
            raise ParameterError(f"state is not normalized: sum |c|^2 = {nrm2}")
        v.flags.writeable = False
        object.__setattr__(self, "c", v)

    @property
    def support(self) -> int:
        """Length of the stored coefficient vector."""
        return self.c.size

    def expect(self, a: MoyalElement) -> complex:
        """Expectation value sum conj(c_m) c_n a[m, n]."""
        if a.theta != self.theta:
            raise ParameterError("state and element carry different theta")
        n = min(self.support, a.order)
        ct = self.c[:n]
        return complex(ct.conj() @ a.coeffs[:n, :n] @ ct)

    def spec_string(self) -> str:
        if self.kind == "basis":
            return f"basis:{self.meta['index']}"
        if self.kind == "zeta":
            return f"zeta:{self.meta['s']}:{self.meta['m_cut']}"
        return f"finite[{self.support}]"

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "kind": self.kind,
            "c_re": self.c.real.tolist(),
            "c_im": self.c.imag.tolist(),
            "meta": {k: v for k, v in self.meta.items()},
        }


def basis_state(m: int, theta: float) -> MoyalPureState:
    """The m-th diagonal pure state (reads off a[m, m])."""
    if m < 0:
        raise ParameterError(f"basis index must be a natural number, got {m}")
    c = np.zeros(m + 1, dtype=complex)
    c[m] = 1.0
    return MoyalPureState(theta, c, kind="basis", meta={"index": m})


def zeta_state(s: float, m_cut: int, theta: float) -> MoyalPureState:
    """Truncated power-law state with |c_m|^2 proportional to (m+1)^-s, m <= m_cut.

    Requires s > 1.  The truncation is renormalized by its own partial sum so
    the state is exactly normalized; the metadata records both the partial sum
    used and the full zeta value for reporting.
    """
    if s <= 1:
        raise ParameterError(f"zeta states require s > 1, got {s}")
    if m_cut < 1:
        raise ParameterError(f"m_cut must be at least 1, got {m_cut}")
    m = np.arange(m_cut + 1, dtype=float)
    w = (m + 1.0) ** (-s)
    c = np.sqrt(w)
    c /= np.linalg.norm(c)
    partial = zeta_partial(s, m_cut + 1)
    return MoyalPureState(
        theta,
        c.astype(complex),
        kind="zeta",
        meta={"s": s, "m_cut": m_cut, "partial_sum": partial, "zeta": zeta(s)},
    )


def finite_state(weights, theta: float) -> MoyalPureState:
    """State from an arbitrary finite weight vector, normalized automatically."""
    w = np.asarray(list(weights), dtype=complex)
    if w.ndim != 1 or w.size == 0:
        raise ParameterError("weights must be a nonempty 1-d sequence")
    nrm = float(np.linalg.norm(w))
    if nrm == 0.0:
        raise ParameterError("weights must not all vanish")
    return MoyalPureState(theta, w / nrm, kind="finite", meta={"norm_factor": nrm})


def diagonal_difference(s1: MoyalPureState, s2: MoyalPureState) -> np.ndarray:
    """Difference of diagonal weights |c1_m|^2 - |c2_m|^2 on the joint support.

    These are the only data entering the staircase-certificate bound; the
    entries sum to zero since both states are normalized.
    """
    if s1.theta != s2.theta:
        raise ParameterError("states carry different theta")
    n = max(s1.support, s2.support)
    d = np.zeros(n, dtype=float)
    d[: s1.support] += np.abs(s1.c) ** 2
    d[: s2.support] -= np.abs(s2.c) ** 2
    return d
