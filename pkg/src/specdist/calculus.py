"""Complex derivations in matrix-basis coordinates, their inversion formula,
and the radial elements that saturate the Lipschitz ball.

The two derivations act on coefficients by first-order recurrences; taking the
output order one larger than the input makes them exact on finitely supported
elements, with no lossy truncation row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MoyalElement
from .errors import ParameterError

DZ = "dz"
DZBAR = "dzbar"


@dataclass(frozen=True, eq=False)
class DerivativeCoefficients:
    """Coefficient array of a derivative, tagged with which derivation produced it.

    Kept distinct from MoyalElement so the sqrt(2) normalization of the
    derivations cannot be applied twice by accident.
    """

    theta: float
    coeffs: np.ndarray = field(repr=False)
    kind: str = DZ

    def __post_init__(self):
        if self.kind not in (DZ, DZBAR):
            raise ParameterError(f"unknown derivative kind {self.kind!r}")
        c = np.array(self.coeffs, dtype=complex, order="C")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    def as_element(self) -> MoyalElement:
        """Reinterpret the coefficient array as an algebra element."""
        return MoyalElement(self.theta, self.coeffs)

    def to_dict(self) -> dict:
        d = self.as_element().to_dict()
        # wire-format tags for the two derivations
        d["kind"] = {DZ: "del", DZBAR: "delbar"}[self.kind]
        return d


def dz(a: MoyalElement) -> DerivativeCoefficients:
    """Coefficients of the (d1 - i*d2)/sqrt(2) derivation of a.

    Output order is a.order + 1; exact for finitely supported input.
    """
    n = a.order
    th = a.theta
    ap = np.zeros((n + 1, n + 2), dtype=complex)
    ap[:n, :n] = a.coeffs
    cols = np.arange(n + 1, dtype=float)
    out = np.sqrt((cols + 1.0) / th)[None, :] * ap[:, 1 : n + 2]
    rows = np.arange(1, n + 1, dtype=float)
    out[1:, :] -= np.sqrt(rows / th)[:, None] * ap[: n, : n + 1]
    return DerivativeCoefficients(th, out, DZ)


def dzbar(a: MoyalElement) -> DerivativeCoefficients:
    """Coefficients of the (d1 + i*d2)/sqrt(2) derivation of a (mirror of dz)."""
    n = a.order
    th = a.theta
    ap = np.zeros((n + 2, n + 1), dtype=complex)
    ap[:n, :n] = a.coeffs
    rows = np.arange(n + 1, dtype=float)
    out = np.sqrt((rows + 1.0) / th)[:, None] * ap[1 : n + 2, :]
    cols = np.arange(1, n + 1, dtype=float)
    out[:, 1:] -= np.sqrt(cols / th)[None, :] * ap[: n + 1, : n]
    return DerivativeCoefficients(th, out, DZBAR)


def reconstruct(a00: complex, alpha: DerivativeCoefficients,
                beta: DerivativeCoefficients) -> MoyalElement:
    """Invert the two derivations: rebuild the element from a00 and both coefficient arrays.

    Entries with a negative index in the inversion sum contribute zero.
    """
    if alpha.theta != beta.theta:
        raise ParameterError("derivative coefficient arrays carry different theta")
    if alpha.order != beta.order:
        raise ParameterError("derivative coefficient arrays have different orders")
    th = alpha.theta
    n = alpha.order
    al = alpha.coeffs
    be = beta.coeffs
    out = np.zeros((n, n), dtype=complex)
    sq = np.sqrt(np.arange(n + 1, dtype=float))
    for p in range(n):
        for q in range(n):
            if p == 0 and q == 0:
                out[0, 0] = a00
                continue
            kmax = min(p, q)
            k = np.arange(kmax + 1)
            num = np.zeros(kmax + 1, dtype=complex)
            # alpha term needs q-k-1 >= 0, beta term needs p-k-1 >= 0;
            # both conditions select a prefix of the ascending k range
            ka = k[k <= q - 1]
            if len(ka):
                num[: len(ka)] += al[p - ka, q - ka - 1]
            kb = k[k <= p - 1]
            if len(kb):
                num[: len(kb)] += be[p - kb - 1, q - kb]
            den = sq[p - k] + sq[q - k]
            # the k = p = q corner has no valid numerator entry; skip its 0/0
            live = den > 0.0
            out[p, q] = (a00 if p == q else 0.0) + np.sqrt(th) * np.sum(num[live] / den[live])
    return MoyalElement(th, out)


def staircase(m0: int, theta: float) -> MoyalElement:
    """Radial element whose diagonal decreases by one unit Lipschitz step per index.

    Entry p (for p <= m0) is sqrt(theta/2) * sum_{k=p}^{m0} 1/sqrt(k+1).  All
    derivative coefficients have modulus 1/sqrt(2), so its Dirac commutator
    norm is exactly 1; it realizes the distance between diagonal basis states.
    """
    if m0 < 0:
        raise ParameterError(f"m0 must be a natural number, got {m0}")
    inv = 1.0 / np.sqrt(np.arange(m0 + 1, dtype=float) + 1.0)
    suffix = np.cumsum(inv[::-1])[::-1]
    diag = np.sqrt(theta / 2.0) * suffix
    c = np.zeros((m0 + 1, m0 + 1), dtype=complex)
    np.fill_diagonal(c, diag)
    return MoyalElement(theta, c)


def radial_bump(n: int, theta: float) -> MoyalElement:
    """Single-entry radial element sqrt(theta/2)/sqrt(n+1) at diagonal index n.

    Lies on the boundary of the Lipschitz ball and realizes the one-step
    distance between adjacent basis states.
    """
    if n < 0:
        raise ParameterError(f"index must be a natural number, got {n}")
    c = np.zeros((n + 1, n + 1), dtype=complex)
    c[n, n] = np.sqrt(theta / 2.0) / np.sqrt(n + 1.0)
    return MoyalElement(theta, c)
