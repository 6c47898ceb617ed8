"""Exact finite-truncation arithmetic in the oscillator matrix basis.

Elements are finitely supported coefficient matrices a[m, n] over the
orthogonal basis in which the deformed product acts as plain matrix
multiplication.  All operations here are exact for finitely supported
inputs: mixed orders are zero-padded to the larger order, never truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True, eq=False)
class MoyalElement:
    """A finitely supported element: deformation parameter and square coefficient array.

    coeffs[m, n] is the coefficient of the (m, n) basis function; the array is
    treated as immutable after construction.
    """

    theta: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.theta > 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        # own copy, so freezing never touches caller-held arrays
        c = np.array(self.coeffs, dtype=complex, order="C")
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ParameterError(f"coefficients must be a square matrix, got shape {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    @property
    def is_radial(self) -> bool:
        """True iff all off-diagonal coefficients vanish exactly."""
        off = self.coeffs - np.diag(np.diag(self.coeffs))
        return not np.any(off)

    def pad(self, order: int) -> "MoyalElement":
        """Zero-pad to at least the given order (no-op if already large enough)."""
        if order <= self.order:
            return self
        c = np.zeros((order, order), dtype=complex)
        c[: self.order, : self.order] = self.coeffs
        return MoyalElement(self.theta, c)

    def __add__(self, other: "MoyalElement") -> "MoyalElement":
        _check_theta(self, other)
        n = max(self.order, other.order)
        return MoyalElement(self.theta, self.pad(n).coeffs + other.pad(n).coeffs)

    def __sub__(self, other: "MoyalElement") -> "MoyalElement":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "MoyalElement":
        return MoyalElement(self.theta, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "MoyalElement":
        return (-1.0) * self

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "order": self.order,
            "re": self.coeffs.real.tolist(),
            "im": self.coeffs.imag.tolist(),
        }

    @staticmethod
    def from_dict(d: dict) -> "MoyalElement":
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
        return MoyalElement(float(d["theta"]), re + 1j * im)


def _check_theta(a: MoyalElement, b: MoyalElement) -> None:
    if a.theta != b.theta:
        raise ParameterError(f"deformation parameters differ: {a.theta} vs {b.theta}")


def zero(theta: float, order: int = 1) -> MoyalElement:
    return MoyalElement(theta, np.zeros((order, order), dtype=complex))


def basis(theta: float, m: int, n: int) -> MoyalElement:
    """The single basis element with coefficient 1 at (m, n)."""
    size = max(m, n) + 1
    c = np.zeros((size, size), dtype=complex)
    c[m, n] = 1.0
    return MoyalElement(theta, c)


def radial(theta: float, diag) -> MoyalElement:
    """Element with the given diagonal coefficients and zero off-diagonal."""
    d = np.asarray(diag, dtype=complex)
    return MoyalElement(theta, np.diag(d))


def star(a: MoyalElement, b: MoyalElement) -> MoyalElement:
    """Deformed product: coefficient matrices multiply."""
    _check_theta(a, b)
    n = max(a.order, b.order)
    return MoyalElement(a.theta, a.pad(n).coeffs @ b.pad(n).coeffs)


def involution(a: MoyalElement) -> MoyalElement:
    """Adjoint: conjugate transpose of the coefficient matrix."""
    return MoyalElement(a.theta, a.coeffs.conj().T)


def integral(a: MoyalElement) -> complex:
    """Faithful trace, normalized as the plane integral: 2*pi*theta * sum of the diagonal."""
    return 2.0 * np.pi * a.theta * complex(np.trace(a.coeffs))


def inner(a: MoyalElement, b: MoyalElement) -> complex:
    """L2 inner product, antilinear in the first slot: 2*pi*theta * sum conj(a)*b."""
    _check_theta(a, b)
    n = max(a.order, b.order)
    return 2.0 * np.pi * a.theta * complex(np.sum(a.pad(n).coeffs.conj() * b.pad(n).coeffs))


def sobolev_norm(a: MoyalElement, s: float, t: float) -> float:
    """Weighted coefficient norm with oscillator weights (m+1/2)^s (n+1/2)^t.

    The square is sum over (m, n) of theta^(s+t) (m+1/2)^s (n+1/2)^t |a[m,n]|^2.
    """
    n = a.order
    wm = (np.arange(n) + 0.5) ** s
    wn = (np.arange(n) + 0.5) ** t
    total = float(np.sum(wm[:, None] * wn[None, :] * np.abs(a.coeffs) ** 2))
    return float(np.sqrt(a.theta ** (s + t) * total))


def frechet_seminorm(a: MoyalElement, k: int) -> float:
    """k-th seminorm of the rapid-decrease topology; equals the (k, k) weighted norm."""
    if k < 0:
        raise ParameterError(f"seminorm index must be a natural number, got {k}")
    return sobolev_norm(a, float(k), float(k))
