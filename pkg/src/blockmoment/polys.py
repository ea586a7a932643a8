"""Matrix polynomials and the first-kind orthonormal family.

A matrix polynomial is P(lam) = C_0 + C_1 lam + ... + C_n lam^n with p x p
complex coefficients, stored stacked as one (n+1, p, p) array.  Matrix
coefficients act from the left throughout: (C P)(lam) = C * P(lam).

``generate_first_kind`` runs the block three-term recurrence

    A_{k,k-1} D_{k-1} + (A_{k,k} - lam I) D_k + A_{k,k+1} D_{k+1} = 0,

with D_{-1} = 0 and D_0 a caller-supplied constant nonsingular matrix
(identity by default), yielding polynomials of exact degree k with
nondegenerate leading coefficients.  ``expand`` writes any polynomial as
sum_k U_k D_k by degree peeling, and ``form`` is the sesquilinear pairing
{P, Q} = sum_k U_k V_k^H defined by orthonormality of the D_k.
"""

from dataclasses import dataclass

import numpy as np

from . import matkernel as mk
from .errors import (InvalidInputError, NumericalFailureError, OutOfRangeError)
from .jacobi import REG_TOL, BlockJacobiMatrix, validate_regular


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MatrixPoly:
    """Matrix polynomial with stacked coefficients.

    ``coeffs[i]`` multiplies lam^i.  Trailing zero coefficients are allowed;
    the degree is the index of the last nonzero coefficient (-1 for the zero
    polynomial).
    """

    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != self.p or c.shape[2] != self.p:
            raise InvalidInputError(
                f"coefficients must have shape (m, {self.p}, {self.p}), "
                f"got {c.shape}")
        if c.shape[0] < 1:
            c = np.zeros((1, self.p, self.p), dtype=complex)
        if not np.isfinite(c).all():
            raise InvalidInputError("polynomial has non-finite coefficients")
        object.__setattr__(self, "coeffs", _freeze(c))

    @classmethod
    def zero(cls, p: int) -> "MatrixPoly":
        return cls(p, np.zeros((1, p, p)))

    @classmethod
    def constant(cls, c) -> "MatrixPoly":
        m = mk.as_complex_matrix(c)
        return cls(m.shape[0], m[None])

    @classmethod
    def monomial(cls, n: int, c) -> "MatrixPoly":
        """c * lam^n."""
        m = mk.as_complex_matrix(c)
        coeffs = np.zeros((n + 1, m.shape[0], m.shape[0]), dtype=complex)
        coeffs[n] = m
        return cls(m.shape[0], coeffs)

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1)
                        .max(axis=1))[0]
        return int(nz[-1]) if nz.size else -1

    def __call__(self, z: complex) -> np.ndarray:
        acc = np.array(self.coeffs[-1])
        for k in range(self.coeffs.shape[0] - 2, -1, -1):
            acc = acc * z + self.coeffs[k]
        return acc

    def star(self) -> "MatrixPoly":
        """Conjugate-transpose every coefficient; P*(conj z) = (P(z))^H."""
        return MatrixPoly(self.p, np.conj(np.swapaxes(self.coeffs, 1, 2)))

    def shift(self) -> "MatrixPoly":
        """Multiply by the scalar variable lam (coefficient shift)."""
        out = np.zeros((self.coeffs.shape[0] + 1, self.p, self.p),
                       dtype=complex)
        out[1:] = self.coeffs
        return MatrixPoly(self.p, out)

    def left_mul(self, c) -> "MatrixPoly":
        m = mk.as_complex_matrix(c, self.p)
        return MatrixPoly(self.p, m[None] @ self.coeffs)

    def _padded(self, m: int) -> np.ndarray:
        out = np.zeros((m, self.p, self.p), dtype=complex)
        out[:self.coeffs.shape[0]] = self.coeffs
        return out

    def __add__(self, other: "MatrixPoly") -> "MatrixPoly":
        if self.p != other.p:
            raise InvalidInputError("block dimension mismatch")
        m = max(self.coeffs.shape[0], other.coeffs.shape[0])
        return MatrixPoly(self.p, self._padded(m) + other._padded(m))

    def __sub__(self, other: "MatrixPoly") -> "MatrixPoly":
        if self.p != other.p:
            raise InvalidInputError("block dimension mismatch")
        m = max(self.coeffs.shape[0], other.coeffs.shape[0])
        return MatrixPoly(self.p, self._padded(m) - other._padded(m))


@dataclass(frozen=True)
class OrthoBasis:
    """First-kind polynomials D_0..D_n for a regular block Jacobi matrix."""

    jacobi: BlockJacobiMatrix
    d0: np.ndarray
    polys: tuple
    lead_inv: tuple  # cached inverses of the (nondegenerate) leading coeffs

    @property
    def p(self) -> int:
        return self.jacobi.p

    @property
    def n(self) -> int:
        return len(self.polys) - 1


def _require_nonsingular(c, what: str) -> np.ndarray:
    m = mk.as_complex_matrix(c)
    if mk.min_singular_value(m) <= REG_TOL * max(1.0, mk.spectral_norm(m)):
        raise InvalidInputError(f"{what} is numerically singular")
    return m


def generate_first_kind(j: BlockJacobiMatrix, n: int,
                        d0=None) -> OrthoBasis:
    """Generate D_0 .. D_n from the three-term recurrence.

    D_{k+1} = A_{k,k+1}^{-1} [ (lam I - A_{k,k}) D_k - A_{k,k-1} D_{k-1} ],
    starting from D_{-1} = 0 and the constant nonsingular D_0 (identity by
    default).
    """
    report = validate_regular(j)
    if not report.ok:
        k, kind, mag = report.first_violation
        raise InvalidInputError(
            f"matrix is not a regular block Jacobi matrix: block {k} "
            f"{kind} (magnitude {mag:.3e})")
    p = j.p
    d0 = np.eye(p, dtype=complex) if d0 is None else \
        _require_nonsingular(mk.as_complex_matrix(d0, p), "D_0")
    jp = j.prefix(n + 1) if n >= 1 else j
    polys = [MatrixPoly(p, d0[None])]
    lead_inv = [np.linalg.inv(d0)]
    prev = None
    for k in range(n):
        a_kk = jp.diag[k]
        try:
            b_inv = np.linalg.inv(jp.offdiag[k])
        except np.linalg.LinAlgError:
            raise NumericalFailureError(
                f"off-diagonal block {k} is singular; recurrence cannot "
                "continue") from None
        cur = polys[k].coeffs
        nxt = np.zeros((k + 2, p, p), dtype=complex)
        nxt[1:] = cur                                  # lam * D_k
        nxt[:k + 1] -= a_kk[None] @ cur                # - A_{k,k} D_k
        if k > 0:
            sub = jp.offdiag[k - 1].conj().T           # A_{k,k-1}
            nxt[:k] -= sub[None] @ prev.coeffs
        nxt = b_inv[None] @ nxt
        poly = MatrixPoly(p, nxt)
        lead = poly.coeffs[k + 1]
        # leading coefficients are products of block inverses: their scale
        # shrinks or grows geometrically and may mix scales across
        # components, so only exact singularity is refused here
        try:
            inv_lead = np.linalg.inv(lead)
        except np.linalg.LinAlgError:
            raise NumericalFailureError(
                f"leading coefficient of D_{k + 1} degenerated "
                "numerically") from None
        prev = polys[k]
        polys.append(poly)
        lead_inv.append(inv_lead)
    return OrthoBasis(jp, _freeze(np.array(d0)), tuple(polys),
                      tuple(_freeze(m) for m in lead_inv))


def expand(poly: MatrixPoly, basis: OrthoBasis) -> list[np.ndarray]:
    """Coefficients U_0..U_d with P = sum U_k D_k (degree peeling).

    Peels from the highest degree down against the nondegenerate leading
    coefficients; the zero polynomial expands to an empty list.
    """
    if poly.p != basis.p:
        raise InvalidInputError("block dimension mismatch with basis")
    d = poly.degree
    if d > basis.n:
        raise OutOfRangeError(
            f"polynomial degree {d} exceeds basis length {basis.n}")
    if d < 0:
        return []
    work = np.array(poly.coeffs[:d + 1])
    out: list[np.ndarray] = [None] * (d + 1)
    for k in range(d, -1, -1):
        u = work[k] @ basis.lead_inv[k]
        out[k] = u
        work[:k + 1] -= u[None] @ basis.polys[k].coeffs
    return out


def form(pp: MatrixPoly, qq: MatrixPoly, basis: OrthoBasis) -> np.ndarray:
    """The pairing {P, Q} = sum_{k <= min(n,m)} U_k V_k^H."""
    u = expand(pp, basis)
    v = expand(qq, basis)
    out = np.zeros((basis.p, basis.p), dtype=complex)
    for uk, vk in zip(u, v):
        out += uk @ vk.conj().T
    return out


def first_kind_values(j: BlockJacobiMatrix, zs, n: int, d0=None):
    """Yield D_k(z) for k = 0..n, batched over the points ``zs``.

    Pointwise form of the recurrence; yields arrays of shape (B, p, p).
    Inputs are assumed validated by the caller.
    """
    p = j.p
    z = np.asarray(zs, dtype=complex).reshape(-1)
    jp = j.prefix(n + 1) if n >= 1 else j
    d0m = np.eye(p, dtype=complex) if d0 is None else \
        mk.as_complex_matrix(d0, p)
    cur = np.broadcast_to(d0m, (z.size, p, p)).copy()
    prev = np.zeros_like(cur)
    yield cur
    zc = z[:, None, None]
    for k in range(n):
        b_inv = np.linalg.inv(jp.offdiag[k])
        nxt = zc * cur - jp.diag[k][None] @ cur
        if k > 0:
            nxt -= (jp.offdiag[k - 1].conj().T)[None] @ prev
        nxt = b_inv[None] @ nxt
        prev, cur = cur, nxt
        yield cur
