"""Moment sequences: the forward map, positivity, and the inverse map.

The forward map sends a regular block Jacobi matrix to its moment sequence
S_n = {lam^n I, I} through the polynomial form.  ``moments_oracle`` provides
the independent route: S_n equals the (0,0) block of the n-th power of a
sufficiently long finite truncation, because length-n walks starting at
block 0 never leave it.

Block Hankel positivity of [S_{j+k}] sections is the solvability criterion;
``jacobi_from_moments`` inverts positive data by block Lanczos in the moment
inner product, normalizing each super-diagonal block to be Hermitian
positive definite (the canonical representative of the unitary-equivalence
class of recoveries).
"""

from dataclasses import dataclass

import numpy as np

from . import matkernel as mk
from .errors import IllConditionedError, InvalidInputError, OutOfRangeError
from .jacobi import BlockJacobiMatrix, truncate
from .measures import StepMeasure
from .polys import MatrixPoly, form, generate_first_kind


@dataclass(frozen=True)
class MomentSequence:
    """S_0 .. S_m, Hermitian p x p moment matrices."""

    p: int
    S: tuple

    def __post_init__(self):
        blocks = []
        for i, s in enumerate(self.S):
            m = mk.require_hermitian(mk.as_complex_matrix(s, self.p),
                                     what=f"moment S_{i}")
            m = np.array(m)
            m.setflags(write=False)
            blocks.append(m)
        if not blocks:
            raise InvalidInputError("need at least S_0")
        object.__setattr__(self, "S", tuple(blocks))

    @property
    def order(self) -> int:
        """Largest available moment index m."""
        return len(self.S) - 1


@dataclass(frozen=True)
class PositivityReport:
    """Result of the block Hankel positivity test.

    When not positive, ``first_bad_section`` is the smallest n whose section
    [S_{j+k}]_{j,k<=n} fails and ``min_eigenvalue`` its offending smallest
    eigenvalue; when positive, ``min_eigenvalue`` is the smallest eigenvalue
    seen across all sections.
    """

    positive: bool
    first_bad_section: int | None
    min_eigenvalue: float
    odd_tail_ignored: bool

    def __bool__(self) -> bool:
        return self.positive


def block_hankel(s: MomentSequence, n: int) -> np.ndarray:
    """Assemble [S_{j+k}]_{j,k=0..n} as a dense (n+1)p x (n+1)p matrix."""
    if 2 * n > s.order:
        raise OutOfRangeError(
            f"Hankel section {n} needs S_{2 * n} but only S_{s.order} "
            "is available")
    p = s.p
    out = np.empty(((n + 1) * p, (n + 1) * p), dtype=complex)
    for j in range(n + 1):
        for k in range(n + 1):
            out[j * p:(j + 1) * p, k * p:(k + 1) * p] = s.S[j + k]
    return out


def hankel_positive(s: MomentSequence,
                    psd_tol: float = mk.PSD_TOL) -> PositivityReport:
    """Check positive definiteness of every available Hankel section.

    A section passes when its smallest eigenvalue exceeds
    psd_tol * |largest eigenvalue|.  An odd trailing moment cannot complete
    a section and is ignored, flagged in the report.
    """
    m = s.order
    odd = (m % 2 == 1)
    n_max = m // 2
    worst = np.inf
    for n in range(n_max + 1):
        w = np.linalg.eigvalsh(mk.hermitian_part(block_hankel(s, n)))
        scale = float(np.abs(w).max())
        lo = float(w[0])
        if lo <= psd_tol * scale:
            return PositivityReport(False, n, lo, odd)
        worst = min(worst, lo)
    return PositivityReport(True, None, worst, odd)


def moments_from_jacobi(j: BlockJacobiMatrix, n_max: int,
                        d0=None) -> MomentSequence:
    """Forward map: S_n = {lam^n I, I} for n = 0..n_max."""
    if n_max < 0:
        raise InvalidInputError("n_max must be >= 0")
    basis = generate_first_kind(j, n_max, d0)
    ident = MatrixPoly.constant(np.eye(j.p))
    out = []
    for n in range(n_max + 1):
        s = form(MatrixPoly.monomial(n, np.eye(j.p)), ident, basis)
        out.append(mk.hermitian_part(s))
    return MomentSequence(j.p, tuple(out))


def moments_oracle(j: BlockJacobiMatrix, n: int) -> np.ndarray:
    """Independent moment route: (0,0) block of truncate(J, n+1) ** n.

    Exact for the infinite matrix because a length-n walk from block 0
    stays within the first n+1 blocks.
    """
    if n < 0:
        raise InvalidInputError("moment index must be >= 0")
    t = truncate(j, n + 1)
    power = np.linalg.matrix_power(t, n)
    return mk.hermitian_part(power[:j.p, :j.p])


def _moment_form(s: MomentSequence, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """{P, Q} = sum_{j,k} A_j S_{j+k} B_k^H in the moment inner product."""
    da, db = a.shape[0] - 1, b.shape[0] - 1
    if da + db > s.order:
        raise OutOfRangeError(
            f"moment form needs S_{da + db} but only S_{s.order} is available")
    p = s.p
    out = np.zeros((p, p), dtype=complex)
    for j in range(da + 1):
        for k in range(db + 1):
            out += a[j] @ s.S[j + k] @ b[k].conj().T
    return out


def jacobi_from_moments(s: MomentSequence,
                        psd_tol: float = mk.PSD_TOL,
                        pd_tol: float = mk.PD_TOL
                        ) -> tuple[BlockJacobiMatrix, np.ndarray]:
    """Inverse map: block Lanczos in the moment inner product.

    From S_0..S_2n builds D_0 = S_0^{-1/2} and the recursion

        A_{k,k}   = {lam D_k, D_k}
        R_{k+1}   = lam D_k - A_{k,k} D_k - A_{k-1,k}^H D_{k-1}
        A_{k,k+1} = {R_{k+1}, R_{k+1}}^{1/2}      (Hermitian PD)
        D_{k+1}   = A_{k,k+1}^{-1} R_{k+1},

    for k = 0..n-1.  Returns the recovered matrix with n+1 stored diagonal
    blocks -- the data determines A_{0,0}..A_{n-1,n-1} and
    A_{0,1}..A_{n-1,n}; the final diagonal block is a zero pad, which leaves
    S_0..S_2n unchanged -- plus a neutral generator rule (zero diagonal,
    identity off-diagonal) so the round trip ``moments_from_jacobi(J, D0, 2n)``
    is executable.  Serialized documents keep only the stored prefix.

    Refuses (rather than regularizes) when a Gram normalization falls below
    the positive-definiteness floor: silent regularization would corrupt
    determinacy diagnostics downstream.
    """
    report = hankel_positive(s, psd_tol)
    if not report.positive:
        raise InvalidInputError(
            f"moment sequence is not positive: Hankel section "
            f"{report.first_bad_section} has min eigenvalue "
            f"{report.min_eigenvalue:.3e}")
    p = s.p
    n = s.order // 2
    d0 = mk.hermitian_inv_sqrt(s.S[0])
    cur = d0[None]                       # coefficients of D_k, shape (k+1,p,p)
    prev = None
    diag: list[np.ndarray] = []
    offdiag: list[np.ndarray] = []
    for k in range(n):
        lam_cur = np.concatenate([np.zeros((1, p, p), dtype=complex), cur])
        a_kk = mk.hermitian_part(_moment_form(s, lam_cur, cur))
        resid = np.array(lam_cur)
        resid[:k + 1] -= a_kk[None] @ cur
        if k > 0:
            resid[:k] -= (offdiag[k - 1].conj().T)[None] @ prev
        gram = mk.hermitian_part(_moment_form(s, resid, resid))
        w, v = np.linalg.eigh(gram)
        if w[0] <= pd_tol * max(1.0, float(w[-1])):
            raise IllConditionedError(
                f"Gram matrix at step {k + 1} is numerically singular "
                f"(min eigenvalue {w[0]:.3e}); refusing to continue", step=k + 1)
        b = mk.hermitian_part((v * np.sqrt(w)) @ v.conj().T)
        b_inv = mk.hermitian_part((v / np.sqrt(w)) @ v.conj().T)
        diag.append(a_kk)
        offdiag.append(b)
        prev, cur = cur, b_inv[None] @ resid

    def neutral_rule(k: int):
        return np.zeros((p, p)), np.eye(p, dtype=complex)

    diag.append(np.zeros((p, p), dtype=complex))
    return (BlockJacobiMatrix(p, tuple(diag), tuple(offdiag), neutral_rule),
            d0)


def moments_of_measure(t: StepMeasure, n_max: int) -> MomentSequence:
    """S_n = sum_j lam_j^n W_j for n = 0..n_max."""
    if n_max < 0:
        raise InvalidInputError("n_max must be >= 0")
    out = []
    for n in range(n_max + 1):
        if t.n_nodes == 0:
            out.append(np.zeros((t.p, t.p), dtype=complex))
        else:
            powers = t.nodes.astype(complex) ** n
            out.append(mk.hermitian_part(
                (powers[:, None, None] * t.weights).sum(axis=0)))
    return MomentSequence(t.p, tuple(out))
