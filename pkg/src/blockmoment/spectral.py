"""Kernel sums, deficiency indices, determinacy, and block quadrature.

The kernel partial sum K_n(z) = sum_{k<=n} D_k(z)^H D_k(z) either converges
(in some eigen-directions) or grows without bound as n increases.  The limit
of K_n(z)^{-1} restricted to convergent directions is the matrix H(z); its
rank is constant on each open half-plane and the two ranks are the
deficiency indices (nu_+, nu_-) of the underlying operator.  nu = 0 on
either side means the associated moment problem is determinate;
nu_+ = nu_- = p is the completely indeterminate case.

Any finite procedure for a true limit needs declared heuristics; the
divergence classifier below states its thresholds in the report rather than
hiding them, and cross-checks rank constancy over several sample points per
half-plane instead of assuming it.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import matkernel as mk
from .errors import (ClassificationUnavailableError, HalfPlaneError,
                     InvalidInputError, OutOfRangeError, RefusedError)
from .jacobi import BlockJacobiMatrix, truncate
from .measures import StepMeasure, normalize
from .polys import first_kind_values

KERNEL_N_MAX = 200
GROWTH_FACTOR = 1.5
VALUE_CAP = 1e12
NODE_MERGE_FACTOR = 1e-9
OVERFLOW_GUARD = 1e120

# spread across each open half-plane so rank constancy is exercised, not
# assumed
DEFAULT_SAMPLE_POINTS = (1j, 2j, 1 + 1j, -3 + 2j,
                         -1j, -2j, -1 - 1j, 3 - 2j)


@dataclass(frozen=True)
class KernelSummary:
    """Per-direction divergence classification of K_n(z).

    Directions are the eigenvectors of the last partial sum, ordered by
    ascending eigenvalue.  ``eigen_trajectories[i]`` samples the quadratic
    form of direction i at a few checkpoint depths.  When ``decisive`` is
    False some directions fell in the classifier's dead zone and
    ``converged_dirs + diverged_dirs < p``.
    """

    z: complex
    n_used: int
    kernel: np.ndarray
    eigen_trajectories: tuple
    converged_dirs: int
    diverged_dirs: int
    indecisive_dirs: int
    decisive: bool
    h_matrix: np.ndarray
    rank: int


@dataclass(frozen=True)
class DeficiencyReport:
    """Sampled ranks per half-plane; indices only when all samples agree."""

    nu_plus: int | None
    nu_minus: int | None
    samples_upper: tuple   # (z, rank, decisive) triples
    samples_lower: tuple
    decisive: bool


class Determinacy(str, Enum):
    DETERMINATE = "Determinate"
    INDETERMINATE = "Indeterminate"
    COMPLETELY_INDETERMINATE = "CompletelyIndeterminate"


@dataclass(frozen=True)
class DeterminacyClass:
    kind: Determinacy
    nu_plus: int
    nu_minus: int

    def __str__(self) -> str:
        if self.kind is Determinacy.INDETERMINATE:
            return f"Indeterminate({self.nu_plus},{self.nu_minus})"
        return self.kind.value


def kernel_partial(j: BlockJacobiMatrix, z: complex, n: int,
                   d0=None) -> np.ndarray:
    """K_n(z) = sum_{k=0}^{n} eval(star(D_k), conj z) @ eval(D_k, z).

    Hermitian PSD and >= D_0^H D_0 in the Loewner order; real z is allowed
    (needed for jump bounds).
    """
    if n < 0:
        raise InvalidInputError("n must be >= 0")
    p = j.p
    out = np.zeros((p, p), dtype=complex)
    for dk in first_kind_values(j, [complex(z)], n, d0):
        v = dk[0]
        out += v.conj().T @ v
    return mk.hermitian_part(out)


def _kernel_history(j, z, n_max, d0):
    """Partial sums K_0..K_m at a point, stopping early near overflow."""
    history = []
    acc = None
    for dk in first_kind_values(j, [complex(z)], n_max, d0):
        v = dk[0]
        term = v.conj().T @ v
        acc = term if acc is None else acc + term
        history.append(acc)
        if np.abs(v).max() > OVERFLOW_GUARD:
            break
    return history


def estimate_H(j: BlockJacobiMatrix, z: complex, n_max: int = KERNEL_N_MAX,
               growth_factor: float = GROWTH_FACTOR,
               cap: float = VALUE_CAP, d0=None) -> KernelSummary:
    """Classify eigen-directions of K_n(z) and estimate H(z).

    A direction with final quadratic-form value v and half-depth value h is

    * diverged   when v >= cap or v/h >= growth_factor,
    * converged  when v < cap and v/h <= 1 + (growth_factor - 1)/4,
    * indecisive otherwise (dead zone; reported, never silently resolved).

    H(z) is the inverse of the final partial sum restricted to convergent
    directions and zero on the others; the rank r(z) is the number of
    convergent directions.
    """
    z = complex(z)
    if z.imag == 0:
        raise HalfPlaneError("estimate_H needs Im z != 0")
    if n_max < 4:
        raise InvalidInputError("n_max must be >= 4")
    history = _kernel_history(j, z, n_max, d0)
    n_eff = len(history) - 1
    k_last = mk.hermitian_part(history[-1])
    k_half = mk.hermitian_part(history[n_eff // 2])
    w, v = np.linalg.eigh(k_last)
    low_band = 1.0 + (growth_factor - 1.0) / 4.0
    checkpoints = sorted({max(0, n_eff // 8), max(0, n_eff // 4),
                          n_eff // 2, n_eff})
    conv, div, dead = [], [], []
    trajectories = []
    for i in range(j.p):
        vec = v[:, i]
        value = float(w[i])
        half = float(np.real(vec.conj() @ k_half @ vec))
        ratio = value / half if half > 0 else np.inf
        trajectories.append(tuple(
            (m, float(np.real(vec.conj() @ history[m] @ vec)))
            for m in checkpoints))
        if value >= cap or ratio >= growth_factor:
            div.append(i)
        elif ratio <= low_band:
            conv.append(i)
        else:
            dead.append(i)
    h = np.zeros((j.p, j.p), dtype=complex)
    for i in conv:
        vec = v[:, i:i + 1]
        h += (vec / w[i]) @ vec.conj().T
    return KernelSummary(z=z, n_used=n_eff, kernel=k_last,
                         eigen_trajectories=tuple(trajectories),
                         converged_dirs=len(conv), diverged_dirs=len(div),
                         indecisive_dirs=len(dead), decisive=(not dead),
                         h_matrix=mk.hermitian_part(h), rank=len(conv))


def deficiency_indices(j: BlockJacobiMatrix, n_max: int = KERNEL_N_MAX,
                       sample_points=None,
                       growth_factor: float = GROWTH_FACTOR,
                       cap: float = VALUE_CAP) -> DeficiencyReport:
    """Estimate (nu_+, nu_-) from kernel ranks over half-plane samples.

    Decisive only when every sample is decisive and the ranks within each
    half-plane agree, honoring rank constancy as a cross-check rather than
    an assumption.  Needs at least 3 points in each open half-plane.
    """
    points = tuple(DEFAULT_SAMPLE_POINTS if sample_points is None
                   else (complex(z) for z in sample_points))
    upper = [z for z in points if z.imag > 0]
    lower = [z for z in points if z.imag < 0]
    if any(z.imag == 0 for z in points):
        raise InvalidInputError("sample points must avoid the real axis")
    if len(upper) < 3 or len(lower) < 3:
        raise InvalidInputError(
            "need at least 3 sample points in each open half-plane")

    def scan(zs):
        samples = []
        for z in zs:
            est = estimate_H(j, z, n_max=n_max, growth_factor=growth_factor,
                             cap=cap)
            samples.append((z, est.rank, est.decisive))
        ranks = {r for _, r, _ in samples}
        ok = all(d for _, _, d in samples) and len(ranks) == 1
        return tuple(samples), (ranks.pop() if ok else None)

    samples_up, nu_plus = scan(upper)
    samples_lo, nu_minus = scan(lower)
    decisive = nu_plus is not None and nu_minus is not None
    return DeficiencyReport(nu_plus=nu_plus, nu_minus=nu_minus,
                            samples_upper=samples_up,
                            samples_lower=samples_lo, decisive=decisive)


def classify(j: BlockJacobiMatrix, n_max: int = KERNEL_N_MAX,
             sample_points=None) -> DeterminacyClass:
    """Map decisive deficiency indices to a determinacy class."""
    report = deficiency_indices(j, n_max=n_max, sample_points=sample_points)
    if not report.decisive:
        raise ClassificationUnavailableError(
            "deficiency sampling was indecisive: "
            f"upper={[(str(z), r, d) for z, r, d in report.samples_upper]} "
            f"lower={[(str(z), r, d) for z, r, d in report.samples_lower]}")
    nu_p, nu_m = report.nu_plus, report.nu_minus
    if nu_p == 0 or nu_m == 0:
        kind = Determinacy.DETERMINATE
    elif nu_p == j.p and nu_m == j.p:
        kind = Determinacy.COMPLETELY_INDETERMINATE
    else:
        kind = Determinacy.INDETERMINATE
    return DeterminacyClass(kind=kind, nu_plus=nu_p, nu_minus=nu_m)


def _converged_kernel(j, z, n_max, series_tol, d0=None):
    """Kernel sum with a two-step increment stopping rule.

    Consecutive-term parity can make every other increment vanish, so the
    rule requires two quiet steps in a row.
    """
    acc = None
    inc_prev = inc_last = np.inf
    for k, dk in enumerate(first_kind_values(j, [complex(z)], n_max, d0)):
        v = dk[0]
        term = v.conj().T @ v
        acc = term if acc is None else acc + term
        inc_prev, inc_last = inc_last, float(np.abs(term).max())
        if k >= 2 and max(inc_prev, inc_last) < series_tol:
            break
    return mk.hermitian_part(acc)


DEFAULT_GROWTH_DIRECTIONS = (1.0 + 0j,
                             np.exp(1j * np.pi / 4),
                             1j,
                             np.exp(3j * np.pi / 4))


def growth_diagnostic(j: BlockJacobiMatrix, radii, directions=None,
                      n_max: int = 400, series_tol: float = 1e-12,
                      n_max_classify: int = KERNEL_N_MAX) -> list:
    """Table of (r, max over directions of log |K(r dir)| / r).

    Only meaningful when the kernel series converges everywhere, i.e. in
    the completely indeterminate case; refused otherwise.  The ratio table
    is reported as a diagnostic; no limit is asserted.
    """
    cls = classify(j, n_max=n_max_classify)
    if cls.kind is not Determinacy.COMPLETELY_INDETERMINATE:
        raise RefusedError(
            f"growth diagnostic needs a completely indeterminate problem, "
            f"got {cls}")
    dirs = DEFAULT_GROWTH_DIRECTIONS if directions is None else directions
    dirs = [complex(d) for d in dirs]
    if not dirs:
        raise InvalidInputError("need at least one direction")
    for d in dirs:
        if abs(abs(d) - 1.0) > 1e-12:
            raise InvalidInputError(f"direction {d} is not unit modulus")
    table = []
    for r in radii:
        r = float(r)
        if r <= 0:
            raise InvalidInputError("radii must be positive")
        best = -np.inf
        for d in dirs:
            k = _converged_kernel(j, r * d, n_max, series_tol)
            best = max(best, float(np.log(mk.spectral_norm(k))) / r)
        table.append((r, best))
    return table


def gauss_quadrature(j: BlockJacobiMatrix, n: int, d0=None) -> StepMeasure:
    """Block Gauss rule exact on moments S_0 .. S_{2n-1}.

    Nodes are the distinct eigenvalues of truncate(J, n), clustered within
    NODE_MERGE_FACTOR * |truncation|.  Weights use the block Christoffel
    formula: with Y a null basis of D_n at the node (eigenvector clusters
    of the truncation are exactly stacks of D_k values on such vectors),

        W = Y (Y^H K_{n-1}(node) Y)^{-1} Y^H.

    Weights read off eigenvector first-block rows are mathematically the
    same but carry only absolute eigensolver accuracy: at far-out nodes
    the first-block mass is exponentially small and high moment powers
    amplify the noise past any useful tolerance, while the recurrence
    route stays relatively accurate at every scale.
    """
    if n < 1:
        raise InvalidInputError("quadrature needs at least one block")
    p = j.p
    t = truncate(j, n)
    w, vecs = np.linalg.eigh(mk.hermitian_part(t))
    tol = NODE_MERGE_FACTOR * mk.spectral_norm(t)
    nodes: list[float] = []
    clusters: list[slice] = []
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[stop] - w[stop - 1] > tol:
            nodes.append(float(np.mean(w[start:stop])))
            clusters.append(slice(start, stop))
            start = stop
    values = list(first_kind_values(j, nodes, n - 1, d0))  # D_0 .. D_{n-1}
    kernels = np.zeros((len(nodes), p, p), dtype=complex)
    for dk in values:
        kernels += np.conj(np.swapaxes(dk, 1, 2)) @ dk
    d_next = None
    if p > 1:
        # null directions of D_n need one block beyond the truncation; fall
        # back to eigenvector first-block directions when it is missing
        try:
            jp1 = j.prefix(n + 1)
        except OutOfRangeError:
            jp1 = None
        if jp1 is not None:
            zc = np.asarray(nodes, dtype=complex)[:, None, None]
            b_inv = np.linalg.inv(jp1.offdiag[n - 1])
            d_next = zc * values[-1] - jp1.diag[n - 1][None] @ values[-1]
            if n > 1:
                sub = jp1.offdiag[n - 2].conj().T
                d_next -= sub[None] @ values[-2]
            d_next = b_inv[None] @ d_next
    d0_inv = (np.eye(p, dtype=complex) if d0 is None
              else np.linalg.inv(mk.as_complex_matrix(d0, p)))
    weights = []
    for i, cluster in enumerate(clusters):
        m_eff = min(cluster.stop - cluster.start, p)
        if p == 1:
            y = np.ones((1, 1), dtype=complex)
        elif d_next is not None:
            _, _, vh = np.linalg.svd(d_next[i])
            y = vh[p - m_eff:, :].conj().T   # null directions of D_n(node)
        else:
            first = d0_inv @ vecs[:p, cluster]
            q, _ = np.linalg.qr(first)
            y = q[:, :m_eff]
        gram = mk.hermitian_part(y.conj().T @ kernels[i] @ y)
        weights.append(mk.hermitian_part(y @ np.linalg.inv(gram)
                                         @ y.conj().T))
    measure = StepMeasure(p, np.array(nodes),
                          np.array(weights).reshape(len(nodes), p, p))
    return normalize(measure)
