"""Similarity transforms, the metric operator, and metric-based inner products.

For a diagonalizable H the operator ``V`` with ``V H V^-1 = H^dagger`` defines
the inner product ``<R_n|V|R_m>`` that stays constant under ``exp(-iHt)``
evolution. With an all-real spectrum ``V = S^dagger S`` is positive definite
(``S`` any similarity bringing H to Hermitian form); with conjugate pairs a
Hermitian, indefinite ``V`` still exists whose only non-vanishing eigenbasis
elements connect the two members of a pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .antilinear import PTFrame, PTPhases, pt_gram
from .errors import NotRealSpectrum, PTHamilError
from .linalg import DEFAULT_TOL, EigenSystem, as_matrix, eigendecompose, inverse, mat_norm
from .spectra import SpectrumClass, SpectrumKind, spectral_scale


@dataclass(frozen=True)
class Intertwiner:
    """Metric data: ``v`` intertwines (``v @ H == H^dagger @ v``); ``s`` is a
    similarity to Hermitian form (real spectrum only)."""

    s: np.ndarray | None
    v: np.ndarray
    positive: bool
    hermitian: bool
    residual: float

    def __post_init__(self):
        for name in ("s", "v"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=complex)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class Flag:
    passed: bool
    residual: float
    threshold: float


@dataclass(frozen=True)
class NormReport:
    """Gram matrices of the candidate inner products plus pass/fail flags."""

    dirac: np.ndarray
    vnorm: np.ndarray
    pnorm: np.ndarray | None = None
    ptnorm: np.ndarray | None = None
    flags: dict = field(default_factory=dict)


def build_similarity(es: EigenSystem, cls: SpectrumClass) -> np.ndarray:
    """Similarity S with ``S H S^-1 = diag(E)``, Hermitian when the spectrum is
    real: the left-eigenvector matrix."""
    if cls.kind is not SpectrumKind.ALL_REAL:
        raise NotRealSpectrum("similarity to Hermitian form requires a real spectrum")
    return np.array(es.left)


def build_metric(es: EigenSystem, cls: SpectrumClass, tol: float = DEFAULT_TOL) -> Intertwiner:
    """Construct the metric for the given spectrum class.

    All-real: ``V = L^dagger L`` (equivalently ``S^dagger S`` with ``S = L``),
    Hermitian and positive definite, with ``<R_n|V|R_m>`` the identity by
    construction. Conjugate pairs: the Hermitian pair-swap combination of
    left-vector projectors, which intertwines but is indefinite and has zero
    diagonal on the paired eigenstates.
    """
    h = es.reconstruct()
    if cls.kind is SpectrumKind.ALL_REAL:
        s = np.array(es.left)
        v = s.conj().T @ s
        v = 0.5 * (v + v.conj().T)
        positive = bool(np.all(np.linalg.eigvalsh(v) > 0.0))
    elif cls.kind is SpectrumKind.CONJUGATE_PAIRS:
        s = None
        v = np.zeros((es.dim, es.dim), dtype=complex)
        for n in cls.real_indices:
            v += np.outer(np.conj(es.left[n]), es.left[n])
        for n_plus, n_minus in cls.pairs:
            v += np.outer(np.conj(es.left[n_minus]), es.left[n_plus])
            v += np.outer(np.conj(es.left[n_plus]), es.left[n_minus])
        v = 0.5 * (v + v.conj().T)
        positive = False
    else:
        raise PTHamilError("no metric is constructed for an exceptional spectrum")
    hermitian = mat_norm(v - v.conj().T) <= tol * max(1.0, mat_norm(v))
    denom = mat_norm(v) * mat_norm(h)
    residual = mat_norm(v @ h - h.conj().T @ v) / denom if denom > 0.0 else 0.0
    return Intertwiner(s, v, positive, hermitian, float(residual))


def v_gram(
    es: EigenSystem,
    itw: Intertwiner,
    cls: SpectrumClass | None = None,
    p=None,
    frame: PTFrame | None = None,
    phases: PTPhases | None = None,
    tol: float = DEFAULT_TOL,
) -> NormReport:
    """Gram matrices of the Dirac, V, parity and PT-conjugate inner products.

    The Dirac, V and parity Grams are evaluated on the given eigensystem; the
    PT-conjugate Gram uses the phase-fixed states carried by ``phases`` (its
    diagonal is rephasing-invariant, so the two bases give the same identities).
    Pass ``cls`` for structure-aware flags; without it the real-spectrum
    identity check is assumed.
    """
    r = es.right
    dirac = r.conj().T @ r
    vnorm = r.conj().T @ itw.v @ r
    pnorm = r.conj().T @ as_matrix(p, "P") @ r if p is not None else None
    ptnorm = pt_gram(frame, phases) if (frame is not None and phases is not None) else None

    flags = {}
    eye = np.eye(es.dim)
    if cls is None or cls.kind is SpectrumKind.ALL_REAL:
        res = mat_norm(vnorm - eye)
        flags["v_gram_identity"] = Flag(res <= tol * es.dim, float(res), tol * es.dim)
    elif cls.kind is SpectrumKind.CONJUGATE_PAIRS:
        expected = np.zeros((es.dim, es.dim), dtype=complex)
        for n in cls.real_indices:
            expected[n, n] = 1.0
        for n_plus, n_minus in cls.pairs:
            expected[n_plus, n_minus] = 1.0
            expected[n_minus, n_plus] = 1.0
        res = mat_norm(vnorm - expected)
        flags["v_gram_pair_swap"] = Flag(res <= tol * es.dim, float(res), tol * es.dim)
        diag = max(abs(vnorm[i, i]) for pair in cls.pairs for i in pair) if cls.pairs else 0.0
        flags["v_gram_zero_diagonal_on_pairs"] = Flag(diag <= tol * es.dim, float(diag), tol * es.dim)
    if pnorm is not None and (cls is None or cls.kind is SpectrumKind.ALL_REAL):
        # reality of the parity overlaps is a real-spectrum theorem only
        res = float(np.max(np.abs(pnorm.imag[np.abs(pnorm) > tol]))) if np.any(np.abs(pnorm) > tol) else 0.0
        flags["p_gram_real"] = Flag(res <= tol * max(1.0, mat_norm(pnorm)), res,
                                    tol * max(1.0, mat_norm(pnorm)))
    if ptnorm is not None:
        res = mat_norm(ptnorm - vnorm)
        flags["pt_gram_equals_v_gram"] = Flag(res <= tol * es.dim, float(res), tol * es.dim)
    return NormReport(dirac, vnorm, pnorm, ptnorm, flags)


def evolution_operator(es: EigenSystem, t: float) -> np.ndarray:
    """``exp(-iHt)`` assembled from the eigendecomposition (exact on
    diagonalizable H, never a series)."""
    return es.right @ np.diag(np.exp(-1j * es.values * t)) @ es.left


@dataclass(frozen=True)
class TimeIndependence:
    """Drift of ``<R_n(t)|V|R_m(t)>`` over sampled times, entry-by-entry.

    ``present`` marks entries whose initial magnitude is above the numerical
    floor; only those enter the drift bound. Entries at the floor are
    analytically zero by the selection rule; their floating-point shadows grow
    with the mode amplification ``e^{(|Im E_n| + |Im E_m|) t}`` and are
    reported as ``max_shadow`` rather than counted as drift.
    """

    times: tuple
    gram0: np.ndarray
    drift: np.ndarray
    present: np.ndarray
    passed: np.ndarray
    max_drift: float
    max_shadow: float
    selection_violations: tuple
    ok: bool


def verify_time_independence(
    h,
    v,
    times,
    tol: float = 1e-8,
    es: EigenSystem | None = None,
) -> TimeIndependence:
    """Evolve every eigenstate with ``exp(-iHt)`` and bound the drift of the
    V inner products, entry by entry.

    Also checks the selection rule: an entry ``(n, m)`` of the initial Gram may
    be nonzero only when ``E_m = conj(E_n)`` — for a real spectrum the
    diagonal, for conjugate pairs the cross-pair transitions.
    """
    h = as_matrix(h, "H")
    v = as_matrix(v, "V")
    if es is None:
        es = eigendecompose(h)
    r = es.right
    gram0 = r.conj().T @ v @ r
    entry_floor = tol * max(1.0, mat_norm(gram0))
    present = np.abs(gram0) > entry_floor
    drift = np.zeros(gram0.shape, dtype=float)
    for t in times:
        # exp(-iHt) acts on its own eigenvectors by pure phases; forming the
        # dense propagator first would erase decaying modes by cancellation
        phase = np.exp(-1j * es.values * float(t))
        evolved = r * phase[np.newaxis, :]
        gram_t = evolved.conj().T @ v @ evolved
        drift = np.maximum(drift, np.abs(gram_t - gram0))
    threshold = tol * max(1.0, mat_norm(gram0))
    passed = (drift <= threshold) | ~present

    scale = spectral_scale(es.values)
    violations = []
    for n in range(es.dim):
        for m in range(es.dim):
            if present[n, m] and abs(es.values[m] - np.conj(es.values[n])) > tol * scale:
                violations.append((n, m))
    max_drift = float(np.max(drift[present])) if np.any(present) else 0.0
    max_shadow = float(np.max(drift[~present])) if np.any(~present) else 0.0
    return TimeIndependence(
        tuple(float(t) for t in times),
        gram0,
        drift,
        present,
        passed,
        max_drift,
        max_shadow,
        tuple(violations),
        bool(np.all(passed)) and not violations,
    )


def metric_transform(v, s, h=None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Transport a metric to the transformed system: ``V' = S^-dagger V S^-1``.

    This is not a similarity transformation; it is the map under which ``V'``
    keeps intertwining ``H' = S H S^-1`` with its adjoint, which is verified
    when ``h`` is supplied.
    """
    v = as_matrix(v, "V")
    s_inv = inverse(s, tol)
    v_prime = s_inv.conj().T @ v @ s_inv
    if h is not None:
        h = as_matrix(h, "H")
        h_prime = as_matrix(s, "S") @ h @ s_inv
        denom = mat_norm(v_prime) * mat_norm(h_prime)
        residual = mat_norm(v_prime @ h_prime - h_prime.conj().T @ v_prime)
        if denom > 0.0 and residual > tol * denom * 1e2:
            raise PTHamilError(
                f"transformed metric fails to intertwine (residual {residual:.3e})"
            )
    return v_prime
