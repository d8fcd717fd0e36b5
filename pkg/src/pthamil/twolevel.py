"""Closed-form solution of the two-level model ``alpha*sigma_1 + i*beta*sigma_2``.

Every quantity the generic machinery computes numerically has an explicit
formula here, which makes the model the oracle for validating the pipeline:
energies ``+-sqrt(alpha^2 - beta^2)``, the similarity ``S(theta)``, the metric
``V = cosh(2 theta) - sigma_3 sinh(2 theta)``, the metric-normalized
eigenvectors, and the Dirac overlap ``beta / sqrt(alpha^2 - beta^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antilinear import make_two_level_frame, sigma_dot
from .cpt import build_pv, p_normalize
from .errors import NotRealPhase
from .intertwiner import build_metric, v_gram
from .linalg import (
    DEFAULT_TOL,
    EigenSystem,
    SIGMA0,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    eigendecompose,
    mat_norm,
)
from .spectra import classify

#: Relative width of the exceptional strip around alpha == beta.
EXCEPTIONAL_REL_TOL = 1e-8


@dataclass(frozen=True)
class TwoLevelModel:
    """Parameters of the model matrix ``[[0, a+b], [a-b, 0]]``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")
        if self.alpha <= 0.0 or self.beta < 0.0:
            raise ValueError("require alpha > 0 and beta >= 0")

    def phase(self) -> str:
        """``real``, ``exceptional`` or ``complex`` according to alpha vs beta."""
        if abs(self.alpha - self.beta) <= EXCEPTIONAL_REL_TOL * (self.alpha + self.beta):
            return "exceptional"
        return "real" if self.alpha > self.beta else "complex"


def hamiltonian(m: TwoLevelModel) -> np.ndarray:
    """``[[0, alpha+beta], [alpha-beta, 0]]``."""
    return np.array(
        [[0.0, m.alpha + m.beta], [m.alpha - m.beta, 0.0]], dtype=complex
    )


@dataclass(frozen=True)
class ClosedForms:
    theta: float
    s: np.ndarray
    v: np.ndarray
    u_plus: np.ndarray
    u_minus: np.ndarray
    energies: tuple
    dirac_overlap: float


def closed_forms(m: TwoLevelModel) -> ClosedForms:
    """All closed-form quantities of the real-eigenvalue phase."""
    if m.phase() != "real":
        raise NotRealPhase(
            f"closed forms require alpha > beta, got alpha={m.alpha}, beta={m.beta}"
        )
    alpha, beta = m.alpha, m.beta
    gap = math.sqrt(alpha * alpha - beta * beta)
    theta = 0.5 * math.atanh(beta / alpha)
    s = math.cosh(theta) * SIGMA0 - math.sinh(theta) * SIGMA3
    cosh2, sinh2 = alpha / gap, beta / gap
    v = cosh2 * SIGMA0 - sinh2 * SIGMA3
    norm = 2.0 * gap
    u_plus = np.array([math.sqrt(alpha + beta), math.sqrt(alpha - beta)], dtype=complex)
    u_plus = u_plus / math.sqrt(norm)
    u_minus = np.array([math.sqrt(alpha + beta), -math.sqrt(alpha - beta)], dtype=complex)
    u_minus = u_minus / math.sqrt(norm)
    return ClosedForms(
        theta=theta,
        s=s,
        v=v,
        u_plus=u_plus,
        u_minus=u_minus,
        energies=(gap, -gap),
        dirac_overlap=beta / gap,
    )


def similarity_conjugation(m: TwoLevelModel, theta: float) -> np.ndarray:
    """``S(theta) H S(theta)^-1`` in closed form, for any theta:
    ``(alpha cosh 2t - beta sinh 2t) sigma_1 + (beta cosh 2t - alpha sinh 2t) i sigma_2``."""
    c2, s2 = math.cosh(2.0 * theta), math.sinh(2.0 * theta)
    return (m.alpha * c2 - m.beta * s2) * SIGMA1 + (m.beta * c2 - m.alpha * s2) * 1j * SIGMA2


def bloch_hamiltonian(h0: complex, h_real, h_imag) -> np.ndarray:
    """``h0 sigma_0 + sigma . (h_real + i h_imag)`` for real 3-vectors."""
    h_real = np.asarray(h_real, dtype=float)
    h_imag = np.asarray(h_imag, dtype=float)
    return complex(h0) * SIGMA0 + sigma_dot(h_real + 1j * h_imag)


def pt_symmetry_conditions(h0, h_real, h_imag, pvec, tvec, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``h0 sigma_0 + sigma . (h_R + i h_I)`` is PT symmetric in the
    frame built on ``(pvec, tvec)``.

    The constraints are: ``Im h0 = 0``; the in-plane part of ``h_I`` along both
    frame axes vanishes; and ``h_R`` lies entirely in the plane spanned by the
    frame axes.
    """
    make_two_level_frame(pvec, tvec, tol)  # validates the frame, may raise
    pvec = np.asarray(pvec, dtype=float)
    tvec = np.asarray(tvec, dtype=float)
    h_real = np.asarray(h_real, dtype=float)
    h_imag = np.asarray(h_imag, dtype=float)
    scale = max(1.0, float(np.linalg.norm(h_real)), float(np.linalg.norm(h_imag)))
    if abs(complex(h0).imag) > tol * max(1.0, abs(complex(h0))):
        return False
    in_plane_imag = np.dot(h_imag, pvec) * pvec + np.dot(h_imag, tvec) * tvec
    if np.linalg.norm(in_plane_imag) > tol * scale:
        return False
    out_of_plane_real = np.dot(h_real, pvec) * pvec + np.dot(h_real, tvec) * tvec - h_real
    if np.linalg.norm(out_of_plane_real) > tol * scale:
        return False
    return True


@dataclass(frozen=True)
class PipelineComparison:
    """Residuals of the generic pipeline against the closed forms, after
    phase-convention alignment."""

    residuals: dict
    max_residual: float


def compare_with_pipeline(m: TwoLevelModel, tol: float = DEFAULT_TOL) -> PipelineComparison:
    """Run the generic pipeline on the model and measure field-by-field
    residuals against the closed forms.

    Alignment glue: pipeline eigenvectors are matched to the closed-form ones
    by maximal overlap and rescaled onto them (after parity calibration the
    rescale is a pure phase); the metric and all Gram matrices are then
    rebuilt from the aligned basis before comparison.
    """
    cf = closed_forms(m)
    h = hamiltonian(m)
    frame = make_two_level_frame((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    es = eigendecompose(h, tol)
    cls = classify(es, tol)
    es, _ = p_normalize(es, frame.p, tol)

    targets = (cf.u_plus, cf.u_minus)
    right = np.array(es.right)
    used = set()
    order = []
    for target in targets:
        overlaps = [
            abs(np.vdot(right[:, k], target)) / np.linalg.norm(right[:, k])
            if k not in used else -1.0
            for k in range(2)
        ]
        k = int(np.argmax(overlaps))
        used.add(k)
        order.append(k)
    aligned = np.empty_like(right)
    for col, (target, k) in enumerate(zip(targets, order)):
        scale = np.vdot(right[:, k], target) / np.vdot(right[:, k], right[:, k])
        aligned[:, col] = scale * right[:, k]
    values = es.values[np.asarray(order)]
    es = EigenSystem(values, aligned, np.linalg.inv(aligned),
                     float(np.linalg.cond(aligned)))

    itw = build_metric(es, cls, tol)
    report = v_gram(es, itw, cls, p=frame.p, tol=tol)
    pv = build_pv(frame.p, itw.v, es, tol)

    energies = np.array([cf.energies[0], cf.energies[1]])
    residuals = {
        "energies": float(np.max(np.abs(es.values - energies))),
        "u_plus": float(np.linalg.norm(es.right[:, 0] - cf.u_plus)),
        "u_minus": float(np.linalg.norm(es.right[:, 1] - cf.u_minus)),
        "metric": mat_norm(itw.v - cf.v),
        "dirac_overlap": abs(report.dirac[1, 0] - cf.dirac_overlap),
        "v_gram_identity": mat_norm(report.vnorm - np.eye(2)),
        "p_gram_signature": mat_norm(report.pnorm - np.diag([1.0, -1.0])),
        "pv_squares_to_identity": mat_norm(pv.matrix @ pv.matrix - np.eye(2)),
        "similarity_hermitian": mat_norm(
            (es.left @ h @ es.right) - (es.left @ h @ es.right).conj().T
        ),
    }
    return PipelineComparison(residuals, max(residuals.values()))
