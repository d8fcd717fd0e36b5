"""Dense complex matrix primitives and the biorthogonal eigendecomposition.

Everything downstream (classification, metrics, commutants) is built on the
:class:`EigenSystem` produced here: eigenvalues in a canonical order, right
eigenvectors with a deterministic phase, and left eigenvectors obtained by
inverting the right-eigenvector matrix so that ``left @ right == identity``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NonDiagonalizable, Singular

#: Default relative tolerance for every comparison in the toolkit.
DEFAULT_TOL = 1e-10

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a square complex matrix with finite entries."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def mat_norm(a) -> float:
    """Frobenius norm, the scale used for all residuals."""
    return float(np.linalg.norm(a))


def approx_equal(a, b, tol: float = DEFAULT_TOL, scale: float | None = None) -> bool:
    """Tolerance-based matrix equality: ``|a - b| <= tol * scale``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if scale is None:
        scale = max(1.0, mat_norm(a), mat_norm(b))
    return mat_norm(a - b) <= tol * scale


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def inverse(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix inverse, rejecting inputs whose smallest singular value is below
    ``tol`` times the largest."""
    a = as_matrix(a)
    singular_values = np.linalg.svd(a, compute_uv=False)
    if singular_values[-1] <= tol * singular_values[0]:
        raise Singular(
            f"smallest singular value {singular_values[-1]:.3e} below "
            f"tol * largest = {tol * singular_values[0]:.3e}"
        )
    return np.linalg.inv(a)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues with biorthogonal right/left eigenvectors.

    ``values[n]`` belongs to the right eigenvector ``right[:, n]`` and the left
    eigenvector ``left[n, :]``; ``left @ right`` is the identity within
    tolerance and ``right @ diag(values) @ left`` reconstructs the matrix.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition: float

    def __post_init__(self):
        for name in ("values", "right", "left"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.values.shape[0]
        if self.right.shape != (n, n) or self.left.shape != (n, n):
            raise ValueError("inconsistent eigensystem shapes")

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def reconstruct(self) -> np.ndarray:
        """The matrix this system decomposes: ``right @ diag(values) @ left``."""
        return self.right @ np.diag(self.values) @ self.left

    def with_right(self, right: np.ndarray) -> "EigenSystem":
        """New system with replaced right eigenvectors; left recomputed as the inverse."""
        right = np.asarray(right, dtype=complex)
        return EigenSystem(self.values.copy(), right, np.linalg.inv(right),
                           float(np.linalg.cond(right)))


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Permutation sorting eigenvalues by real part descending, then imaginary
    part descending."""
    return np.lexsort((-np.asarray(values).imag, -np.asarray(values).real))


def _canonical_phases(r: np.ndarray) -> np.ndarray:
    """Unit-normalize each column and rotate its largest-magnitude component to
    the positive real axis."""
    r = np.array(r, dtype=complex)
    for j in range(r.shape[1]):
        col = r[:, j]
        nrm = np.linalg.norm(col)
        if nrm > 0.0:
            col = col / nrm
        k = int(np.argmax(np.abs(col)))
        pivot = col[k]
        if abs(pivot) > 0.0:
            col = col * (pivot.conjugate() / abs(pivot))
        r[:, j] = col
    return r


def eigendecompose(h, tol: float = DEFAULT_TOL) -> EigenSystem:
    """Full complex eigendecomposition with biorthogonal left vectors.

    Eigenvalues are sorted (real descending, imaginary descending), right
    eigenvectors are unit-norm with their largest-magnitude component real and
    positive, and ``left = inv(right)``.

    Raises
    ------
    NonDiagonalizable
        if ``cond(right)`` exceeds ``1/tol`` (exceptional-point threshold).
    ConvergenceFailure
        if the underlying QR iteration does not converge.
    """
    h = as_matrix(h, "H")
    try:
        values, r = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = canonical_order(values)
    values = values[order]
    r = _canonical_phases(r[:, order])
    condition = float(np.linalg.cond(r))
    threshold = 1.0 / tol
    if not np.isfinite(condition) or condition > threshold:
        raise NonDiagonalizable(condition, threshold)
    left = np.linalg.inv(r)
    return EigenSystem(values, r, left, condition)
