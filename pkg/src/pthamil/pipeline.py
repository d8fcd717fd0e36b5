"""Analysis orchestration: configuration, the full pipeline, batch mode, and
the JSON report representation.

A report is plain data (dicts, lists, numbers, strings; complex numbers as
``[re, im]`` pairs and matrices in the same ``{"dim", "re", "im"}`` layout as
the matrix file format), so ``parse(emit(report)) == report`` holds exactly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .antilinear import AntilinearOp, fix_pt_phases, make_frame, pt_gram
from .cpt import (
    build_c,
    build_pv,
    c_pt_diagnostic,
    check_p_intertwines,
    diagnostic_is_degenerate,
    p_normalize,
)
from .errors import (
    InvalidFrame,
    NonDiagonalizable,
    NotPTEigenstate,
    NotRealPhase,
    ParseError,
    PTHamilError,
    UnpairedComplexEigenvalue,
)
from .fockdemo import truncated_position_matrix
from .intertwiner import build_metric, build_similarity, v_gram, verify_time_independence
from .linalg import DEFAULT_TOL, SIGMA1, SIGMA2, SIGMA3, eigendecompose, identity
from .matio import load_matrix, matrix_to_dict
from .spectra import SpectrumKind, antilinear_symmetry_check, classify
from .twolevel import TwoLevelModel, hamiltonian as two_level_hamiltonian

#: Environment variable overriding the default tolerance.
TOL_ENV_VAR = "PTHAMIL_TOL"

DEFAULT_TIMES = (0.0, 0.5, 1.7, 4.3)

_P_BUILTINS = {
    "sigma1": lambda dim: _require_dim(SIGMA1, dim, "sigma1"),
    "sigma2": lambda dim: _require_dim(SIGMA2, dim, "sigma2"),
    "sigma3": lambda dim: _require_dim(SIGMA3, dim, "sigma3"),
    "identity": lambda dim: identity(dim),
    "alternating": lambda dim: np.diag([(-1.0 + 0j) ** n for n in range(dim)]),
}

_T_BUILTINS = {
    # named by operator form; stored as the matrix u of the action v -> u conj(v)
    "k": lambda dim: identity(dim),
    "ki": lambda dim: -1j * identity(dim),
    "kisigma1": lambda dim: _require_dim(-1j * SIGMA1, dim, "kisigma1"),
}


def _require_dim(m, dim, name):
    if m.shape[0] != dim:
        raise ParseError(f"builtin {name!r} is {m.shape[0]}x{m.shape[0]}, need dim {dim}")
    return m


@dataclass(frozen=True)
class AnalysisConfig:
    """One analysis: exactly one input source, optional frame, tolerances."""

    source_path: str | None = None
    model: str | None = None
    alpha: float | None = None
    beta: float | None = None
    nmax: int | None = None
    p_spec: str | None = None
    t_spec: str | None = None
    tol: float | None = None
    times: tuple = DEFAULT_TIMES
    c_signs: tuple | None = None
    output: str = "text"

    def __post_init__(self):
        if (self.source_path is None) == (self.model is None):
            raise ValueError("exactly one of a file path or a builtin model is required")
        if self.model is not None and self.model not in ("two-level", "fock-x"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.tol is not None and not self.tol > 0.0:
            raise ValueError("tolerance must be positive")
        if self.output not in ("text", "json", "csv"):
            raise ValueError(f"unknown output format {self.output!r}")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))


def resolve_tol(cfg: AnalysisConfig) -> float:
    """Tolerance precedence: explicit config, then the environment, then default."""
    if cfg.tol is not None:
        return float(cfg.tol)
    env = os.environ.get(TOL_ENV_VAR)
    if env is not None:
        try:
            value = float(env)
        except ValueError as exc:
            raise ParseError(f"{TOL_ENV_VAR} is not a number: {env!r}") from exc
        if not value > 0.0:
            raise ParseError(f"{TOL_ENV_VAR} must be positive, got {env!r}")
        return value
    return DEFAULT_TOL


def _load_hamiltonian(cfg: AnalysisConfig):
    if cfg.source_path is not None:
        return load_matrix(cfg.source_path), {"file": cfg.source_path}
    if cfg.model == "two-level":
        if cfg.alpha is None or cfg.beta is None:
            raise ParseError("model two-level requires alpha and beta")
        m = TwoLevelModel(cfg.alpha, cfg.beta)
        return two_level_hamiltonian(m), {"model": "two-level", "alpha": m.alpha, "beta": m.beta}
    if cfg.nmax is None or cfg.nmax < 2:
        raise ParseError("model fock-x requires nmax >= 2")
    return truncated_position_matrix(cfg.nmax), {"model": "fock-x", "nmax": cfg.nmax}


def _default_frame_specs(cfg: AnalysisConfig):
    p_spec, t_spec = cfg.p_spec, cfg.t_spec
    if p_spec == "none":
        return None, None
    if cfg.model == "two-level":
        p_spec = p_spec or "sigma1"
        t_spec = t_spec or "kisigma1"
    elif cfg.model == "fock-x":
        p_spec = p_spec or "alternating"
        t_spec = t_spec or "k"
    elif p_spec is not None and t_spec is None:
        t_spec = "k"
    return p_spec, t_spec


def _resolve_p(spec: str, dim: int):
    if spec in _P_BUILTINS:
        return _P_BUILTINS[spec](dim)
    return load_matrix(spec)


def _resolve_t(spec: str, dim: int) -> AntilinearOp:
    if spec in _T_BUILTINS:
        return AntilinearOp(_T_BUILTINS[spec](dim))
    return AntilinearOp(load_matrix(spec))


def _complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def _flags_dict(flags) -> dict:
    return {
        name: {"passed": bool(f.passed), "residual": float(f.residual),
               "threshold": float(f.threshold)}
        for name, f in flags.items()
    }


@dataclass
class AnalysisReport:
    """Plain-data analysis report; ``to_dict`` fixes the JSON key layout."""

    provenance: dict
    spectrum: dict
    eigen: dict
    s: dict | None
    v: dict | None
    gram: dict | None
    pt: dict
    pv: dict
    c: dict
    diagnostic: str | dict
    time_independence: dict
    selection_rule_violations: list
    flags: dict
    notes: list

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "spectrum": self.spectrum,
            "eigen": self.eigen,
            "S": self.s,
            "V": self.v,
            "gram": self.gram,
            "pt": self.pt,
            "pv": self.pv,
            "c": self.c,
            "diagnostic": self.diagnostic,
            "time_independence": self.time_independence,
            "selection_rule_violations": self.selection_rule_violations,
            "flags": self.flags,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        renamed = dict(d)
        renamed["s"] = renamed.pop("S")
        renamed["v"] = renamed.pop("V")
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in renamed.items() if k in known})


def emit_report(report: AnalysisReport) -> str:
    import json

    return json.dumps(report.to_dict(), indent=2, sort_keys=True)


def parse_report(text: str) -> AnalysisReport:
    import json

    return AnalysisReport.from_dict(json.loads(text))


def run_analyze(cfg: AnalysisConfig) -> AnalysisReport:
    """Run the full pipeline: classify, build the metric and its Gram matrices,
    then the parity-dependent sections, the diagnostic, and time independence.

    Raises ParseError for unreadable input, NonDiagonalizable at an exceptional
    point, and UnpairedComplexEigenvalue when the spectrum admits no antilinear
    symmetry. Sections whose preconditions fail are marked skipped with the
    reason instead of aborting the analysis.
    """
    tol = resolve_tol(cfg)
    h, source_info = _load_hamiltonian(cfg)
    notes: list = []

    es = eigendecompose(h, tol)  # may raise NonDiagonalizable
    cls = classify(es, tol)      # may raise UnpairedComplexEigenvalue
    real_case = cls.kind is SpectrumKind.ALL_REAL

    p_spec, t_spec = _default_frame_specs(cfg)
    p = _resolve_p(p_spec, es.dim) if p_spec else None
    t_op = _resolve_t(t_spec, es.dim) if t_spec else None
    frame = None
    if p is not None and t_op is not None:
        frame = make_frame(p, t_op, max(tol, 1e-8))  # may raise InvalidFrame

    p_intertwines = False
    if p is not None:
        p_intertwines = check_p_intertwines(h, p, max(tol, 1e-8))
        if p_intertwines and real_case:
            es, skipped = p_normalize(es, p, tol)
            if skipped:
                notes.append(
                    f"parity calibration skipped for states {skipped}: "
                    "parity overlap below tolerance (degenerate PV eigenvalue)"
                )
        elif not p_intertwines:
            notes.append("P does not intertwine H with its adjoint; PV and C norms skipped")

    pt_section: dict = {}
    phases = None
    if frame is not None:
        symmetric = antilinear_symmetry_check(h, frame.pt, max(tol, 1e-8))
        pt_section["symmetry_check"] = bool(symmetric)
        if not symmetric:
            notes.append("H is not PT symmetric under the supplied frame")
        if real_case:
            try:
                phases = fix_pt_phases(frame.pt, es, cls, p=p, tol=tol)
            except NotPTEigenstate as exc:
                pt_section["skipped"] = f"PT phases unavailable: {exc}"
        else:
            pt_section["skipped"] = (
                "complex-pair spectrum: PT maps each state onto its partner, "
                "so per-state PT phases do not exist"
            )
    else:
        pt_section["skipped"] = "no parity/time-reversal frame supplied"

    if phases is not None and phases.degenerate_groups:
        # recombining a degenerate eigenspace changes the basis; keep every
        # section on the recombined one
        es = phases.system
        notes.append(
            f"degenerate eigenvalue groups {list(phases.degenerate_groups)} "
            "recombined into a PT eigenbasis; all sections use that basis"
        )

    itw = build_metric(es, cls, tol)
    s_matrix = build_similarity(es, cls) if real_case else None

    if phases is not None:
        pt_section.update(
            {
                "eta": _complex_list(phases.eta),
                "phase_fix": _complex_list(phases.phase_fix),
                "gram": matrix_to_dict(pt_gram(frame, phases)),
                "degenerate_groups": [list(g) for g in phases.degenerate_groups],
            }
        )

    norm_report = v_gram(es, itw, cls, p=p, frame=frame, phases=phases, tol=max(tol, 1e-9))

    pv_section: dict = {}
    c_section: dict = {}
    diagnostic: str | dict = {"skipped": "no C operator was built"}
    commutant = None
    if real_case and p is not None and p_intertwines:
        pv = build_pv(p, itw.v, es, max(tol, 1e-8))
        pv_section = {
            "matrix": matrix_to_dict(pv.matrix),
            "alphas": _complex_list(pv.alphas),
            "squares_to_identity": bool(pv.squares_to_identity),
        }
        signs = cfg.c_signs or tuple(1 if a.real >= 0.0 else -1 for a in pv.alphas)
        commutant = build_c(es, cls, signs, tol)
        c_section = {"matrix": matrix_to_dict(commutant.matrix),
                     "signs": [int(s) for s in signs]}
    elif real_case:
        reason = ("P does not intertwine H with its adjoint"
                  if p is not None else "no parity supplied")
        pv_section = {"skipped": f"{reason}; the V norm remains available"}
        if cfg.c_signs is not None:
            commutant = build_c(es, cls, cfg.c_signs, tol)
            c_section = {"matrix": matrix_to_dict(commutant.matrix),
                         "signs": [int(s) for s in cfg.c_signs]}
        else:
            c_section = {"skipped": f"{reason}; supply c_signs to build C anyway"}
    else:
        pv_section = {"skipped": "complex-pair spectrum: PV plays no role"}
        signs = cfg.c_signs or tuple(1 for _ in cls.pairs)
        commutant = build_c(es, cls, signs, tol)
        c_section = {"matrix": matrix_to_dict(commutant.matrix),
                     "signs": [int(s) for s in signs]}

    if commutant is not None and frame is not None:
        verdict = c_pt_diagnostic(commutant, frame.pt, max(tol, 1e-8))
        diagnostic = verdict.value
        c_section["commutes_with_pt"] = verdict.value == "real_spectrum"
        if diagnostic_is_degenerate(commutant, tol):
            notes.append("diagnostic degenerate: C is proportional to the identity")
    elif commutant is not None:
        diagnostic = {"skipped": "no frame supplied for the [C, PT] diagnostic"}

    drift_tol = max(tol, 1e-8)
    tic = verify_time_independence(h, itw.v, cfg.times, drift_tol, es=es)

    flags = _flags_dict(norm_report.flags)
    flags["metric_intertwines"] = {
        "passed": itw.residual <= max(tol, 1e-9),
        "residual": itw.residual,
        "threshold": max(tol, 1e-9),
    }
    flags["time_independent"] = {
        "passed": bool(np.all(tic.passed)),
        "residual": tic.max_drift,
        "threshold": drift_tol,
    }

    v_section = dict(
        matrix_to_dict(itw.v),
        hermitian=bool(itw.hermitian),
        positive=bool(itw.positive),
        residual=float(itw.residual),
    )
    report = AnalysisReport(
        provenance={
            "tool": "pthamil",
            "version": __version__,
            "source": source_info,
            "tol": tol,
            "times": list(cfg.times),
            "p": p_spec,
            "t": t_spec,
        },
        spectrum={
            "kind": cls.kind.value,
            "pairs": [list(p_) for p_ in cls.pairs],
            "real_indices": list(cls.real_indices),
            "condition": es.condition,
            "exceptional_threshold": 1.0 / tol,
        },
        eigen={
            "values": _complex_list(es.values),
            "right": matrix_to_dict(es.right),
            "left": matrix_to_dict(es.left),
            "condition": es.condition,
        },
        s=matrix_to_dict(s_matrix) if s_matrix is not None else None,
        v=v_section,
        gram={
            "dirac": matrix_to_dict(norm_report.dirac),
            "v": matrix_to_dict(norm_report.vnorm),
            "p": matrix_to_dict(norm_report.pnorm) if norm_report.pnorm is not None else None,
            "pt": matrix_to_dict(norm_report.ptnorm) if norm_report.ptnorm is not None else None,
        },
        pt=pt_section,
        pv=pv_section,
        c=c_section,
        diagnostic=diagnostic,
        time_independence={
            "times": list(tic.times),
            "max_drift": tic.max_drift,
            "max_zero_entry_shadow": tic.max_shadow,
        },
        selection_rule_violations=[list(vio) for vio in tic.selection_violations],
        flags=flags,
        notes=notes,
    )
    return report


#: exit codes shared by the CLI and batch entries
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_NO_ANTILINEAR = 3
EXIT_EXCEPTIONAL = 4


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ParseError, InvalidFrame, NotRealPhase, ValueError)):
        return EXIT_PARSE
    if isinstance(exc, UnpairedComplexEigenvalue):
        return EXIT_NO_ANTILINEAR
    if isinstance(exc, NonDiagonalizable):
        return EXIT_EXCEPTIONAL
    return EXIT_ERROR


def error_entry(exc: BaseException) -> dict:
    entry = {
        "type": type(exc).__name__,
        "message": str(exc),
        "exit_code": exit_code_for(exc),
    }
    if isinstance(exc, NonDiagonalizable):
        entry["note"] = (
            "exceptional point: eigenvalues merge and the matrix is not "
            f"diagonalizable (condition {exc.condition:.3e} > {exc.threshold:.3e})"
        )
    if isinstance(exc, UnpairedComplexEigenvalue):
        entry["note"] = "no antilinear symmetry: " + str(exc)
    return entry


def run_batch(paths, parallelism: int = 1, base_cfg: AnalysisConfig | None = None) -> list:
    """Analyze many files concurrently; output order always matches input order.

    Per-file failures become error entries instead of aborting the batch.
    """
    paths = list(paths)
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    def one(path: str) -> dict:
        cfg = AnalysisConfig(
            source_path=path,
            p_spec=base_cfg.p_spec if base_cfg else None,
            t_spec=base_cfg.t_spec if base_cfg else None,
            tol=base_cfg.tol if base_cfg else None,
            times=base_cfg.times if base_cfg else DEFAULT_TIMES,
        )
        try:
            return {"path": path, "report": run_analyze(cfg).to_dict()}
        except PTHamilError as exc:
            return {"path": path, "error": error_entry(exc)}

    if not paths:
        return []
    if parallelism == 1:
        return [one(p) for p in paths]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, paths))
