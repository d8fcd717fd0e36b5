"""Tests for the PV operator, the C operator, and the [C, PT] diagnostic."""

import numpy as np
import pytest

from pthamil.cpt import (
    SpectrumDiagnostic,
    build_c,
    build_pv,
    c_pt_diagnostic,
    check_p_intertwines,
    diagnostic_is_degenerate,
    p_normalize,
    pair_completeness_check,
    parity_overlaps,
)
from pthamil.errors import NotCommuting
from pthamil.intertwiner import build_metric
from pthamil.linalg import SIGMA1, eigendecompose, identity
from pthamil.spectra import SpectrumClass, SpectrumKind, classify
from pthamil.twolevel import TwoLevelModel, hamiltonian
from testutil import canonical_two_level_frame, rng


def _real_system(alpha=5.0, beta=3.0, calibrate=True):
    h = hamiltonian(TwoLevelModel(alpha, beta))
    es = eigendecompose(h)
    cls = classify(es)
    if calibrate:
        es, _ = p_normalize(es, SIGMA1)
    itw = build_metric(es, cls)
    return h, es, cls, itw


class TestCheckPIntertwines:
    def test_two_level_family(self):
        for alpha, beta in ((5.0, 3.0), (3.0, 5.0), (1.0, 0.2)):
            h = hamiltonian(TwoLevelModel(alpha, beta))
            assert check_p_intertwines(h, SIGMA1)

    def test_hermitian_commuting_case(self):
        h = np.array([[0.0, 2.0], [2.0, 0.0]], dtype=complex)
        assert check_p_intertwines(h, SIGMA1)

    def test_upper_triangular_fails(self):
        # oracle: sigma_1 [[1,1],[0,2]] sigma_1 = [[2,0],[1,1]] != adjoint
        h = np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)
        assert np.allclose(SIGMA1 @ h @ SIGMA1, np.array([[2.0, 0.0], [1.0, 1.0]]))
        assert not check_p_intertwines(h, SIGMA1)

    def test_requires_involution(self):
        with pytest.raises(ValueError):
            check_p_intertwines(identity(2), np.diag([1.0, 2.0]))


class TestBuildPV:
    def test_two_level_closed_form(self):
        _, es, cls, itw = _real_system()
        pv = build_pv(SIGMA1, itw.v, es)
        assert np.allclose(pv.matrix, np.array([[0.0, 2.0], [0.5, 0.0]]), atol=1e-12)
        assert np.allclose(pv.matrix @ pv.matrix, identity(2), atol=1e-12)
        assert pv.squares_to_identity
        assert np.allclose(pv.alphas, [1.0, -1.0], atol=1e-12)

    def test_trivial_hermitian_case(self):
        h = np.array([[0.0, 2.0], [2.0, 0.0]], dtype=complex)
        es = eigendecompose(h)
        pv = build_pv(identity(2), identity(2), es)
        assert np.allclose(pv.matrix, identity(2))
        assert np.allclose(pv.alphas, [1.0, 1.0])

    def test_alpha_reciprocity(self):
        # alpha_n <R_n|P|R_n> = 1 for any eigenvector scaling
        _, es, cls, itw = _real_system(calibrate=False)
        pv = build_pv(SIGMA1, itw.v, es)
        overlaps = parity_overlaps(es, SIGMA1)
        assert np.allclose(pv.alphas * overlaps, [1.0, 1.0], atol=1e-12)

    def test_squares_flag_depends_on_calibration(self):
        # without parity calibration (PV)^2 = I fails by a scale factor
        _, es, cls, itw = _real_system(calibrate=False)
        pv = build_pv(SIGMA1, itw.v, es)
        assert not pv.squares_to_identity

    def test_non_intertwining_parity_rejected(self):
        h = np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)
        es = eigendecompose(h)
        itw = build_metric(es, classify(es))
        with pytest.raises(NotCommuting):
            build_pv(SIGMA1, itw.v, es)

    def test_complex_pair_alphas_rejected(self):
        # PV still commutes with H but its eigenvalues are imaginary
        h, es, cls, itw = None, None, None, None
        h = hamiltonian(TwoLevelModel(3, 5))
        es = eigendecompose(h)
        itw = build_metric(es, classify(es))
        with pytest.raises(ValueError):
            build_pv(SIGMA1, itw.v, es)

    def test_parity_gram_reciprocal_structure(self):
        # <R_n|P|R_m> = delta_nm / alpha_m
        _, es, cls, itw = _real_system(2.0, 0.7, calibrate=False)
        pv = build_pv(SIGMA1, itw.v, es)
        gram = es.right.conj().T @ SIGMA1 @ es.right
        assert np.allclose(gram, np.diag(1.0 / pv.alphas), atol=1e-12)


class TestBuildC:
    def test_all_plus_signs_is_identity(self):
        _, es, cls, _ = _real_system()
        c = build_c(es, cls, [1, 1])
        assert np.allclose(c.matrix, identity(2), atol=1e-12)

    def test_matches_pv(self):
        _, es, cls, itw = _real_system()
        pv = build_pv(SIGMA1, itw.v, es)
        c = build_c(es, cls, [1, -1])
        assert np.allclose(c.matrix, pv.matrix, atol=1e-12)

    def test_pc_equals_metric(self):
        # P C = V when C = PV and P squares to one
        _, es, cls, itw = _real_system()
        c = build_c(es, cls, [1, -1])
        assert np.allclose(SIGMA1 @ c.matrix, itw.v, atol=1e-12)

    def test_complex_pair_form(self):
        h = hamiltonian(TwoLevelModel(3, 5))
        es = eigendecompose(h)
        cls = classify(es)
        c = build_c(es, cls, [1])
        assert np.allclose(c.matrix @ c.matrix, identity(2), atol=1e-12)
        assert np.linalg.norm(c.matrix @ h - h @ c.matrix) <= 1e-10
        # metric-weighted elements are transition-only: zero diagonal
        v = build_metric(es, cls).v
        weighted = es.right.conj().T @ v @ c.matrix @ es.right
        assert abs(weighted[0, 0]) <= 1e-12
        assert abs(weighted[1, 1]) <= 1e-12

    def test_sign_validation(self):
        _, es, cls, _ = _real_system()
        with pytest.raises(ValueError):
            build_c(es, cls, [1, 2])
        with pytest.raises(ValueError):
            build_c(es, cls, [1])


class TestDiagnostic:
    def test_real_phase(self):
        frame = canonical_two_level_frame()
        _, es, cls, itw = _real_system()
        pv = build_pv(SIGMA1, itw.v, es)
        assert c_pt_diagnostic(pv, frame.pt) is SpectrumDiagnostic.REAL_SPECTRUM

    def test_complex_phase(self):
        frame = canonical_two_level_frame()
        h = hamiltonian(TwoLevelModel(3, 5))
        es = eigendecompose(h)
        cls = classify(es)
        c = build_c(es, cls, [1])
        assert c_pt_diagnostic(c, frame.pt) is SpectrumDiagnostic.COMPLEX_PAIRS

    def test_identity_c_is_degenerate(self):
        frame = canonical_two_level_frame()
        _, es, cls, _ = _real_system()
        c = build_c(es, cls, [1, 1])
        assert c_pt_diagnostic(c, frame.pt) is SpectrumDiagnostic.REAL_SPECTRUM
        assert diagnostic_is_degenerate(c)

    def test_sampled_family(self):
        generator = rng(41)
        frame = canonical_two_level_frame()
        for _ in range(40):
            alpha = generator.uniform(0.3, 3.0)
            ratio = generator.uniform(0.1, 0.85)
            for a, b in ((alpha, alpha * ratio), (alpha * ratio, alpha)):
                h = hamiltonian(TwoLevelModel(a, b))
                es = eigendecompose(h)
                cls = classify(es)
                if cls.kind is SpectrumKind.ALL_REAL:
                    es, _ = p_normalize(es, SIGMA1)
                    itw = build_metric(es, cls)
                    op = build_pv(SIGMA1, itw.v, es)
                    expected = SpectrumDiagnostic.REAL_SPECTRUM
                else:
                    op = build_c(es, cls, [1])
                    expected = SpectrumDiagnostic.COMPLEX_PAIRS
                assert c_pt_diagnostic(op, frame.pt) is expected


class TestPairCompleteness:
    def test_two_level_complex(self):
        h = hamiltonian(TwoLevelModel(3, 5))
        es = eigendecompose(h)
        cls = classify(es)
        assert pair_completeness_check(es, cls)

    def test_all_real_rejected(self):
        _, es, cls, _ = _real_system()
        with pytest.raises(ValueError):
            pair_completeness_check(es, cls)

    def test_broken_pairing_detected(self):
        # two distinct pairs, partners deliberately exchanged
        h = np.zeros((4, 4), dtype=complex)
        h[:2, :2] = hamiltonian(TwoLevelModel(3, 5))
        h[2:, 2:] = hamiltonian(TwoLevelModel(2, 7))
        es = eigendecompose(h)
        cls = classify(es)
        assert pair_completeness_check(es, cls)
        (a_plus, a_minus), (b_plus, b_minus) = cls.pairs
        broken = SpectrumClass(
            SpectrumKind.CONJUGATE_PAIRS,
            ((a_plus, b_minus), (b_plus, a_minus)),
            cls.real_indices,
        )
        assert not pair_completeness_check(es, broken)

    def test_mixed_spectrum(self):
        h = np.zeros((3, 3), dtype=complex)
        h[:2, :2] = hamiltonian(TwoLevelModel(3, 5))
        h[2, 2] = 1.5
        es = eigendecompose(h)
        cls = classify(es)
        assert cls.real_indices != ()
        assert pair_completeness_check(es, cls)


class TestCommutantInvariant:
    def test_commutator_bound(self):
        generator = rng(43)
        for _ in range(20):
            h = generator.normal(size=(5, 5))
            es = eigendecompose(h)
            cls = classify(es)
            if cls.kind is SpectrumKind.ALL_REAL:
                c = build_c(es, cls, [1] * 5)
            else:
                c = build_c(es, cls, [1] * len(cls.pairs))
            norm = np.linalg.norm(c.matrix @ h - h @ c.matrix)
            assert norm <= 1e-9 * max(1.0, np.linalg.norm(c.matrix) * np.linalg.norm(h))

    def test_c_signs_match_parity_overlap_signs(self):
        # sign(alpha_n) = sign(<R_n|P|R_n>)
        _, es, cls, itw = _real_system(3.0, 1.2)
        pv = build_pv(SIGMA1, itw.v, es)
        overlaps = parity_overlaps(es, SIGMA1)
        assert np.allclose(np.sign(pv.alphas.real), np.sign(overlaps.real))
