import numpy as np
import pytest

import oracles
import systems
from dynrel.errors import (
    InadmissibleSelection,
    NoAdmissibleSelection,
    SelectionLimitExceeded,
)
from dynrel.kernels import nonzero_spectrum, numerical_rank
from dynrel.lti import StateSpace, mcmillan_degree, poles, tf_eval, validate_ct_model
from dynrel.relation import (
    RowSelection,
    classify_selection,
    compute_F,
    compute_F_raw,
    compute_gamma,
    enumerate_selections,
    has_full_eigenbasis,
    stable_selection_exists,
)
from dynrel.spectral import PartitionSpec, f_from_spectrum_eval


def constant_relation_model():
    """m = n = 1 with two output channels: the relation is a constant."""
    return validate_ct_model(StateSpace([[-1.0]], [[1.0]], [[1.0], [2.0]]))


class TestEnumerate:
    def test_golden_four_singletons(self, m3):
        sels = enumerate_selections(m3)
        assert [s.rows0 for s in sels] == [(0,), (1,), (2,), (3,)]
        assert [s.rows1 for s in sels] == [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
        c0b = [float(systems.C3[i] @ systems.B3[:, 0]) for i in range(4)]
        np.testing.assert_allclose(c0b, [4.0, 4.0, -4.0, -4.0])

    def test_golden_two_selections(self, m2):
        sels = enumerate_selections(m2)
        assert [s.rows0 for s in sels] == [(0,), (1,)]
        c0b = [float(systems.C2[i] @ systems.B2[:, 0]) for i in range(2)]
        np.testing.assert_allclose(c0b, [-3.0, -1.0])

    def test_orthogonal_row_excluded(self):
        a = np.array([[-1.0, 0.0], [1.0, -2.0]])
        b = np.array([[1.0], [0.0]])
        c = np.eye(2)  # row 1 is orthogonal to the column of B
        model = validate_ct_model(StateSpace(a, b, c))
        sels = enumerate_selections(model)
        assert [s.rows0 for s in sels] == [(0,)]

    def test_cap(self, m3):
        with pytest.raises(SelectionLimitExceeded):
            enumerate_selections(m3, cap=3)

    def test_no_admissible_selection(self):
        # hand-assembled (unvalidated) triple whose single row kills C0 B
        from dynrel.lti import CtModel
        ss = StateSpace([[-1.0, 0.0], [1.0, -2.0]], [[1.0], [0.0]], [[0.0, 1.0]])
        with pytest.raises(NoAdmissibleSelection):
            enumerate_selections(CtModel(ss=ss, m=1))


class TestGamma:
    def test_golden_first(self, m3):
        sel = enumerate_selections(m3)[0]
        gamma = compute_gamma(m3, sel)
        np.testing.assert_allclose(gamma, systems.GAMMA3_FIRST, atol=1e-12)
        assert oracles.match_gap(np.linalg.eigvals(gamma), [0.0, -1.0, -2.0]) < 1e-8

    def test_golden_second_model(self, m2):
        sels = enumerate_selections(m2)
        np.testing.assert_allclose(compute_gamma(m2, sels[0]), systems.GAMMA2_FIRST, atol=1e-12)
        np.testing.assert_allclose(compute_gamma(m2, sels[1]), systems.GAMMA2_SECOND, atol=1e-12)
        assert oracles.match_gap(
            np.linalg.eigvals(systems.GAMMA2_SECOND), [0.0, 79.0 / 6.0]) < 1e-12

    def test_square_model_gives_zero(self):
        model = constant_relation_model()
        sel = enumerate_selections(model)[0]
        np.testing.assert_allclose(compute_gamma(model, sel), np.zeros((1, 1)))

    def test_inadmissible_rejected(self, m3):
        with pytest.raises(InadmissibleSelection):
            compute_gamma(m3, RowSelection((0, 1), (2, 3)))

    def test_rank_drop(self, rng):
        for _ in range(20):
            model = oracles.random_ct_model(rng)
            for sel in enumerate_selections(model)[:2]:
                k = model.B @ np.linalg.solve(
                    model.C[list(sel.rows0), :] @ model.B, model.C[list(sel.rows0), :])
                if not has_full_eigenbasis(k):
                    continue
                gamma = compute_gamma(model, sel)
                assert numerical_rank(gamma) == model.n - model.m


class TestComputeF:
    def test_golden_first(self, m3):
        sel = enumerate_selections(m3)[0]
        f = compute_F(m3, sel)
        assert f.n == 2
        for s in 1j * np.logspace(-2, 2, 20):
            np.testing.assert_allclose(tf_eval(f, s), systems.f3_first(s), atol=1e-8)

    def test_golden_unstable_scalar(self, m2):
        sel = enumerate_selections(m2)[0]
        f = compute_F(m2, sel)
        for s in 1j * np.logspace(-2, 2, 20):
            np.testing.assert_allclose(tf_eval(f, s), systems.f2_first(s), atol=1e-10)

    def test_constant_relation(self):
        model = constant_relation_model()
        f = compute_F(model, enumerate_selections(model)[0])
        assert f.n == 0
        np.testing.assert_allclose(f.D, [[2.0]])

    def test_alternative_form(self, m3, rng):
        # s C1 (sI - Gamma)^{-1} B (C0 B)^{-1} agrees with the realization
        sel = enumerate_selections(m3)[1]
        gamma = compute_gamma(m3, sel)
        f = compute_F(m3, sel)
        c0 = systems.C3[list(sel.rows0), :]
        c1 = systems.C3[list(sel.rows1), :]
        k = systems.B3 @ np.linalg.inv(c0 @ systems.B3)
        for w in rng.uniform(0.1, 10.0, size=8):
            s = 1j * w
            alt = s * c1 @ np.linalg.solve(s * np.eye(3) - gamma, k)
            np.testing.assert_allclose(tf_eval(f, s), alt, atol=1e-9)

    def test_zero_pole_cancels(self, m3, m2, rng):
        models = [m3, m2] + [oracles.random_ct_model(rng) for _ in range(10)]
        for model in models:
            for sel in enumerate_selections(model):
                p = poles(compute_F(model, sel))
                if p.size:
                    assert np.abs(p).min() > 1e-6

    def test_degree_bound(self, rng):
        for _ in range(20):
            model = oracles.random_ct_model(rng)
            for sel in enumerate_selections(model)[:3]:
                k = model.B @ np.linalg.solve(
                    model.C[list(sel.rows0), :] @ model.B, model.C[list(sel.rows0), :])
                if not has_full_eigenbasis(k):
                    continue
                assert mcmillan_degree(compute_F_raw(model, sel)) <= model.n - model.m

    def test_projection_spectrum(self, m3, rng):
        models = [m3] + [oracles.random_ct_model(rng) for _ in range(10)]
        for model in models:
            sel = enumerate_selections(model)[0]
            c0 = model.C[list(sel.rows0), :]
            k = model.B @ np.linalg.solve(c0 @ model.B, c0)
            got = nonzero_spectrum(k)
            assert got.shape == (model.m,)
            assert oracles.match_gap(got, np.ones(model.m)) < 1e-8


class TestClassify:
    def test_golden_first(self, m3):
        rep = classify_selection(m3, enumerate_selections(m3)[0])
        assert rep.stable
        assert rep.degree == 2
        assert rep.F_raw.n == 3
        assert oracles.match_gap(rep.poles, [-1.0, -2.0]) < 1e-8

    def test_golden_second(self, m3):
        rep = classify_selection(m3, enumerate_selections(m3)[1])
        assert not rep.stable
        assert oracles.match_gap(rep.gamma_eigs, [0.0, -3.0, 3.0]) < 1e-8
        assert oracles.match_gap(rep.poles, [-3.0, 3.0]) < 1e-8
        for s in 1j * np.logspace(-2, 2, 10):
            np.testing.assert_allclose(tf_eval(rep.F, s), systems.f3_second(s), atol=1e-8)

    def test_golden_second_model_selections(self, m2):
        reps = [classify_selection(m2, sel) for sel in enumerate_selections(m2)]
        assert not reps[0].stable and not reps[1].stable
        assert oracles.match_gap(reps[0].poles, [8.0 / 9.0]) < 1e-8
        assert oracles.match_gap(reps[1].poles, [79.0 / 6.0]) < 1e-8
        assert oracles.match_gap(reps[1].gamma_eigs, [0.0, 79.0 / 6.0]) < 1e-8

    def test_reciprocity(self, m2):
        sels = enumerate_selections(m2)
        f_a = compute_F(m2, sels[0])
        f_b = compute_F(m2, sels[1])
        for w in np.logspace(-1, 1, 10):
            prod = tf_eval(f_a, 1j * w) @ tf_eval(f_b, 1j * w)
            np.testing.assert_allclose(prod, np.eye(1), atol=1e-10)


class TestStableSelection:
    def test_golden(self, m3, m2):
        assert stable_selection_exists(m3).rows0 == (0,)
        assert stable_selection_exists(m2) is None

    def test_constant_relation_model(self):
        model = constant_relation_model()
        assert stable_selection_exists(model).rows0 == (0,)


class TestSpectrumConsistency:
    def test_f_matches_spectrum_everywhere(self, m3, m2):
        for model in (m3, m2):
            for sel in enumerate_selections(model):
                f = compute_F(model, sel)
                part = PartitionSpec.from_u_rows(sel.rows0, model.n_out)
                for w in np.logspace(-2, 2, 50):
                    gap = np.abs(tf_eval(f, 1j * w)
                                 - f_from_spectrum_eval(model, part, w)).max()
                    assert gap < 1e-6

    def test_random_models(self, rng):
        for _ in range(5):
            model = oracles.random_ct_model(rng, n=4, m=2, n_out=3)
            for sel in enumerate_selections(model)[:2]:
                f = compute_F(model, sel)
                part = PartitionSpec.from_u_rows(sel.rows0, model.n_out)
                for w in np.logspace(-1, 1, 10):
                    gap = np.abs(tf_eval(f, 1j * w)
                                 - f_from_spectrum_eval(model, part, w)).max()
                    assert gap < 1e-6
