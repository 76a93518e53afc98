import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsav_nls import DegenerateReference
from fsav_nls.diagnostics import (
    ConservationRecord,
    ConservationRecorder,
    ConvergenceTable,
    TimingRecord,
    convergence_order,
    discrete_mass,
    error_between_runs,
    modified_energy,
    original_energy,
    quadratic_form,
    relative_drifts,
)
from fsav_nls.grid import build_grid, build_symbol
from fsav_nls.sav import ModelParams, SavState, initial_state
from fsav_nls.stepper import SchemeConfig, run
from oracles import dense_D, dense_D_grid


def state_of(P, Q, w=1.0):
    return SavState(P=P, Q=Q, w=w, P_prev=P, Q_prev=Q)


def ex41_state(alpha=1.7, domain=(-16, 16), n=256):
    g = build_grid(1, *domain, n)
    x = g.points()
    p = ModelParams(alpha, beta=2.0)
    return g, p, build_symbol(g, alpha), initial_state(np.exp(-(x**2)) * np.exp(-1j * x), p, g)


class TestModifiedEnergy:
    def test_zero_field(self):
        g = build_grid(1, -1, 1, 8)
        z = np.zeros(8)
        assert modified_energy(state_of(z, z, 1.0), build_symbol(g, 1.5)) == 1.0

    def test_dense_quadratic_form(self, rng):
        g = build_grid(1, -1.5, 2.5, 8)
        s = build_symbol(g, 1.7)
        D = dense_D(8, 4.0, 1.7)
        P, Q = rng.standard_normal((2, 8))
        st = state_of(P, Q, 0.9)
        ref = 0.5 * (P @ D @ P + Q @ D @ Q) + 0.81 / g.cell
        assert modified_energy(st, s, weighted=False) == pytest.approx(ref, abs=1e-12 * max(1, abs(ref)))
        assert modified_energy(st, s) == pytest.approx(g.cell * ref, rel=1e-12)

    def test_dense_quadratic_form_2d(self, rng):
        g = build_grid(2, -1, 1, (8, 4))
        s = build_symbol(g, 1.3)
        D = dense_D_grid(g, 1.3)
        v = rng.standard_normal(g.shape)
        assert quadratic_form(v, s) == pytest.approx(g.cell * v.ravel() @ D @ v.ravel(), rel=1e-12)

    def test_quadratic_form_nonpositive(self, rng):
        g = build_grid(1, -3, 3, 32)
        s = build_symbol(g, 1.2)
        assert quadratic_form(rng.standard_normal(32), s) <= 0

    def test_invariant_along_trajectory(self):
        g, p, s, st = ex41_state(1.4)
        H = []
        run(st, p, s, SchemeConfig(0.01), 1.0, observers=[lambda z: H.append(modified_energy(z, s))])
        assert np.max(np.abs(np.array(H) / H[0] - 1)) <= 1e-10

    def test_original_energy_drifts_at_second_order(self):
        g, p, s, st = ex41_state(1.7)
        drift = []
        for tau in (0.01, 0.005):
            rec = ConservationRecorder(p, s)
            run(st, p, s, SchemeConfig(tau), 1.0, observers=[rec])
            orig = np.array(rec.record.original)
            drift.append(np.max(np.abs(orig / orig[0] - 1)))
        assert drift[0] > 1e-9
        assert 3.4 <= drift[0] / drift[1] <= 4.6


class TestDiscreteMass:
    def test_1d_gaussian(self):
        g, _, _, st = ex41_state()
        assert discrete_mass(st, g) == pytest.approx(np.sqrt(np.pi / 2), abs=1e-10)

    def test_2d_gaussian(self):
        g = build_grid(2, -8, 8, 128)
        X, Y = g.mesh()
        P = 2 / np.sqrt(np.pi) * np.exp(-(X**2) - Y**2)
        assert discrete_mass(state_of(P, 0 * P), g) == pytest.approx(2.0, abs=1e-9)

    def test_zero(self):
        g = build_grid(1, 0, 1, 8)
        assert discrete_mass(state_of(np.zeros(8), np.zeros(8)), g) == 0.0

    def test_linear_scheme_mass_conserved(self):
        g = build_grid(1, -16, 16, 256)
        x = g.points()
        p = ModelParams(1.7, beta=0.0, c0=1.0)
        s = build_symbol(g, 1.7)
        M = []
        run(initial_state(np.exp(-(x**2) - 1j * x), p, g), p, s, SchemeConfig(0.01), 1.0,
            observers=[lambda z: M.append(discrete_mass(z, g))])
        assert np.max(np.abs(np.array(M) / M[0] - 1)) <= 1e-11


class TestRelativeDrifts:
    def test_constant_series(self):
        RH, RM = relative_drifts([2.0] * 4, [3.0] * 4)
        assert not RH.any() and not RM.any()

    def test_small_step(self):
        RH, _ = relative_drifts([1.0, 1.0 + 1e-12], [1.0, 1.0])
        assert RH[0] == 0
        assert RH[1] == pytest.approx(1e-12, rel=1e-3)

    def test_sign_dropped(self):
        RH, RM = relative_drifts([-2.0, -1.0], [1.0, 1.5])
        assert RH.tolist() == [0.0, 0.5] and RM.tolist() == [0.0, 0.5]

    @pytest.mark.parametrize("H,M", [([0.0, 1.0], [1.0, 1.0]), ([1.0, 1.0], [1e-15, 1.0])])
    def test_degenerate(self, H, M):
        with pytest.raises(DegenerateReference):
            relative_drifts(H, M)

    def test_conservation_preset_drifts(self):
        # [-40, 40] with h = 0.5
        g, p, s, st = ex41_state(1.7, (-40, 40), 160)
        rec = ConservationRecorder(p, s)
        run(st, p, s, SchemeConfig(0.01), 2.0, observers=[rec])
        assert rec.record.max_rh() <= 1e-10
        assert rec.record.max_rm() > 0
        RH, RM = rec.record.drifts()
        assert RH[0] == 0 and RM[0] == 0


class TestErrorBetweenRuns:
    def test_identical(self, rng):
        P, Q = rng.standard_normal((2, 16))
        assert error_between_runs(P, Q, P, Q) == 0.0

    def test_constant_offset(self, rng):
        P, Q = rng.standard_normal((2, 16))
        assert error_between_runs(P, Q, P + 1e-3, Q) == pytest.approx(1e-3, rel=1e-9)

    def test_sum_of_norms(self):
        z = np.zeros(4)
        assert error_between_runs(z, z, np.array([0, 0.5, 0, 0]), np.array([0, 0, -0.25, 0])) == 0.75

    def test_embedding_1d(self):
        gc, gf = build_grid(1, -1, 1, 8), build_grid(1, -1, 1, 16)
        f = lambda x: np.sin(np.pi * x)  # noqa: E731
        Pf = f(gf.points())
        Pf_perturbed = Pf.copy()
        Pf_perturbed[1::2] += 5.0  # off the coarse points: must be ignored
        Pc = f(gc.points())
        z8, z16 = np.zeros(8), np.zeros(16)
        assert error_between_runs(Pc, z8, Pf_perturbed, z16, gc, gf) <= 1e-15
        # argument order does not matter
        assert error_between_runs(Pf_perturbed, z16, Pc, z8) <= 1e-15

    def test_embedding_2d(self, rng):
        fine = rng.standard_normal((8, 8))
        coarse = fine[::2, ::2].copy()
        assert error_between_runs(coarse, 0 * coarse, fine, 0 * fine) == 0.0

    def test_rejects_mismatch(self):
        with pytest.raises(ValueError):
            error_between_runs(np.zeros(8), np.zeros(8), np.zeros(12), np.zeros(12))

    def test_rejects_domain_mismatch(self):
        ga, gb = build_grid(1, -1, 1, 8), build_grid(1, -2, 2, 16)
        with pytest.raises(ValueError, match="domain"):
            error_between_runs(np.zeros(8), np.zeros(8), np.zeros(16), np.zeros(16), ga, gb)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31))
    def test_metric(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.standard_normal((2, 12)) for _ in range(3))
        d = lambda u, v: error_between_runs(*u, *v)  # noqa: E731
        assert d(a, b) == d(b, a)
        assert d(a, b) > 0 and d(a, a) == 0
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-15


class TestConvergenceOrder:
    def test_quarter(self):
        assert convergence_order(4e-4, 1e-4) == pytest.approx(2.0)

    def test_reference_table_pairs(self):
        # alpha = 2.0 column of the 1D temporal table
        assert convergence_order(7.79e-05, 1.92e-05) == pytest.approx(2.02, abs=0.01)

    @pytest.mark.parametrize("a,b", [(0.0, 1e-3), (1e-3, 0.0), (-1.0, 1.0), (math.nan, 1.0)])
    def test_rejects_nonpositive(self, a, b):
        with pytest.raises(ValueError):
            convergence_order(a, b)


class TestConvergenceTable:
    def test_orders(self):
        t = ConvergenceTable("tau", [0.1, 0.05, 0.025], [4e-2, 1e-2, 2.5e-3])
        assert t.orders[0] is None
        assert t.orders[1:] == pytest.approx([2.0, 2.0])
        assert t.numeric_orders() == pytest.approx([2.0, 2.0])

    def test_floor_flag(self):
        t = ConvergenceTable("tau", [0.1, 0.05, 0.025], [1e-3, 1e-15, 0.0])
        assert t.orders[2] == "floor"
        assert isinstance(t.orders[1], float)

    def test_csv(self, tmp_path):
        t = ConvergenceTable("N", [32, 64], [2.02e-1, 1.23e-2])
        path = tmp_path / "t.csv"
        t.to_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["N", "error", "order"]
        assert rows[1] == ["32", "0.20200000000000001", ""]
        assert float(rows[2][2]) == math.log2(2.02e-1 / 1.23e-2)


class TestConservationRecord:
    def test_csv_round_trip(self, tmp_path):
        rec = ConservationRecord()
        vals = [(0, 0.0, 1 / 3, 2 / 3, 0.1, 0.2), (1, 0.01, 1 / 3 + 1e-15, 2 / 3 - 1e-9, 0.3, 0.4)]
        for step, t, H, M, w, E in vals:
            rec.step.append(step), rec.t.append(t), rec.H.append(H), rec.M.append(M)
            rec.w.append(w), rec.E.append(E), rec.original.append(E)
        path = tmp_path / "c.csv"
        rec.to_csv(path)
        rows = list(csv.DictReader(open(path)))
        assert list(rows[0]) == ["step", "t", "H", "M", "RH", "RM", "w", "E"]
        for row, (step, t, H, M, w, E) in zip(rows, vals):
            assert int(row["step"]) == step
            assert float(row["t"]) == t and float(row["H"]) == H and float(row["M"]) == M
            assert float(row["w"]) == w and float(row["E"]) == E
        assert float(rows[0]["RH"]) == 0.0

    def test_recorder_without_w(self):
        from fsav_nls.cnf import CnfSnapshot

        g = build_grid(1, -4, 4, 32)
        s = build_symbol(g, 1.5)
        p = ModelParams(1.5, beta=1.0)
        P = np.exp(-g.points() ** 2)
        rec = ConservationRecorder(p, s)
        rec(CnfSnapshot(0, 0.0, P, 0 * P))
        assert math.isnan(rec.record.w[0])
        assert rec.record.H[0] == pytest.approx(original_energy(P, 0 * P, p, s))


class TestTimingRecord:
    def test_per_step(self):
        r = TimingRecord("fsav", 0.01, (256,), 2.0, 100, 0)
        assert r.per_step == 0.02

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            TimingRecord("cnf", 0.01, (256,), -1.0, 100, 0)
