import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsslocate.montecarlo import (
    CellKey,
    SweepSpec,
    empirical_cdf,
    mean_ple,
    rms_error,
    run_sweep,
    trial_seed,
)
from rsslocate.pathloss import PathLossParams
from rsslocate.trajectory import Strategy


class TestRms:
    def test_hand(self):
        assert rms_error([3, 4]) == pytest.approx(math.sqrt(12.5))
        assert rms_error([3, 4]) == pytest.approx(3.5355339, abs=1e-7)

    def test_constant_and_zero(self):
        assert rms_error([2.5] * 7) == pytest.approx(2.5)
        assert rms_error([0]) == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            rms_error([])

    @given(st.floats(0, 1e6))
    def test_singleton(self, x):
        assert rms_error([x]) == pytest.approx(x)


class TestMeanPle:
    def test_values(self):
        assert mean_ple([3.0, 3.4]) == pytest.approx(3.2)
        assert mean_ple([2.2] * 100) == pytest.approx(2.2)

    def test_empty(self):
        with pytest.raises(ValueError):
            mean_ple([])

    @given(st.lists(st.floats(1.0, 5.0), min_size=1))
    def test_convex(self, xs):
        assert 1.0 - 1e-12 <= mean_ple(xs) <= 5.0 + 1e-12


class TestCdf:
    def test_hand(self):
        cdf = empirical_cdf([3, 1, 2])
        assert cdf.points == ((1.0, 1 / 3), (2.0, 2 / 3), (3.0, 1.0))
        assert cdf(2) == pytest.approx(2 / 3)
        assert cdf(3) == 1.0
        assert cdf(0.5) == 0.0
        assert cdf(1.999) == pytest.approx(1 / 3)

    def test_ties(self):
        cdf = empirical_cdf([1, 1, 2, 2])
        assert [f for _, f in cdf.points] == [0.5, 0.5, 1.0, 1.0]

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_cdf([])

    @given(st.lists(st.floats(0, 100), min_size=1, max_size=200))
    def test_valid_and_invertible(self, xs):
        cdf = empirical_cdf(xs)
        fr = [f for _, f in cdf.points]
        assert all(a <= b for a, b in zip(fr, fr[1:]))
        assert fr[-1] == 1.0
        assert fr[0] >= 1 / len(xs)
        srt = sorted(xs)
        n = len(xs)
        assert [cdf.quantile((k + 1) / n) for k in range(n)] == srt


def test_trial_seed_deterministic_and_distinct():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    seeds = {trial_seed(7, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(7, 0) != trial_seed(8, 0)


class TestSpec:
    def test_cells_dedupe_shared_base(self):
        spec = SweepSpec(trials_per_cell=1)
        keys = spec.cell_keys()
        # 5 + 4 + 5 values; (n=3, sigma=3, r0=-27) appears in both the n and sigma sweeps,
        # the r0 sweep does not contain -27
        assert len(keys) == 2 * (5 + 4 + 5 - 1)
        assert keys == sorted(keys)

    @pytest.mark.parametrize(
        "kw", [{"trials_per_cell": 0}, {"ple_values": ()}, {"axes": ("bogus",)}, {"strategies": ()}]
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SweepSpec(**kw)


def test_noiseless_sweep_exact():
    spec = SweepSpec(
        ple_values=(2.0, 3.0), trials_per_cell=1, base=PathLossParams(sigma=0.0), axes=("n",), base_seed=3
    )
    res = run_sweep(spec)
    for s in Strategy:
        for n in (2.0, 3.0):
            cell = res.cell(s, "n", n)
            assert cell.failed == 0
            if s is Strategy.CORNER:
                assert cell.rms_error < 1e-6
                assert cell.mean_n_opt == n


def test_sweep_deterministic_and_jobs_independent():
    spec = SweepSpec(ple_values=(2.0, 4.0), trials_per_cell=4, axes=("n",), base_seed=11)
    a = run_sweep(spec, jobs=1)
    b = run_sweep(spec, jobs=2)
    assert a.cells == b.cells
    assert run_sweep(spec, jobs=1).cells == a.cells


def test_failed_trials_counted(monkeypatch):
    import rsslocate.montecarlo as mc

    calls = iter(range(1000))

    def fake(args):
        i = next(calls)
        return (math.nan, math.nan, True) if i % 4 == 0 else (1.0, 3.0, False)

    monkeypatch.setattr(mc, "_run_one", fake)
    spec = SweepSpec(ple_values=(3.0,), trials_per_cell=8, axes=("n",), strategies=(Strategy.CORNER,))
    res = mc.run_sweep(spec)
    cell = res.cell(Strategy.CORNER, "n", 3.0)
    assert cell.failed == 2 and cell.trials == 8
    assert cell.rms_error == 1.0
    assert cell.flagged


def test_figure_cells():
    spec = SweepSpec(trials_per_cell=2, strategies=(Strategy.CORNER,))
    res = run_sweep(spec)
    assert res.figure_cell(1) == ("n", 3.0)
    assert res.figure_cell(2) == ("sigma", 3.0)
    # -27 is not among the swept R0 values: middle entry
    assert res.figure_cell(3) == ("r0", -30.0)
    assert res.figure_errors(Strategy.CORNER, 3) == res.cell(Strategy.CORNER, "r0", -30.0).errors
    assert isinstance(next(iter(res.cells)), CellKey)
