import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

import reference as ref
from proxhull.grid_field import ScalarField, indicator_field
from proxhull.moreau import (
    ConvergenceReport,
    EnvelopeParams,
    iteration_bound,
    moreau_envelope,
    moreau_lower_bruteforce,
    moreau_lower_iterative,
    moreau_upper,
    moreau_upper_bruteforce,
    sweep_step,
)


def fields(max_dims=2, max_side=7):
    shapes = hnp.array_shapes(min_dims=1, max_dims=max_dims, min_side=1, max_side=max_side)
    vals = hnp.arrays(np.float64, shapes, elements=st.floats(-50, 50, allow_nan=False))
    return st.builds(ScalarField, vals, st.sampled_from([0.5, 1.0, 2.0]))


lams = st.sampled_from([0.25, 1.0, 3.0])


class TestParams:
    def test_defaults(self):
        p = EnvelopeParams()
        assert p.lam == 1.0 and p.stop == "tolerance" and p.tol == 1e-7

    @pytest.mark.parametrize("kw", [
        {"lam": 0}, {"lam": -1}, {"stop": "never"}, {"tol": 0},
        {"stop": "iterations"}, {"stop": "iterations", "iterations": -1},
        {"direction": "sideways"}, {"threads": 0},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            EnvelopeParams(**kw)

    def test_replace(self):
        p = EnvelopeParams(lam=2.0).replace(stop="exact")
        assert p.lam == 2.0 and p.stop == "exact"


class TestIterationBound:
    @pytest.mark.parametrize("osc,h,lam,want", [(255, 1, 1, 16), (0, 1, 1, 1), (1, 0.1, 1, 11)])
    def test_examples(self, osc, h, lam, want):
        assert iteration_bound(osc, h, lam) == want

    def test_invalid(self):
        with pytest.raises(ValueError):
            iteration_bound(-1, 1, 1)
        with pytest.raises(ValueError):
            iteration_bound(1, 0, 1)


class TestBruteForce:
    def test_radius_zero_is_identity(self):
        f = ScalarField(np.random.default_rng(0).normal(size=(4, 5)))
        assert np.array_equal(moreau_lower_bruteforce(f, 1.0, 0).values, f.values)

    def test_hand_example(self):
        f = ScalarField([0.0, 1.0, 0.0])
        assert moreau_lower_bruteforce(f, 0.5, 1).values[1] == 0.5

    @given(fields(), lams, st.one_of(st.none(), st.integers(0, 4)))
    @settings(max_examples=150)
    def test_matches_pairwise_reference(self, f, lam, m):
        got = moreau_lower_bruteforce(f, lam, m).values
        assert np.allclose(got, ref.lower_envelope(f.values, f.spacing, lam, m), atol=1e-12, rtol=0)

    def test_upper_hand_enumeration(self):
        chi = ScalarField([0.0, 0.0, 1.0, 0.0, 0.0])
        got = moreau_upper_bruteforce(chi, 0.25).values
        # max over r of chi(x + r) - lam r^2, floored by chi(x) = 0
        assert got.tolist() == [0.0, 0.75, 1.0, 0.75, 0.0]


class TestSweep:
    def test_constant_field_unchanged(self):
        f = ScalarField(np.full((4, 4), 3.0))
        for i in range(1, 5):
            assert np.array_equal(sweep_step(f, i, 2.0).values, f.values)

    @given(fields(), lams)
    @settings(max_examples=100)
    def test_first_sweep_is_radius_one(self, f, lam):
        one = sweep_step(f, 1, lam).values
        assert np.allclose(one, ref.lower_envelope(f.values, f.spacing, lam, 1), atol=1e-12, rtol=0)

    @given(fields(), lams)
    @settings(max_examples=100)
    def test_two_sweeps_are_radius_two(self, f, lam):
        two = sweep_step(sweep_step(f, 1, lam), 2, lam).values
        assert np.allclose(two, ref.lower_envelope(f.values, f.spacing, lam, 2), atol=1e-12, rtol=0)

    def test_frozen_cells_keep_values(self):
        f = ScalarField([5.0, 0.0, 5.0])
        frozen = [True, False, False]
        assert sweep_step(f, 1, 1.0, frozen).values.tolist() == [5.0, 0.0, 1.0]

    def test_bad_index(self):
        with pytest.raises(ValueError):
            sweep_step(ScalarField([1.0]), 0, 1.0)

    def test_thread_count_does_not_change_bits(self):
        f = ScalarField(np.random.default_rng(4).normal(size=(40, 30)), 0.1)
        p = EnvelopeParams(lam=2.0)
        a, _ = moreau_lower_iterative(f, p)
        b, _ = moreau_lower_iterative(f, p.replace(threads=4))
        assert a.values.tobytes() == b.values.tobytes()


class TestIterative:
    def test_constant_converges_after_one_sweep(self):
        out, rep = moreau_lower_iterative(ScalarField(np.full(6, 2.0)), EnvelopeParams())
        assert np.all(out.values == 2.0)
        assert rep.converged and rep.iterations == 1 and rep.successive_diffs == [0.0]

    def test_exact_stop_on_integer_field(self):
        rng = np.random.default_rng(7)
        f = ScalarField(rng.integers(0, 101, size=(16, 16)).astype(float))
        out, rep = moreau_lower_iterative(f, EnvelopeParams(stop="exact"))
        assert rep.iterations == iteration_bound(float(np.ptp(f.values)), 1.0, 1.0)
        assert rep.converged
        assert np.array_equal(out.values, moreau_lower_bruteforce(f, 1.0).values)

    def test_iteration_stop_runs_exactly_m_sweeps(self):
        f = ScalarField(np.random.default_rng(1).normal(size=20))
        _, rep = moreau_lower_iterative(f, EnvelopeParams(stop="iterations", iterations=3))
        assert rep.iterations == 3 and len(rep.successive_diffs) == 3
        _, rep0 = moreau_lower_iterative(f, EnvelopeParams(stop="iterations", iterations=0))
        assert rep0.iterations == 0 and not rep0.converged

    def test_max_iterations_leaves_flag_down(self):
        f = ScalarField(np.linspace(0, 100, 50) ** 2 % 37)
        _, rep = moreau_lower_iterative(f, EnvelopeParams(lam=0.01, max_iterations=2))
        assert rep.iterations == 2 and not rep.converged

    def test_point_indicator_gives_squared_distance(self):
        c = np.zeros((9, 7), bool)
        c[2, 3] = c[7, 0] = True
        out, _ = moreau_lower_iterative(indicator_field(c, 2.0, spacing=0.5), EnvelopeParams(lam=2.0))
        assert np.allclose(out.values / 2.0, ref.squared_distance(c, 0.5), atol=1e-12)

    def test_report_dict(self):
        d = ConvergenceReport(2, [1.0, 0.0], True).as_dict()
        assert d == {"iterations": 2, "converged": True, "final_diff": 0.0}


class TestUpper:
    def test_constant(self):
        out, _ = moreau_upper(ScalarField(np.full((3, 3), -4.0)), EnvelopeParams(lam=5))
        assert np.all(out.values == -4.0)

    @given(fields(), lams)
    def test_dominates_f(self, f, lam):
        out, _ = moreau_upper(f, EnvelopeParams(lam=lam))
        assert np.all(out.values >= f.values)

    @given(fields(), lams)
    def test_duality_is_exact(self, f, lam):
        p = EnvelopeParams(lam=lam)
        up, _ = moreau_upper(f, p)
        low, _ = moreau_lower_iterative(-f, p)
        assert np.array_equal(up.values, -low.values)

    def test_dispatch(self):
        f = ScalarField([0.0, 3.0, 0.0])
        p = EnvelopeParams(lam=1.0, direction="upper")
        assert np.array_equal(moreau_envelope(f, p)[0].values, moreau_upper(f, p)[0].values)


@given(fields(), lams)
def test_radius_monotone(f, lam):
    prev = f.values
    cur = f
    for i in range(1, 5):
        cur = sweep_step(cur, i, lam)
        assert np.all(cur.values <= prev)
        prev = cur.values
