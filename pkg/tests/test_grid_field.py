import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from proxhull.grid_field import (
    FrameSpec,
    ScalarField,
    characteristic_field,
    crop,
    extend_masked,
    indicator_field,
    oscillation,
    pad_frame,
)
from proxhull.moreau import moreau_lower_bruteforce
from proxhull.oracles import double_well

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def arrays(max_dims=3, max_side=6):
    shapes = hnp.array_shapes(min_dims=1, max_dims=max_dims, min_side=1, max_side=max_side)
    return hnp.arrays(np.float64, shapes, elements=finite)


class TestScalarField:
    def test_values_are_copied_and_read_only(self):
        raw = np.arange(6.0).reshape(2, 3)
        f = ScalarField(raw, 0.5)
        raw[0, 0] = 99
        assert f.values[0, 0] == 0
        with pytest.raises(ValueError):
            f.values[0, 0] = 1
        assert f.dims == (2, 3) and f.ndim == 2 and f.spacing == 0.5

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            ScalarField([0.0, bad])

    @pytest.mark.parametrize("h", [0.0, -1.0])
    def test_rejects_bad_spacing(self, h):
        with pytest.raises(ValueError):
            ScalarField([1.0], h)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ScalarField(np.zeros((0, 3)))

    def test_negation_keeps_spacing(self):
        f = ScalarField([1.0, -2.0], 0.1)
        g = -f
        assert np.array_equal(g.values, [-1.0, 2.0]) and g.spacing == 0.1


class TestOscillation:
    def test_constant(self):
        assert oscillation(ScalarField(np.full((4, 4), 5.0))) == 0

    def test_byte_range(self):
        assert oscillation(ScalarField(np.arange(256.0))) == 255

    def test_double_well_samples(self):
        x = np.linspace(-2, 2, 401)
        assert oscillation(ScalarField(double_well(x))) == pytest.approx(1.0)


class TestPadCrop:
    f = ScalarField([3.0, 5.0, 4.0])

    def test_min_frame(self):
        assert pad_frame(self.f, FrameSpec(1, "min")).values.tolist() == [3, 3, 5, 4, 3]

    def test_max_frame(self):
        assert pad_frame(self.f, FrameSpec(1, "max")).values.tolist() == [5, 3, 5, 4, 5]

    def test_const_frame(self):
        assert pad_frame(self.f, FrameSpec(1, 0.0)).values.tolist() == [0, 3, 5, 4, 0]

    def test_crop_examples(self):
        assert crop(ScalarField(np.arange(5.0)), 1).values.tolist() == [1, 2, 3]
        assert crop(self.f, 0) is self.f

    def test_crop_too_small(self):
        with pytest.raises(ValueError):
            crop(ScalarField(np.arange(4.0)), 2)

    def test_bad_frame_spec(self):
        with pytest.raises(ValueError):
            FrameSpec(-1)
        with pytest.raises(ValueError):
            FrameSpec(1, "median")

    @given(arrays(), st.integers(0, 3))
    def test_pad_crop_round_trip(self, v, w):
        f = ScalarField(v)
        assert np.array_equal(crop(pad_frame(f, FrameSpec(w, "min")), w).values, v)

    @given(arrays())
    def test_min_frame_below_max_frame(self, v):
        f = ScalarField(v)
        lo = pad_frame(f, FrameSpec(1, "min")).values
        hi = pad_frame(f, FrameSpec(1, "max")).values
        assert np.all(lo <= hi)
        assert np.array_equal(crop(ScalarField(lo), 1).values, crop(ScalarField(hi), 1).values)

    @given(arrays())
    def test_min_frame_keeps_oscillation(self, v):
        f = ScalarField(v)
        assert oscillation(pad_frame(f, FrameSpec(1, "min"))) == oscillation(f)


class TestExtendMasked:
    def test_single_known_cell(self):
        f = ScalarField([0.0, 7.0, 0.0])
        out = extend_masked(f, [False, True, False], 100.0, "min_K")
        assert out.values.tolist() == [7, 100, 7, 100, 7]

    def test_corners_known(self):
        k = np.zeros((3, 3), bool)
        k[[0, 0, 2, 2], [0, 2, 0, 2]] = True
        out = extend_masked(ScalarField(np.ones((3, 3))), k, 50.0).values
        inner = out[1:-1, 1:-1]
        assert np.all(inner[k] == 1) and np.all(inner[~k] == 50)
        assert (~k).sum() == 5
        assert np.all(out[0] == 1) and np.all(out[-1] == 1) and np.all(out[:, 0] == 1)

    def test_empty_k(self):
        with pytest.raises(ValueError):
            extend_masked(ScalarField([1.0, 2.0]), [False, False], 9.0)

    def test_bad_frame_fill(self):
        with pytest.raises(ValueError):
            extend_masked(ScalarField([1.0]), [True], 9.0, "mean_K")

    @given(arrays(max_dims=2), st.sampled_from(["min_K", "max_K"]))
    def test_full_k_matches_pad_frame(self, v, which):
        f = ScalarField(v)
        ext = extend_masked(f, np.ones(v.shape, bool), 1e6, which)
        ref = pad_frame(f, FrameSpec(1, which[:3]))
        assert np.array_equal(ext.values, ref.values)


class TestIndicatorAndCharacteristic:
    def test_all_true(self):
        assert np.all(indicator_field(np.ones((3, 4), bool), 2.0).values == 0)

    def test_single_cell(self):
        c = np.zeros(5, bool)
        c[2] = True
        v = indicator_field(c, 1.0, sentinel=1e4).values
        assert v[2] == 0 and np.all(np.delete(v, 2) == 1e4)

    def test_envelope_is_squared_distance(self):
        c = np.array([True, False, False, False])
        env = moreau_lower_bruteforce(indicator_field(c, 1.0), 1.0)
        assert env.values.tolist() == [0, 1, 4, 9]

    def test_empty_set(self):
        with pytest.raises(ValueError):
            indicator_field(np.zeros(3, bool), 1.0)

    def test_sentinel_too_small(self):
        with pytest.raises(ValueError):
            indicator_field(np.array([True, False, False, False]), 1.0, sentinel=5.0)

    def test_characteristic(self):
        assert np.all(characteristic_field(np.zeros((2, 2), bool)).values == 0)
        assert np.all(characteristic_field(np.ones((2, 2), bool)).values == 1)
        k = np.zeros(4, bool)
        k[1] = True
        assert characteristic_field(k).values.tolist() == [0, 1, 0, 0]
