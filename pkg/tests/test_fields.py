import numpy as np
import pytest

from undulator import FieldKind, FieldModel, field_harmonics, mean_square_field
from undulator.fields import PERIOD_L


class TestVectorPotential:
    def test_zero_field(self):
        model = FieldModel.helical(0.0)
        a1, a2 = model.vector_potential(np.linspace(-3, 9, 7))
        assert np.all(a1 == 0) and np.all(a2 == 0)

    def test_periodicity_random_points(self):
        rng = np.random.default_rng(7)
        model = FieldModel.from_harmonic_rows(
            [[1, 0.3, -0.1, 0.2, 0.05], [4, -0.02, 0.0, 0.01, 0.07]])
        z = rng.uniform(-20, 20, 100)
        for f in (model.vector_potential, model.magnetic_field):
            a, b = f(z)
            ap, bp = f(z + PERIOD_L)
            assert np.max(np.abs(a - ap)) < 1e-12
            assert np.max(np.abs(b - bp)) < 1e-12

    @pytest.mark.parametrize("z", [0.1, 1.7, 4.4])
    def test_periodicity_spec_points(self, z):
        model = FieldModel.helical(0.7)
        a = model.vector_potential(z)
        b = model.vector_potential(z + PERIOD_L)
        assert a[0] == pytest.approx(b[0], abs=1e-12)
        assert a[1] == pytest.approx(b[1], abs=1e-12)

    def test_derivative_consistency_step_halving(self):
        # central difference of A reproduces H with O(step^2) error
        model = FieldModel.from_harmonic_rows([[1, 0.4, 0.1, -0.2, 0.3],
                                               [2, 0.0, 0.1, 0.05, 0.0]])
        z = np.linspace(0.2, 5.8, 23)
        h1, h2 = model.magnetic_field(z)

        def fd_error(step):
            a1p, a2p = model.vector_potential(z + step)
            a1m, a2m = model.vector_potential(z - step)
            fd1 = -(a2p - a2m) / (2 * step)
            fd2 = (a1p - a1m) / (2 * step)
            return max(np.max(np.abs(fd1 - h1)), np.max(np.abs(fd2 - h2)))

        err_h, err_h2 = fd_error(1e-3), fd_error(5e-4)
        assert err_h / err_h2 == pytest.approx(4.0, rel=0.05)


class TestMagneticField:
    def test_helical_at_zero(self):
        h1, h2 = FieldModel.helical(0.8).magnetic_field(0.0)
        assert h1 == pytest.approx(-0.8, abs=1e-15)
        assert h2 == pytest.approx(0.0, abs=1e-15)

    def test_helical_at_quarter_period(self):
        h1, h2 = FieldModel.helical(0.8).magnetic_field(np.pi / 2)
        assert h1 == pytest.approx(0.0, abs=1e-15)
        assert h2 == pytest.approx(-0.8, abs=1e-15)

    def test_helical_constant_magnitude(self):
        model = FieldModel.helical(0.37)
        z = np.linspace(0, PERIOD_L, 57)
        h1, h2 = model.magnetic_field(z)
        assert np.max(np.abs(np.hypot(h1, h2) - 0.37)) < 1e-14

    def test_planar_second_component_zero(self):
        model = FieldModel.planar(0.5)
        z = np.linspace(-2, 9, 41)
        h1, h2 = model.magnetic_field(z)
        assert np.all(h2 == 0)
        assert h1[0] != 0

    def test_transverse_speed_mapping(self):
        model = FieldModel.helical_from_transverse_speed(0.05, 3.0)
        assert model.amplitude_h0 == pytest.approx(0.15)
        assert model.kind is FieldKind.HELICAL


class TestHarmonics:
    def test_helical_single_harmonic(self):
        coeffs = field_harmonics(FieldModel.helical(0.6), 4)
        assert abs(coeffs[0, 0]) == pytest.approx(0.3, rel=1e-12)
        assert abs(coeffs[0, 1]) == pytest.approx(0.3, rel=1e-12)
        assert np.max(np.abs(coeffs[1:])) < 1e-13

    def test_zero_field(self):
        coeffs = field_harmonics(FieldModel.zero(), 3)
        assert np.max(np.abs(coeffs)) == 0.0

    def test_planar_cosine_orthogonality(self):
        coeffs = field_harmonics(FieldModel.planar(0.4), 5)
        assert abs(coeffs[0, 0]) == pytest.approx(0.2, rel=1e-12)
        mask = np.ones_like(coeffs, dtype=bool)
        mask[0, 0] = False
        assert np.max(np.abs(coeffs[mask])) < 1e-12

    def test_n_max_validation(self):
        with pytest.raises(ValueError):
            field_harmonics(FieldModel.helical(0.1), 0)


class TestMeanSquareField:
    def test_helical(self):
        assert mean_square_field(FieldModel.helical(0.9)) == pytest.approx(
            0.81, rel=1e-13)

    def test_zero(self):
        assert mean_square_field(FieldModel.zero()) == 0.0

    def test_two_orthogonal_harmonics(self):
        # cos harmonics of amplitudes h1, h2 in the two components
        model = FieldModel.from_harmonic_rows(
            [[1, 0.15, 0.0, 0.0, 0.0], [3, 0.0, 0.0, 0.25, 0.0]])
        expected = ((2 * 0.15) ** 2 + (2 * 0.25) ** 2) / 2.0
        assert mean_square_field(model) == pytest.approx(expected, rel=1e-13)

    def test_parseval_against_harmonics(self):
        model = FieldModel.from_harmonic_rows(
            [[1, 0.1, -0.2, 0.05, 0.0], [2, 0.0, 0.03, -0.04, 0.01]])
        coeffs = field_harmonics(model, 6)
        parseval = 2.0 * float(np.sum(np.abs(coeffs) ** 2))
        assert parseval == pytest.approx(mean_square_field(model), rel=1e-10)


class TestConstruction:
    def test_bad_harmonic_rows(self):
        with pytest.raises(ValueError):
            FieldModel.from_harmonic_rows([[0, 1.0, 0.0, 0.0, 0.0]])
        with pytest.raises(ValueError):
            FieldModel.from_harmonic_rows([[1.5, 1.0, 0.0, 0.0, 0.0]])

    def test_duplicate_rows_accumulate(self):
        model = FieldModel.from_harmonic_rows(
            [[2, 0.1, 0.0, 0.0, 0.0], [2, 0.05, 0.0, 0.0, 0.0]])
        assert model.harmonics[1, 0] == pytest.approx(0.15)

    def test_planar_bad_harmonic(self):
        with pytest.raises(ValueError):
            FieldModel.planar(0.1, harmonic=0)
