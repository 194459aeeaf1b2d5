import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.sample.step import StepFunction


class TestStepFunction:
    CURVE = StepFunction(np.array([1.0, 2.0, 3.0]), np.array([0.2, 0.5, 1.0]), 0.0, "demo")

    @pytest.mark.parametrize(
        ("y", "expected"), [(0.0, 0.0), (1.0, 0.2), (1.5, 0.2), (2.0, 0.5), (3.0, 1.0), (10.0, 1.0)]
    )
    def test_right_continuous(self, y, expected):
        assert self.CURVE(y) == expected

    @pytest.mark.parametrize(("y", "expected"), [(1.0, 0.0), (2.0, 0.2), (3.0, 0.5), (3.5, 1.0)])
    def test_left_limit(self, y, expected):
        assert self.CURVE.left_limit(y) == expected

    def test_vectorised(self):
        assert_array_equal(self.CURVE(np.array([0.5, 2.5])), [0.0, 0.5])

    def test_complement(self):
        survival = self.CURVE.complement()

        assert survival(2.0) == 0.5
        assert survival.value_before_first == 1.0
        assert survival.is_nonincreasing()

    def test_shape_checks(self):
        assert self.CURVE.is_nondecreasing()
        assert self.CURVE.within(0.0, 1.0)
        assert not self.CURVE.within(0.0, 0.9)

    def test_rejects_unsorted_jumps(self):
        with pytest.raises(ValueError):
            StepFunction(np.array([2.0, 1.0]), np.array([0.1, 0.2]), 0.0)

    def test_constant(self):
        flat = StepFunction.constant(0.3)

        assert flat(-1e300) == 0.3
        assert flat(1e300) == 0.3
