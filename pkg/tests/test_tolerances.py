import dataclasses

import pytest

from maslovkit import errors
from maslovkit.tolerances import DEFAULT, Tolerances, current, scaled


def test_defaults():
    t = current()
    assert t == DEFAULT
    assert (t.isotropy, t.rank, t.degenerate, t.winding) == (1e-8, 1e-10, 1e-8, 1e-6)


def test_scaled_context_restores():
    with scaled(100.0) as t:
        assert current() is t
        for f in dataclasses.fields(Tolerances):
            assert getattr(t, f.name) == pytest.approx(100.0 * getattr(DEFAULT, f.name))
    assert current() == DEFAULT


def test_scale_must_be_positive():
    with pytest.raises(ValueError):
        DEFAULT.scaled(0.0)


def test_error_hierarchy():
    numeric = [errors.RankDeficient, errors.NotLagrangian, errors.DimensionMismatch,
               errors.NotTransversal, errors.DegenerateForm, errors.Undersampled,
               errors.NotClosed, errors.RetryExhausted, errors.InconsistentOverlap]
    assert all(issubclass(e, errors.NumericalError) for e in numeric)
    assert issubclass(errors.ValidationError, ValueError)
    assert not issubclass(errors.ValidationError, errors.NumericalError)
