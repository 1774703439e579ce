import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hankelgd import HankelCompleter, make_geometry, make_instance, relative_error


def _signal_with_nans(inst):
    x = inst.geom.unweight(inst.f_obs).astype(complex)
    x[~inst.mask.observed] = np.nan
    return x


def test_get_set_params_and_clone():
    est = HankelCompleter(rank=4, alpha=0.2, mu=2.0, seed=11)
    params = est.get_params()
    assert params["rank"] == 4 and params["alpha"] == 0.2 and params["mu"] == 2.0
    est.set_params(rank=5)
    assert est.rank == 5
    twin = clone(est)
    assert twin.get_params() == est.get_params()


def test_fit_nan_marked_signal():
    inst = make_instance(125, 3, m=50, alpha=0.0, seed=0)
    est = HankelCompleter(rank=3, alpha=0.0, seed=0)
    est.fit(_signal_with_nans(inst))
    truth = inst.geom.unweight(inst.z_true)
    assert relative_error(est.signal_, truth) <= 1e-3
    assert est.converged_
    assert est.n_iter_ == est.result_.iterations
    assert est.residual_trace_.shape[0] == est.n_iter_ + 1


def test_fit_with_explicit_mask_and_outliers():
    inst = make_instance(125, 3, m=50, alpha=0.1, seed=1)
    y = inst.geom.unweight(inst.f_obs)
    est = HankelCompleter(rank=3, alpha=0.1, seed=1)
    est.fit(y, mask=inst.mask.indices)
    truth = inst.geom.unweight(inst.z_true)
    assert relative_error(est.signal_, truth) <= 1e-3
    support = np.flatnonzero(est.outliers_)
    assert set(support) <= set(inst.mask.indices)


def test_fit_transform_returns_completed_signal():
    inst = make_instance(63, 2, m=63, alpha=0.0, seed=2)
    x = inst.geom.unweight(inst.z_true)
    out = HankelCompleter(rank=2).fit_transform(x)
    assert relative_error(out, x) <= 1e-5


def test_transform_requires_fit():
    est = HankelCompleter(rank=1)
    with pytest.raises(NotFittedError):
        est.transform()
    inst = make_instance(31, 1, m=31, seed=3)
    est.fit(inst.geom.unweight(inst.z_true))
    np.testing.assert_array_equal(est.transform(), est.signal_)


def test_rejects_bad_inputs():
    est = HankelCompleter(rank=2)
    with pytest.raises(ValueError):
        est.fit(np.ones((4, 4)))
    with pytest.raises(ValueError):
        est.fit(np.full(16, np.nan))
    values = np.ones(16, complex)
    values[3] = np.nan
    with pytest.raises(ValueError):
        est.fit(values, mask=[1, 2, 3])  # masked entry 3 is NaN


def test_column_vector_accepted():
    inst = make_instance(41, 2, m=41, seed=4)
    x = inst.geom.unweight(inst.z_true).reshape(-1, 1)
    est = HankelCompleter(rank=2).fit(x)
    assert est.signal_.shape == (41,)
    assert isinstance(est.geometry_, type(make_geometry(41)))
