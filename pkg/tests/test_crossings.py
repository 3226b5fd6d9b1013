import numpy as np
import pytest
from corpus import random_corpus
from scipy.linalg import expm

from specflow import crossings as cx
from specflow import engine, gallery, paths
from specflow.errors import IrregularCrossingError
from specflow.hermitian import HermitianOperator, random_unitary

CORPUS = random_corpus(30, start=500)


def diag_path(*fs, t0=0.0, t1=1.0, dfs=None):
    ev = lambda t: np.diag([f(t) for f in fs])  # noqa: E731
    der = None if dfs is None else (lambda t: np.diag([f(t) for f in dfs]))
    return paths.OperatorPath(ev, t0, t1, derivative=der)


def test_single_interior_crossing():
    p = diag_path(lambda t: t - 0.5, lambda t: 1.0)
    (c,) = cx.find_crossings(p)
    assert c.t == pytest.approx(0.5, abs=1e-10)
    np.testing.assert_allclose(np.abs(c.kernel_basis[:, 0]), [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(c.form, [[1.0]], atol=1e-8)
    assert cx.sfl_crossings(p).value == 1 == engine.sfl_morse_oracle(p).value


def test_invertible_path_has_no_crossings():
    assert cx.find_crossings(diag_path(lambda t: 1 + t, lambda t: -2.0)) == []


def test_twisted_loop_single_crossing():
    (c,) = cx.find_crossings(gallery.twisted_fourier_path(5))
    assert abs(c.t) <= 1e-10
    np.testing.assert_allclose(c.form, [[1.0]])
    assert cx.sfl_crossings(gallery.twisted_fourier_path(5)).value == 1


def test_crossing_form_scalar():
    p = diag_path(lambda t: t, t0=-1.0)
    form, inert = cx.crossing_form(p, 0.0, np.eye(1))
    np.testing.assert_allclose(form, [[1.0]], atol=1e-8)
    assert inert == (1, 0, 0)


def test_crossing_form_opposite_pair():
    p = diag_path(lambda t: t, lambda t: -t, t0=-1.0, dfs=[lambda t: 1.0, lambda t: -1.0])
    form, inert = cx.crossing_form(p, 0.0, np.eye(2))
    np.testing.assert_allclose(np.linalg.eigvalsh(form), [-1.0, 1.0])
    assert inert.signature == 0


def test_rank_two_kernel():
    u = random_unitary(3, np.random.default_rng(0))
    p = paths.OperatorPath(lambda t: u @ np.diag([t, 2 * t, 1.0]) @ u.conj().T, -1.0, 1.0)
    (c,) = cx.find_crossings(p)
    assert c.kernel_basis.shape[1] == 2
    np.testing.assert_allclose(np.linalg.eigvalsh(c.form), [1.0, 2.0], atol=1e-6)
    assert cx.sfl_crossings(p).value == 2


def test_kernel_basis_is_orthonormal_kernel():
    u = random_unitary(4, np.random.default_rng(1))
    p = paths.OperatorPath(lambda t: u @ np.diag([t - 0.2, 0.4 - t, 1.0, -1.0]) @ u.conj().T, 0.0, 1.0)
    for c in cx.find_crossings(p):
        v = c.kernel_basis
        assert np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))) <= 1e-10
        assert np.max(np.linalg.norm(p.matrix(c.t) @ v, axis=0)) <= 1e-8
        assert sum(c.inertia) == v.shape[1]


@pytest.mark.parametrize(
    "f, expected",
    [(lambda t: t - 0.5, 1), (lambda t: t, 0), (lambda t: -t, -1)],
)
def test_endpoint_convention_matches_partition(f, expected):
    p = diag_path(f)
    assert cx.sfl_crossings(p).value == expected == engine.sfl_partition(p).value


def test_irregular_tangency_and_regularize():
    p = diag_path(lambda t: t * t, lambda t: 1.0, t0=-1.0)
    report = cx.regularity_report(p)
    assert not report.all_regular
    with pytest.raises(IrregularCrossingError):
        cx.sfl_crossings(p)
    delta, q = cx.regularize(p)
    assert delta < 0
    crossings = cx.find_crossings(q)
    assert len(crossings) == 2 and all(c.regular for c in crossings)
    assert cx.sfl_crossings(q).value == 0 == engine.sfl_morse_oracle(p).value


def test_regular_path_needs_no_shift():
    delta, q = cx.regularize(diag_path(lambda t: t - 0.5))
    assert delta == 0.0


@pytest.mark.parametrize("k", range(len(CORPUS)))
def test_basis_change_invariance(k):
    rng = np.random.default_rng(k)
    p = CORPUS[k]
    for c in cx.find_crossings(p):
        u = random_unitary(c.kernel_basis.shape[1], rng)
        form, inert = cx.crossing_form(p, c.t, c.kernel_basis @ u)
        assert inert == c.inertia
        np.testing.assert_allclose(cx.rebased_form(c.form, u).matrix, form, atol=1e-10)


@pytest.mark.parametrize("k", range(len(CORPUS)))
def test_formula_matches_partition(k):
    p = CORPUS[k]
    _, q = cx.regularize(p)
    assert cx.sfl_crossings(q).value == engine.sfl_partition(p).value


@pytest.mark.parametrize("k", range(10))
def test_crossing_count_stable_under_grid_doubling(k):
    p = CORPUS[k]
    coarse = cx.find_crossings(p, cx.CrossingOptions(samples=32))
    fine = cx.find_crossings(p, cx.CrossingOptions(samples=64))
    assert len(coarse) == len(fine)
    np.testing.assert_allclose([c.t for c in coarse], [c.t for c in fine], atol=1e-8)


def degenerate_path(seed):
    """Moving-frame path with one tangential or cubic zero crossing."""
    rng = np.random.default_rng(seed)
    dim = 2 + seed % 4
    c = rng.uniform(0.25, 0.75)
    sign = rng.choice([-1.0, 1.0])
    power = 2 if seed % 2 == 0 else 3
    rest = rng.choice([-1.0, 1.0], size=dim - 1) * rng.uniform(0.5, 2.0, size=dim - 1)
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (x + x.conj().T) / 2

    def evaluate(t):
        u = expm(1j * t * h)
        d = np.diag(np.concatenate([[sign * (t - c) ** power], rest * (1 + 0.3 * np.sin(np.pi * t))]))
        return u @ d @ u.conj().T

    return paths.OperatorPath(evaluate, 0.0, 1.0)


@pytest.mark.parametrize("seed", range(20))
def test_regularize_degenerate_constructions(seed):
    p = degenerate_path(seed)
    assert not cx.regularity_report(p).all_regular
    delta, q = cx.regularize(p)
    assert delta != 0.0
    found = cx.find_crossings(q)
    assert len(found) <= 3 and all(c.regular for c in found)
    assert cx.sfl_crossings(q).value == engine.sfl_partition(p).value


def test_crossing_on_a_knot_with_slope_jump_is_irregular():
    # |t| sampled at its corner: the one-sided forms are -1 and +1
    mats = [np.diag([abs(t), 1.0]) for t in (-1.0, 0.0, 1.0)]
    p = paths.sampled_path([-1.0, 0.0, 1.0], mats)
    (c,) = cx.find_crossings(p)
    assert abs(c.t) <= 1e-9 and not c.regular
    _, q = cx.regularize(p)
    assert cx.sfl_crossings(q).value == engine.sfl_partition(p).value == 0


def test_crossing_on_a_knot_without_slope_jump_is_regular():
    mats = [np.diag([t, 1.0]) for t in (-1.0, 0.0, 0.5, 1.0)]
    p = paths.sampled_path([-1.0, 0.0, 0.5, 1.0], mats)
    (c,) = cx.find_crossings(p)
    assert c.regular and cx.sfl_crossings(p).value == 1
