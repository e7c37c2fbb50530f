import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bscount.bsbound import HalfPlane, bound_holds, verify_counting_bound
from bscount.constants import clr_constant
from bscount.linalg import EigenItem, Spectrum, hermitian_eigenvalues
from bscount.schrodinger import (
    BudgetError,
    EigenCloud,
    Grid,
    PotentialSpec,
    WeightFunction,
    _range_notes,
    build_hamiltonian,
    cloud_to_csv,
    clr_functional,
    compute_cloud,
    dirichlet_laplacian,
    dist_to_halfline,
    dist_weighted_sum,
    laplacian_eigenvalues,
    lt_check,
    lt_halfplane_sum,
    numerical_range_ok,
    potential_integral,
    refine_and_extrapolate,
    sector_ratio,
    sector_sum,
)

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def _cloud(*lams, grid=None, potential=None):
    items = [EigenItem(complex(z), 1, 1) for z in lams]
    return EigenCloud(Spectrum(items, 1e-8), grid or Grid(1, 1.0, 16), potential or PotentialSpec.zero())


@pytest.fixture(scope="module")
def delta_cloud():
    return compute_cloud(Grid(1, 20.0, 4000), PotentialSpec.delta_well(1.0, 0.01))


@pytest.fixture(scope="module")
def ball_cloud():
    return compute_cloud(Grid(1, 4.0, 199), PotentialSpec.imaginary_ball(4.0))


def test_grid_geometry():
    g = Grid(2, 3.0, 19)
    assert g.h == pytest.approx(0.3) and g.size == 361
    assert g.coordinates().shape == (361, 2)
    assert g.refined(2).n == 39 and g.refined(2).coarsened(2) == g
    assert Grid.from_record(g.to_record()) == g
    for bad in [(3, 1.0, 20), (1, 0.0, 20), (1, 1.0, 15)]:
        with pytest.raises(ValueError):
            Grid(*bad)


@pytest.mark.parametrize("g", [Grid(1, 5.0, 200), Grid(2, 2.0, 20)])
def test_zero_potential_matches_sine_basis(g):
    eigs = np.sort(compute_cloud(g, PotentialSpec.zero()).raw.real)
    np.testing.assert_allclose(eigs, laplacian_eigenvalues(g), rtol=0, atol=1e-9 * eigs.max())
    np.testing.assert_allclose(
        hermitian_eigenvalues(dirichlet_laplacian(g).toarray())[::-1], laplacian_eigenvalues(g), atol=1e-9 * eigs.max()
    )


def test_zero_potential_second_order_drift():
    p = PotentialSpec.zero()
    coarse = refine_and_extrapolate(Grid(1, 3.0, 63), p)
    fine = refine_and_extrapolate(Grid(1, 3.0, 127), p)
    k0 = int(np.argmin([it.lam.real for it in coarse.spectrum.items]))
    k1 = int(np.argmin([it.lam.real for it in fine.spectrum.items]))
    ratio = coarse.certificates[k0] / fine.certificates[k1]
    assert 4 / 3 <= ratio <= 12
    exact = (math.pi / 6) ** 2
    assert abs(fine.extrapolated[k1].real - exact) < abs(fine.spectrum.items[k1].lam.real - exact)


def test_budget_guard():
    with pytest.raises(BudgetError, match="budget"):
        build_hamiltonian(Grid(2, 4.0, 71), PotentialSpec.zero())


def test_potential_validation():
    with pytest.raises(ValueError, match="unknown potential kind"):
        PotentialSpec("gaussian")
    with pytest.raises(ValueError, match="exceeds box"):
        PotentialSpec.scaled_char(-1.0, 5.0).sample(Grid(1, 4.0, 31))
    with pytest.raises(ValueError, match="grid has"):
        PotentialSpec.grid_samples(np.zeros(3, dtype=complex)).sample(Grid(1, 4.0, 31))


def test_potential_record_roundtrip():
    p = PotentialSpec.scaled_char(-1 + 2j, 1.5)
    q = PotentialSpec.from_record(p.to_record())
    g = Grid(1, 4.0, 31)
    np.testing.assert_array_equal(q.sample(g)[0], p.sample(g)[0])


def test_delta_well_integral_and_notes():
    g = Grid(1, 20.0, 799)
    v, notes = PotentialSpec.delta_well(1.0, 0.01).sample(g)
    assert np.sum(v) * g.h == pytest.approx(-1.0, rel=1e-14)
    assert any("below 2h" in n for n in notes)
    assert potential_integral(g, PotentialSpec.delta_well(1.0, 0.01), 0.0, 1.0) == pytest.approx(1.0)


def test_delta_well_ground_state(delta_cloud):
    lam0 = min(it.lam.real for it in delta_cloud.spectrum.items)
    assert lam0 == pytest.approx(-0.25, rel=0.02)


def test_delta_well_second_order_drift():
    # a point well (width far below h) keeps the discretization smooth in h
    lam = [
        compute_cloud(Grid(1, 20.0, n), PotentialSpec.delta_well(1.0, 1e-6)).raw.real.min()
        for n in (399, 799, 1599)
    ]
    assert 4 / 3 <= (lam[0] - lam[1]) / (lam[1] - lam[2]) <= 12


def test_imaginary_ball_numerical_range(ball_cloud):
    assert ball_cloud.raw.real.min() >= -1e-9
    assert ball_cloud.raw.imag.min() >= -1e-9
    assert numerical_range_ok(ball_cloud)


def test_numerical_range_guard_fires():
    ham = build_hamiltonian(Grid(1, 1.0, 16), PotentialSpec.zero())
    assert _range_notes(ham, np.array([-1e-3, 1.0]))
    assert not _range_notes(ham, np.array([-1e-12, 1.0]))


def test_clr_zero_potential():
    c = compute_cloud(Grid(1, 2.0, 31), PotentialSpec.zero())
    r = clr_functional(c, 0.5, HalfPlane(0.0, 0.1))
    assert (r.n_count, r.rhs, r.ratio, r.holds, r.inconsistent) == (0, 0.0, 0.0, True, False)


def test_clr_imaginary_ball_is_vacuous(ball_cloud):
    r = clr_functional(ball_cloud, 1.0, HalfPlane(0.0, 0.05))
    assert r.rhs == 0.0 and r.n_count == 0


def test_clr_delta_well_near_sharp(delta_cloud):
    eps = 0.2475
    r = clr_functional(delta_cloud, 0.5, HalfPlane(0.0, eps))
    assert r.n_count == 1
    assert r.rhs == pytest.approx(0.5 * eps**-0.5, rel=1e-12)
    assert r.ratio == pytest.approx(2 * math.sqrt(eps), rel=1e-12)
    assert r.ratio <= 1 and r.holds


def test_clr_rejections(ball_cloud):
    with pytest.raises(ValueError, match="not admissible"):
        clr_functional(ball_cloud, 0.25, HalfPlane(0.0, 0.1))
    with pytest.raises(ValueError, match="eps > 0"):
        clr_functional(ball_cloud, 1.0, HalfPlane(0.0, 0.0))
    with pytest.raises(ValueError, match="does not match"):
        clr_functional(ball_cloud, 1.0, HalfPlane(0.0, 0.1), d=2)


def test_clr_flags_inconsistent_vacuous_case():
    r = clr_functional(_cloud(-1.0), 0.5, HalfPlane(0.0, 0.1))
    assert r.inconsistent and r.ratio == math.inf and not r.holds


def test_clr_agrees_with_abstract_count():
    g = Grid(1, 3.0, 31)
    ham = build_hamiltonian(g, PotentialSpec.scaled_char(-20 + 5j, 1.0))
    cloud = compute_cloud(g, ham.potential)
    hp = HalfPlane(0.5, 0.3)
    assert clr_functional(cloud, 1.0, hp).n_count == verify_counting_bound(ham.as_pair(), hp).n_count


def test_lt_halfplane_examples():
    c = _cloud(-1.0, -4.0, 2.0)
    assert lt_halfplane_sum(c, 1.0, 0.0) == pytest.approx(5.0)
    assert lt_halfplane_sum(c, 0.5, 0.0) == pytest.approx(3.0)
    assert lt_halfplane_sum(c, 0.0, 0.0) == 2.0
    assert lt_halfplane_sum(_cloud(-1 + 3j), 1.0, 1.0) == 0.0


def test_lt_check_delta_well(delta_cloud):
    r = lt_check(delta_cloud, 1.0, 0.0)
    assert r.holds
    assert r.lhs == pytest.approx(0.25, rel=0.02)


def test_sector_examples():
    c = _cloud(-1.0, -4.0)
    assert sector_sum(c, 0.5, 1.0) == pytest.approx(3.0)
    assert sector_sum(_cloud(1 + 0.5j), 1.0, 1.0) == 0.0
    assert sector_sum(_cloud(1 + 2j), 1.0, 1.0) == pytest.approx(abs(1 + 2j))
    with pytest.raises(ValueError, match="kappa"):
        sector_sum(c, 1.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 10.0), st.floats(1.0, 20.0), st.floats(0.0, 2.0))
def test_sector_sum_monotone_in_kappa(seed, k1, factor, gamma):
    rng = np.random.default_rng(seed)
    lam = rng.normal(0, 2, 20) + 1j * rng.normal(0, 2, 20)
    c = _cloud(*lam)
    assert sector_sum(c, gamma, k1 * factor) <= sector_sum(c, gamma, k1)


def test_sector_ratio_bounded_on_imaginary_ball():
    g = Grid(1, 4.0, 199)
    for h in (1.0, 4.0, 16.0):
        c = compute_cloud(g, PotentialSpec.imaginary_ball(h))
        ratios = [sector_ratio(c, 1.0, k) for k in (0.05, 0.5, 5.0)]
        assert all(0 <= r < clr_constant(1, 1.5) for r in ratios)


def test_dist_to_halfline():
    assert dist_to_halfline(-1) == 1.0
    assert dist_to_halfline(1 + 1e-3j) == pytest.approx(1e-3)
    assert dist_to_halfline(-3 + 4j) == pytest.approx(5.0)


def test_dist_weighted_examples():
    f = WeightFunction("inv1p")
    assert dist_weighted_sum(_cloud(-1.0), 1.0, 1, f) == pytest.approx(1.0)
    lam = 1 + 1e-3j
    arg = -math.log(1e-3 / abs(lam))
    assert arg == pytest.approx(6.9078, abs=1e-4)
    got = dist_weighted_sum(_cloud(lam), 1.0, 2, f)
    assert got == pytest.approx(1e-3 / abs(lam) / (1 + arg), rel=1e-12)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_dist_weighted_exponential_reduces(t):
    lam = np.array([-1 + 1j, 2 + 0.5j, -0.3 - 2j, 4 - 1e-2j])
    f = WeightFunction("exp", t)
    p, d = 1.5, 1
    expected = sum(dist_to_halfline(z) ** (p + t) / abs(z) ** (d / 2 + t) for z in lam)
    assert dist_weighted_sum(_cloud(*lam), p, d, f) == pytest.approx(expected, rel=1e-12)


def test_dist_weighted_const_is_linear():
    c = _cloud(-1 + 1j, 2 + 0.5j, -0.3 - 2j)
    one = dist_weighted_sum(c, 1.0, 2, WeightFunction("const", 1.0))
    assert dist_weighted_sum(c, 1.0, 2, WeightFunction("const", 3.5)) == pytest.approx(3.5 * one, rel=1e-14)


def test_dist_weighted_skips_zero():
    with pytest.warns(RuntimeWarning, match="excluded"):
        assert dist_weighted_sum(_cloud(0.0, -1.0), 1.0, 1, WeightFunction("exp")) == pytest.approx(1.0)


def test_weight_rejection():
    with pytest.raises(ValueError, match="not positive"):
        WeightFunction("const", 0.0)
    with pytest.raises(ValueError, match="non-increasing"):
        WeightFunction("exp", -1.0)
    with pytest.raises(ValueError, match="unknown weight kind"):
        WeightFunction("gauss")


def test_refinement_rejections():
    with pytest.raises(ValueError, match="levels >= 2"):
        refine_and_extrapolate(Grid(1, 2.0, 63), PotentialSpec.zero(), levels=1)
    with pytest.raises(ValueError, match="usable refinement levels"):
        refine_and_extrapolate(Grid(1, 2.0, 31), PotentialSpec.zero())


def test_refinement_marks_drifting_values():
    cloud = refine_and_extrapolate(Grid(1, 4.0, 63), PotentialSpec.zero())
    assert cloud.certified and len(cloud.levels) == 2
    # the top of a Dirichlet spectrum moves by O(1) between grids
    assert cloud.converged.any() and not cloud.converged.all()
    assert len(cloud.checked_items) + len(cloud.excluded_items) == len(cloud.spectrum.items)


def test_single_level_cloud_checks_everything(ball_cloud):
    assert not ball_cloud.certified
    assert len(ball_cloud.checked_items) == len(ball_cloud.spectrum.items)


def test_cloud_csv(tmp_path, ball_cloud):
    path = tmp_path / "cloud.csv"
    cloud_to_csv(ball_cloud, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im,alg_mult,certificate"
    assert len(lines) == 1 + len(ball_cloud.spectrum.items)


def test_bound_allowance_constant():
    # the abstract allowance is much tighter than the discretization one
    assert bound_holds(-1e-10, 1.0)


@pytest.mark.slow
def test_imaginary_ball_2d_bottom_converges():
    cloud = refine_and_extrapolate(Grid(2, 6.0, 64), PotentialSpec.imaginary_ball(4.0))
    # drift is measured against the n=31 level, which resolves the ball edge coarsely
    order = np.argsort([it.lam.real for it in cloud.spectrum.items])[:5]
    lam = np.array([cloud.spectrum.items[i].lam for i in order])
    assert np.all(cloud.certificates[order] / np.abs(lam) <= 1e-2)
