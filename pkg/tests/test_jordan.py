import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bscount.jordan import (
    Block,
    JordanStructure,
    build_jordan_matrix,
    build_K0,
    closed_form_splitting_error,
    match_multisets,
    min_separation,
    random_structure,
    split_eigenvalues_closed_form,
    splitting_scale,
    verify_semisimple,
)
from bscount.linalg import default_cluster_tol, general_spectrum


def test_structure_validation():
    with pytest.raises(ValueError, match="size must be >= 1"):
        JordanStructure([(1.0, 0)])
    with pytest.raises(ValueError, match="at least one block"):
        JordanStructure([])


def test_structure_record_roundtrip():
    s = JordanStructure([(1 + 2j, 3), (0.5, 1)])
    assert JordanStructure.from_record(s.to_record()) == s
    assert s.total_dim == 4 and s.max_size == 3


def test_jordan_matrix_and_k0():
    s = JordanStructure([(2.0, 2), (-1.0, 1)])
    j = build_jordan_matrix(s)
    np.testing.assert_array_equal(j, np.array([[2, 1, 0], [0, 2, 0], [0, 0, -1]]))
    k0 = build_K0(s)
    np.testing.assert_array_equal(k0, np.array([[0, 0, 0], [1, 0, 0], [0, 0, 1]]))
    padded = build_K0(s, 5)
    assert padded.shape == (5, 5) and np.all(padded[3:, :] == 0)
    with pytest.raises(ValueError, match="smaller than the structure"):
        build_K0(s, 2)


def test_unperturbed_structure_is_detected():
    s = JordanStructure([(0.0, 3), (1.0, 2)])
    spec = general_spectrum(build_jordan_matrix(s), cluster_tol=1e-3)
    got = sorted((round(it.lam.real), it.alg_mult, it.geo_mult) for it in spec.items)
    assert got == [(0, 3, 1), (1, 2, 1)]


def test_triple_block_closed_form_against_polynomial_roots():
    s = JordanStructure([(2j, 3)])
    delta = 1e-3
    z = split_eigenvalues_closed_form(s, delta)
    # det(z - J - delta K0) = (z - 2i)^3 - delta
    roots = np.roots([1, -6j, -12, 8j - delta])
    err, _ = match_multisets(z, roots)
    assert err < 1e-12
    np.testing.assert_allclose(np.abs(z - 2j), 0.1, rtol=1e-12)
    angles = np.sort(np.mod(np.angle(z - 2j), 2 * np.pi))
    np.testing.assert_allclose(angles, [0, 2 * np.pi / 3, 4 * np.pi / 3], atol=1e-12)


def test_even_block_sign():
    # m = 2: det(z - J - delta K0) = (z - lam)^2 - delta, roots lam +- sqrt(delta)
    s = JordanStructure([(0.0, 2)])
    m = build_jordan_matrix(s) + 1e-4 * build_K0(s)
    err, _ = match_multisets(split_eigenvalues_closed_form(s, 1e-4), np.linalg.eigvals(m))
    assert err < 1e-12


def test_semisimple_example():
    s = JordanStructure([(0.0, 3), (1.0, 2)])
    m = build_jordan_matrix(s) + 1e-4 * build_K0(s)
    rep = verify_semisimple(m)
    assert rep.semisimple
    assert len(rep.items) == 5


def test_unperturbed_is_not_semisimple():
    s = JordanStructure([(0.5, 2)])
    assert not verify_semisimple(build_jordan_matrix(s), cluster_tol=1e-4).semisimple


def test_delta_validation():
    with pytest.raises(ValueError, match="positive"):
        split_eigenvalues_closed_form(JordanStructure([(0, 2)]), 0.0)


def test_match_multisets_permutation():
    a = np.array([1, 2j, -3])
    err, perm = match_multisets(a, a[[2, 0, 1]])
    assert err == 0.0
    np.testing.assert_array_equal(a[[2, 0, 1]][perm], a)
    with pytest.raises(ValueError, match="differ in size"):
        match_multisets(a, a[:2])


def test_min_separation():
    assert min_separation([0, 1, 3]) == 1.0
    assert min_separation([1]) == np.inf


def test_delta_to_zero_shrinks_distance():
    # halving delta shrinks the distance to the unperturbed eigenvalue by 2^(1/m)
    s = JordanStructure([(1.0, 3)])
    dist = []
    for delta in 1e-3 / 2.0 ** np.arange(6):
        eig = general_spectrum(build_jordan_matrix(s) + delta * build_K0(s)).eigenvalues
        dist.append(np.max(np.abs(eig - 1.0)))
    ratios = np.array(dist[:-1]) / np.array(dist[1:])
    np.testing.assert_allclose(ratios, 2 ** (1 / 3), rtol=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1]))
def test_splitting_matches_closed_form(seed, delta):
    s = random_structure(np.random.default_rng(seed), max_block=5, max_blocks=3)
    assert closed_form_splitting_error(s, delta) <= 1e-8 * splitting_scale(s, delta)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1e-6, 1e-4, 1e-2, 1e-1]))
def test_semisimple_when_separated(seed, delta):
    s = random_structure(np.random.default_rng(seed), max_block=5, max_blocks=3)
    m = build_jordan_matrix(s) + delta * build_K0(s)
    tol = default_cluster_tol(m)
    if min_separation(split_eigenvalues_closed_form(s, delta)) > 10 * tol:
        assert verify_semisimple(m, tol).semisimple


def test_block_reuse_in_random_structure():
    rng = np.random.default_rng(3)
    shared = 0
    for _ in range(200):
        s = random_structure(rng)
        lams = [b.lam for b in s.blocks]
        shared += len(lams) != len(set(lams))
    assert shared > 0
    assert isinstance(s.blocks[0], Block)
