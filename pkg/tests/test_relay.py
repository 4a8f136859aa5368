from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import chisquare

from coopnet.cuts import dof, numerical_rank
from coopnet.errors import NoCodeError
from coopnet.galois import fp_rank, lift_network
from coopnet.network import sample_coefficients
from coopnet.relay import (
    RelayAssignment,
    achievable_dof_af,
    af_trial_ranks,
    default_horizon,
    extract_zero_error_code,
    is_layered,
    path_length_range,
    random_relays,
    unfold,
    verify_zero_error,
)
from coopnet.topologies import chain, diamond, keyhole, point_to_point, random_dag, random_layered, single_edge

from oracles import unfold_by_paths


def _coeffs(net):
    return {(e.tail, e.head): e.coeff for e in net.edges}


def test_single_edge_unfold():
    net = single_edge(0.3 - 0.4j)
    g = unfold(net, random_relays(net, seed=0), 1)
    np.testing.assert_allclose(g.matrix, [[0.3 - 0.4j]])


def test_chain_unfold():
    net = sample_coefficients(chain(2), 3)
    h = _coeffs(net)
    a = 0.7 + 0.2j
    g = unfold(net, RelayAssignment({"R1": np.array([[a]])}), 1)
    np.testing.assert_allclose(g.matrix, [[h["S", "R1"] * a * h["R1", "D"]]])


def test_diamond_unfold_is_two_path_sum():
    net = sample_coefficients(diamond(), 4)
    h = _coeffs(net)
    relays = random_relays(net, seed=9)
    a1, a2 = relays.matrices["R1"][0, 0], relays.matrices["R2"][0, 0]
    g = unfold(net, relays, 1)
    expected = h["S", "R1"] * a1 * h["R1", "D"] + h["S", "R2"] * a2 * h["R2", "D"]
    np.testing.assert_allclose(g.matrix, [[expected]])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), T=st.integers(1, 3))
def test_unfold_matches_path_expansion(seed, T):
    net = random_dag(seed, n_nodes=5, max_antennas=2)
    relays = random_relays(net, seed=seed)
    g = unfold(net, relays, T, "S", "D")
    ref = unfold_by_paths(net, [e.coeff for e in net.edges], relays.matrices, T, "S", "D")
    assert g.matrix.shape == ref.shape
    np.testing.assert_allclose(g.matrix, ref, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), T=st.integers(1, 3))
def test_field_unfold_matches_path_expansion(seed, T):
    net = random_dag(seed, n_nodes=5, max_antennas=2)
    dn, _ = lift_network(net, seed)
    relays = random_relays(dn, dn.p, seed)
    g = unfold(dn, relays, T, "S", "D")
    ref = unfold_by_paths(net, list(dn.xi), {k: v.tolist() for k, v in relays.matrices.items()}, T, "S", "D", dn.p)
    np.testing.assert_array_equal(g.matrix, ref)


def test_unfold_is_linear_in_relay_output():
    net = sample_coefficients(keyhole(2, 1, 2), 2)
    relays = random_relays(net, seed=1)
    g = unfold(net, relays, 2).matrix
    doubled = RelayAssignment({k: 2 * v for k, v in relays.matrices.items()})
    np.testing.assert_allclose(unfold(net, doubled, 2).matrix, 2 * g)


def test_random_relays_examples():
    net = point_to_point(2, 2)
    assert len(random_relays(net, seed=3)) == 0
    a = random_relays(diamond(), seed=5)
    b = random_relays(diamond(), seed=5)
    assert a.matrices.keys() == b.matrices.keys() == {"R1", "R2"}
    for k in a.matrices:
        np.testing.assert_array_equal(a.matrices[k], b.matrices[k])


def test_field_relays_are_uniform():
    net = keyhole(1, 10, 1)
    draws = np.concatenate(
        [random_relays(net, 5, seed).matrices["R"].ravel() for seed in range(1000)]
    )
    assert draws.size == 10**5
    counts = np.bincount(draws, minlength=5)
    assert chisquare(counts).pvalue > 0.01


def test_path_lengths_and_horizon():
    assert path_length_range(diamond(), "S", "D") == (2, 2)
    assert is_layered(diamond(), "S", "D")
    net = sample_coefficients(random_dag(1, n_nodes=6), 0)
    lo, hi = path_length_range(net, "S", "D")
    assert default_horizon(net, "S", "D") == hi * (1 + hi - lo)


def test_small_af_dofs():
    assert achievable_dof_af(single_edge(1j)) == 1
    assert achievable_dof_af(sample_coefficients(diamond(), 0), T=1) == 1
    assert achievable_dof_af(sample_coefficients(point_to_point(3, 2), 0), T=1) == 2


def test_af_never_exceeds_dof_on_dags():
    hits = 0
    for seed in range(40):
        net = random_dag(seed, n_nodes=5, max_antennas=2)
        d = dof(net, "S", "D")
        got = achievable_dof_af(net, trials=3, seed=seed)
        assert got <= d
        hits += got == d
    assert hits == 40


def test_af_trials_do_not_depend_on_workers():
    net = random_layered(3)
    assert af_trial_ranks(net, 6, seed=11, workers=1) == af_trial_ranks(net, 6, seed=11, workers=3)
    ss = np.random.SeedSequence(4, spawn_key=(2,))
    assert af_trial_ranks(net, 4, seed=ss) == af_trial_ranks(net, 4, seed=ss)


def test_zero_error_examples():
    code = extract_zero_error_code(np.eye(2, dtype=int), 3)
    assert code.dimension == 2
    assert code.column_selection == (0, 1) and code.row_selection == (0, 1)
    assert verify_zero_error(code, np.eye(2, dtype=int)).ok
    assert extract_zero_error_code(np.array([[1, 2], [2, 4]]), 5).dimension == 1
    with pytest.raises(NoCodeError):
        extract_zero_error_code(np.zeros((2, 2), dtype=int), 7)


def test_lifted_diamond_code():
    net = sample_coefficients(diamond(), 1)
    dn, _ = lift_network(net, 1)
    g = unfold(dn, random_relays(dn, dn.p, seed=2), 1)
    if fp_rank(g.matrix, dn.p) == 0:
        pytest.skip("relay draw hit the zero set")
    code = extract_zero_error_code(g)
    check = verify_zero_error(code, g)
    assert code.dimension == 1
    assert check.ok and check.exhaustive and check.messages_checked == dn.p


def test_corrupted_encoder_is_caught():
    g = np.array([[1, 0, 2], [0, 1, 3], [1, 1, 0]])
    code = extract_zero_error_code(g, 7)
    enc = code.encoder.copy()
    enc[:, 0] = (enc[:, 0] + np.array([0, 1, 0])) % 7
    from dataclasses import replace

    bad = replace(code, encoder=enc)
    check = verify_zero_error(bad, g)
    assert not check.ok
    assert check.counterexample is not None
    msg = np.array(check.counterexample).reshape(-1, 1)
    assert (bad.decode((g @ bad.encode(msg)) % 7) != msg).any()


@settings(max_examples=80, deadline=None)
@given(p=st.sampled_from([2, 3, 5, 7, 11]), data=st.data())
def test_codes_from_random_matrices_decode(p, data):
    rows = data.draw(st.integers(1, 5))
    cols = data.draw(st.integers(1, 5))
    g = data.draw(arrays(np.int64, (rows, cols), elements=st.integers(0, p - 1)))
    r = fp_rank(g, p)
    if r == 0:
        with pytest.raises(NoCodeError):
            extract_zero_error_code(g, p)
        return
    code = extract_zero_error_code(g, p)
    assert code.dimension == r
    check = verify_zero_error(code, g)
    assert check.ok and check.exhaustive


def test_complex_rank_of_unfold_bounded_by_cut():
    for seed in range(20):
        net = random_layered(seed, hops=3)
        T = 3
        g = unfold(net, random_relays(net, seed=seed), T)
        assert numerical_rank(g.matrix) <= T * dof(net, "S", "D")
