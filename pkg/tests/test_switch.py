import numpy as np
import pytest
from hypothesis import given, settings

from qswitch.channels import FlipParams, apply, bit_flip, compose_sequential, identity_channel, phase_flip
from qswitch.qmat import I2, KET0, KET_MINUS, KET_PLUS, X, Z, is_density, partial_trace, projector, tensor
from qswitch.switch import (
    ControlQubit,
    EmptyBranchError,
    HeraldedBranch,
    Outcome,
    classical_closed_form,
    correct_minus,
    distribute_ct,
    distribute_qs,
    herald,
    minus_branch_closed_form,
    plus_branch_closed_form,
    switch_apply_pair,
    switch_apply_single,
    switch_kraus,
    switch_output_closed_form,
)

from conftest import probs, random_density, seeds

PLUS, MINUS = projector(KET_PLUS), projector(KET_MINUS)

# Bell basis: the flip channels only shuffle the weights on these four states
PHI_P = projector(np.array([1, 0, 0, 1]) / np.sqrt(2))
PHI_M = projector(np.array([1, 0, 0, -1]) / np.sqrt(2))
PSI_P = projector(np.array([0, 1, 1, 0]) / np.sqrt(2))
PSI_M = projector(np.array([0, 1, -1, 0]) / np.sqrt(2))


def bell_mixture(w_phi_p, w_psi_p, w_phi_m, w_psi_m):
    return w_phi_p * PHI_P + w_psi_p * PSI_P + w_phi_m * PHI_M + w_psi_m * PSI_M


def grid(n=21):
    return [(p, q) for p in np.linspace(0, 1, n) for q in np.linspace(0, 1, n)]


def completeness_error(ops):
    d = ops[0].shape[0]
    return np.max(np.abs(sum(w.conj().T @ w for w in ops) - np.eye(d)))


def test_switch_kraus_identity():
    ops = switch_kraus(identity_channel(), identity_channel()).operators
    assert len(ops) == 1
    np.testing.assert_array_equal(ops[0], np.eye(4))


def test_switch_kraus_w22():
    p, q = 0.37, 0.58
    w22 = switch_kraus(bit_flip(p), phase_flip(q)).operators[3]
    expected = np.sqrt(p * q) * (tensor(X @ Z, projector(KET0)) + tensor(Z @ X, np.diag([0, 1])))
    np.testing.assert_allclose(w22, expected, atol=1e-15)
    np.testing.assert_allclose(w22, np.sqrt(p * q) * tensor(X @ Z, Z), atol=1e-15)


@pytest.mark.parametrize("carrier_dim", [2, 4])
def test_switch_kraus_complete(carrier_dim):
    ops = switch_kraus(bit_flip(0.37), phase_flip(0.37), carrier_dim).operators
    assert completeness_error(ops) < 1e-12


@given(probs, probs)
@settings(max_examples=100)
def test_switch_kraus_complete_everywhere(p, q):
    assert completeness_error(switch_kraus(bit_flip(p), phase_flip(q), 4).operators) < 1e-10


def test_single_definite_order_with_control_zero(rng):
    rho = random_density(rng, 2)
    d, e = bit_flip(0.3), phase_flip(0.6)
    out = switch_apply_single(d, e, ControlQubit.zero(), rho)
    # control |0> selects D_i E_j: E acts first
    np.testing.assert_allclose(out, tensor(apply(compose_sequential(e, d), rho), projector(KET0)), atol=1e-15)
    # and for these two channels the order is immaterial
    np.testing.assert_allclose(out, tensor(apply(compose_sequential(d, e), rho), projector(KET0)), atol=1e-15)


def test_single_control_one(rng):
    rho = random_density(rng, 2)
    d, e = bit_flip(0.3), phase_flip(0.6)
    out = switch_apply_single(d, e, ControlQubit.one(), rho)
    np.testing.assert_allclose(out, tensor(apply(compose_sequential(d, e), rho), np.diag([0, 1])), atol=1e-15)


def test_single_half_half_minus_weight():
    out = switch_apply_single(bit_flip(0.5), phase_flip(0.5), ControlQubit.plus(), projector(KET0))
    weight = np.trace(np.kron(I2, MINUS) @ out).real
    assert weight == pytest.approx(0.25, abs=1e-15)


def test_single_noiseless(rng):
    rho = random_density(rng, 2)
    out = switch_apply_single(bit_flip(0), phase_flip(0), ControlQubit.plus(), rho)
    np.testing.assert_allclose(out, tensor(rho, PLUS), atol=1e-15)


def test_pair_examples(rho_e):
    out = switch_apply_pair(bit_flip(0), phase_flip(0), ControlQubit.plus(), rho_e)
    np.testing.assert_allclose(out, tensor(rho_e, PLUS), atol=1e-15)
    out = switch_apply_pair(bit_flip(1), phase_flip(1), ControlQubit.plus(), rho_e)
    u = tensor(I2, X @ Z)
    np.testing.assert_allclose(out, tensor(u @ rho_e @ u.conj().T, MINUS), atol=1e-15)


def test_closed_form_examples(rho_e):
    np.testing.assert_allclose(switch_output_closed_form(FlipParams(0, 0), rho_e), tensor(rho_e, PLUS), atol=1e-15)
    out = switch_output_closed_form(FlipParams(0.5, 0.5), rho_e)
    assert np.trace(np.kron(np.eye(4), MINUS) @ out).real == pytest.approx(0.25, abs=1e-15)
    kraus = switch_apply_pair(bit_flip(0.2), phase_flip(0.7), ControlQubit.plus(), rho_e)
    np.testing.assert_allclose(kraus, switch_output_closed_form(FlipParams(0.2, 0.7), rho_e), atol=1e-12)


@given(probs, probs, seeds)
@settings(max_examples=50, deadline=None)
def test_kraus_sum_equals_closed_form_any_pair(p, q, seed):
    rho = random_density(np.random.default_rng(seed), 4)
    kraus = switch_apply_pair(bit_flip(p), phase_flip(q), ControlQubit.plus(), rho)
    assert is_density(kraus)
    np.testing.assert_allclose(kraus, switch_output_closed_form(FlipParams(p, q), rho), atol=1e-12)


def test_ket_bra_operators_are_local_paulis(rho_e):
    # minus branch before correction is (I x XZ) rho (I x XZ)^dagger
    u = tensor(I2, X @ Z)
    np.testing.assert_allclose(minus_branch_closed_form(rho_e), u @ rho_e @ u.conj().T, atol=1e-15)
    np.testing.assert_allclose(minus_branch_closed_form(rho_e), PSI_M, atol=1e-15)


def test_herald_examples(rho_e):
    plus, minus = herald(switch_apply_pair(bit_flip(0), phase_flip(0), ControlQubit.plus(), rho_e))
    assert plus.probability == pytest.approx(1, abs=1e-15)
    assert minus.empty and minus.pair_state is None

    _, minus = herald(switch_apply_pair(bit_flip(0.5), phase_flip(0.5), ControlQubit.plus(), rho_e))
    assert minus.probability == pytest.approx(0.25, abs=1e-15)

    p, q = 0.3, 0.6
    plus, minus = herald(switch_apply_pair(bit_flip(p), phase_flip(q), ControlQubit.plus(), rho_e))
    assert minus.probability == pytest.approx(0.18, abs=1e-15)
    np.testing.assert_allclose(plus.pair_state, plus_branch_closed_form(FlipParams(p, q), rho_e), atol=1e-12)
    np.testing.assert_allclose(minus.pair_state, minus_branch_closed_form(rho_e), atol=1e-12)


def test_plus_branch_against_bell_weights(rho_e):
    p, q = 0.2, 0.7
    plus, minus = distribute_qs(FlipParams(p, q), rho_e)
    norm = 1 - p * q
    expected = bell_mixture((1 - p) * (1 - q) / norm, p * (1 - q) / norm, (1 - p) * q / norm, 0)
    np.testing.assert_allclose(plus.pair_state, expected, atol=1e-12)
    np.testing.assert_allclose(plus.pair_state, plus_branch_closed_form(FlipParams(p, q), rho_e), atol=1e-12)


def test_distribute_qs_half_half(rho_e):
    plus, minus = distribute_qs(FlipParams(0.5, 0.5), rho_e)
    assert plus.probability == pytest.approx(0.75, abs=1e-15)
    assert minus.probability == pytest.approx(0.25, abs=1e-15)
    np.testing.assert_allclose(minus.pair_state, rho_e, atol=1e-15)
    np.testing.assert_allclose(plus.pair_state, bell_mixture(1 / 3, 1 / 3, 1 / 3, 0), atol=1e-15)


@pytest.mark.parametrize("p, q", [(0.0, 0.4), (0.4, 0.0), (0.0, 1.0)])
def test_distribute_qs_degenerate(p, q, rho_e):
    plus, minus = distribute_qs(FlipParams(p, q), rho_e)
    assert minus.probability == 0 and minus.empty
    assert plus.probability == pytest.approx(1, abs=1e-15)
    expected = bell_mixture((1 - p) * (1 - q), p * (1 - q), (1 - p) * q, 0)
    np.testing.assert_allclose(plus.pair_state, expected, atol=1e-15)


def test_distribute_qs_both_certain(rho_e):
    plus, minus = distribute_qs(FlipParams(1, 1), rho_e)
    assert plus.empty and minus.probability == pytest.approx(1)
    np.testing.assert_allclose(minus.pair_state, rho_e, atol=1e-15)


def test_correct_minus_examples(rho_e):
    err = minus_branch_closed_form(rho_e)
    branch = HeraldedBranch(Outcome.MINUS, 0.3, err)
    np.testing.assert_allclose(correct_minus(branch), rho_e, atol=1e-15)
    twice = correct_minus(HeraldedBranch(Outcome.MINUS, 0.3, correct_minus(HeraldedBranch(Outcome.MINUS, 0.3, rho_e))))
    np.testing.assert_allclose(twice, rho_e, atol=1e-15)
    np.testing.assert_allclose(correct_minus(HeraldedBranch(Outcome.MINUS, 0.3, rho_e)), err, atol=1e-15)
    with pytest.raises(EmptyBranchError):
        correct_minus(HeraldedBranch(Outcome.MINUS, 0.0, None))


def test_distribute_ct_examples(rho_e):
    np.testing.assert_allclose(distribute_ct(FlipParams(0, 0), rho_e), rho_e, atol=1e-15)
    u = tensor(I2, X)
    np.testing.assert_allclose(distribute_ct(FlipParams(1, 0), rho_e), u @ rho_e @ u, atol=1e-15)
    p, q = 0.3, 0.6
    ct = distribute_ct(FlipParams(p, q), rho_e)
    np.testing.assert_allclose(ct, classical_closed_form(FlipParams(p, q), rho_e), atol=1e-12)
    expected = bell_mixture((1 - p) * (1 - q), p * (1 - q), (1 - p) * q, p * q)
    np.testing.assert_allclose(ct, expected, atol=1e-12)


@given(probs, probs, seeds)
@settings(max_examples=50, deadline=None)
def test_classical_order_symmetric(p, q, seed):
    rho = random_density(np.random.default_rng(seed), 4)
    from qswitch.channels import extend_to_carrier

    d, e = extend_to_carrier(bit_flip(p)), extend_to_carrier(phase_flip(q))
    de = apply(compose_sequential(d, e), rho)
    ed = apply(compose_sequential(e, d), rho)
    np.testing.assert_allclose(de, ed, atol=1e-12)
    np.testing.assert_allclose(de, distribute_ct(FlipParams(p, q), rho), atol=1e-12)
    np.testing.assert_allclose(de, classical_closed_form(FlipParams(p, q), rho), atol=1e-12)


def test_branch_probabilities_sum_to_one_on_grid(rho_e):
    for p, q in grid():
        joint = switch_apply_pair(bit_flip(p), phase_flip(q), ControlQubit.plus(), rho_e)
        plus, minus = herald(joint)
        assert abs(plus.probability + minus.probability - 1) < 1e-10


def test_herald_reconstructs_joint(rho_e):
    # sum_k prob_k * pair_k (x) proj_k gives back the switch output
    for p, q in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1), (0.33, 0.81)]:
        params = FlipParams(p, q)
        joint = switch_apply_pair(bit_flip(p), phase_flip(q), ControlQubit.plus(), rho_e)
        plus, minus = herald(joint)
        rebuilt = plus.probability * tensor(plus.pair_state, PLUS) + minus.probability * tensor(minus.pair_state, MINUS)
        np.testing.assert_allclose(rebuilt, joint, atol=1e-12)
        np.testing.assert_allclose(rebuilt, switch_output_closed_form(params, rho_e), atol=1e-12)


def test_control_ends_mixed_in_hadamard_basis(rho_e):
    joint = switch_apply_pair(bit_flip(0.4), phase_flip(0.3), ControlQubit.plus(), rho_e)
    ctrl = partial_trace(joint, [4, 2], keep=[1])
    np.testing.assert_allclose(ctrl, 0.88 * PLUS + 0.12 * MINUS, atol=1e-15)
