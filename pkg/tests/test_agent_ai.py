import math

import numpy as np
import pytest

from activesense import nn
from activesense.agent_ai import (
    ActiveInferenceAgent,
    action_prior,
    ai_select_action,
    efe_loss_and_grad,
    efe_update,
    efe_values,
    expected_next_efe,
    policy_loss_and_grad,
    policy_update,
)
from oracles import finite_difference, max_rel_err

M = 8


def fixed_output(values, head="identity", hidden=4):
    params = nn.init_mlp([M, hidden, hidden, M - 1], np.random.default_rng(0), head=head)
    params.weights[-1][...] = 0.0
    params.biases[-1][...] = values
    return params


def belief(rng):
    return rng.dirichlet(np.ones(M))


class TestEFEValues:
    def test_zero_net(self):
        efe = fixed_output(np.zeros(M - 1))
        pi = np.full(M, 1 / M)
        np.testing.assert_array_equal(efe_values(efe, pi), 0.0)
        np.testing.assert_allclose(action_prior(efe, pi), 1 / (M - 1), atol=1e-15)

    def test_low_efe_dominates(self):
        G = np.zeros(M - 1)
        G[5] = -50.0
        assert action_prior(fixed_output(G), np.full(M, 1 / M))[5] > 0.99

    def test_finite(self):
        rng = np.random.default_rng(0)
        efe = nn.init_mlp([M, 64, 64, M - 1], rng)
        for _ in range(100):
            assert np.all(np.isfinite(efe_values(efe, belief(rng))))


class TestEFEUpdate:
    def test_terminal_zero_reward(self):
        rng = np.random.default_rng(1)
        efe = nn.init_mlp([M, 8, 8, M - 1], rng)
        policy = nn.init_mlp([M, 8, 8, M - 1], rng, head="softmax")
        a, b = belief(rng), belief(rng)
        loss, _ = efe_loss_and_grad(efe, efe.copy(), policy, a, 3, 0.0, b, True)
        assert loss == pytest.approx(efe_values(efe, a)[2] ** 2, rel=1e-12)

    def test_expectation_of_constant(self):
        g = 1.7
        target = fixed_output(np.full(M - 1, g))
        policy = fixed_output(np.zeros(M - 1), head="softmax")
        assert expected_next_efe(target, policy, np.full(M, 1 / M)) == pytest.approx(g, abs=1e-14)

    def test_expectation_matches_brute_force(self):
        rng = np.random.default_rng(2)
        target = nn.init_mlp([M, 8, 8, M - 1], rng)
        policy = nn.init_mlp([M, 8, 8, M - 1], rng, head="softmax")
        for _ in range(20):
            pi = belief(rng)
            G = nn.forward(target, pi)[0]
            logits = nn.cached_logits(nn.forward(policy, pi)[1])
            w = [math.exp(z) for z in logits]
            ref = sum(wi * gi for wi, gi in zip(w, G)) / sum(w)
            assert expected_next_efe(target, policy, pi) == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("terminal", [False, True])
    def test_gradient_check(self, terminal):
        rng = np.random.default_rng(3)
        efe = nn.init_mlp([M, 6, 6, M - 1], rng)
        target = nn.init_mlp([M, 6, 6, M - 1], rng)
        policy = nn.init_mlp([M, 6, 6, M - 1], rng, head="softmax")
        a, b = belief(rng), belief(rng)
        args = (target, policy, a, 4, -0.3, b, terminal)
        _, grads = efe_loss_and_grad(efe, *args)
        numeric = finite_difference(lambda: efe_loss_and_grad(efe, *args)[0], efe.arrays())
        assert max_rel_err(grads.arrays(), numeric) <= 1e-4

    def test_lagged_target(self):
        rng = np.random.default_rng(4)
        efe = nn.Network.create([M, 8, 8, M - 1], rng, lagged=True)
        policy = nn.init_mlp([M, 8, 8, M - 1], rng, head="softmax")
        before = efe.params.copy()
        efe_update(efe, policy, belief(rng), 2, 0.1, belief(rng), False)
        assert all(np.array_equal(x, y) for x, y in zip(efe.lagged.arrays(), before.arrays()))


def direct_free_energy(mu, G):
    """-H(mu) - sum mu log softmax(-G), summed term by term."""
    e = [math.exp(-g) for g in G]
    z = sum(e)
    neg_h = sum(m * math.log(m) for m in mu)
    cross = sum(m * math.log(ei / z) for m, ei in zip(mu, e))
    return neg_h - cross


class TestPolicyLoss:
    def test_constant_G_stationary_at_uniform(self):
        policy = fixed_output(np.zeros(M - 1), head="softmax")
        loss, grads = policy_loss_and_grad(policy, np.full(M - 1, 3.0), np.full(M, 1 / M))
        assert abs(loss) <= 1e-14
        assert max(np.max(np.abs(g)) for g in grads.arrays()) <= 1e-14

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            policy = nn.init_mlp([M, 8, 8, M - 1], rng, head="softmax")
            G = rng.normal(scale=2, size=M - 1)
            pi = belief(rng)
            mu = nn.forward(policy, pi)[0]
            loss, _ = policy_loss_and_grad(policy, G, pi)
            assert loss == pytest.approx(direct_free_energy(mu, G), abs=1e-12)

    def test_zero_at_target(self):
        rng = np.random.default_rng(6)
        G = rng.normal(size=M - 1)
        policy = fixed_output(-G, head="softmax")
        mu = nn.forward(policy, np.full(M, 1 / M))[0]
        loss, _ = policy_loss_and_grad(policy, G, np.full(M, 1 / M))
        assert loss == pytest.approx(direct_free_energy(mu, G), abs=1e-12)
        assert abs(loss) <= 1e-12

    def test_kl_descent(self):
        rng = np.random.default_rng(7)
        policy = nn.Network.create([M, 16, 16, M - 1], rng, head="softmax")
        efe = fixed_output(rng.normal(scale=2, size=M - 1))
        pi = belief(rng)
        kls = [policy_update(policy, efe, pi) for _ in range(300)]
        assert all(x > y for x, y in zip(kls, kls[1:]))
        assert kls[-1] < 0.05 * kls[0]

    def test_gradient_equals_kl_gradient(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            policy = nn.init_mlp([M, 6, 6, M - 1], rng, head="softmax")
            G = rng.normal(size=M - 1)
            pi = belief(rng)
            q = nn.softmax(-G)

            def kl():
                mu = nn.forward(policy, pi)[0]
                return float(np.sum(mu * (np.log(mu) - np.log(q))))

            _, grads = policy_loss_and_grad(policy, G, pi)
            numeric = finite_difference(kl, policy.arrays())
            assert max_rel_err(grads.arrays(), numeric) <= 1e-6

    def test_gradient_check_against_printed_form(self):
        rng = np.random.default_rng(9)
        policy = nn.init_mlp([M, 6, 6, M - 1], rng, head="softmax")
        G, pi = rng.normal(size=M - 1), belief(rng)
        _, grads = policy_loss_and_grad(policy, G, pi)
        numeric = finite_difference(
            lambda: direct_free_energy(nn.forward(policy, pi)[0], G), policy.arrays())
        assert max_rel_err(grads.arrays(), numeric) <= 1e-4

    def test_policy_positive_after_updates(self):
        rng = np.random.default_rng(10)
        policy = nn.Network.create([M, 8, 8, M - 1], rng, head="softmax", lr=1e-2)
        efe = nn.init_mlp([M, 8, 8, M - 1], rng)
        for _ in range(1000):
            policy_update(policy, efe, belief(rng))
        for _ in range(20):
            mu = nn.forward(policy.params, belief(rng))[0]
            assert np.all(mu > 0) and abs(mu.sum() - 1) <= 1e-12


class TestSelection:
    n = 100_000

    def test_uniform(self):
        rng = np.random.default_rng(0)
        policy = fixed_output(np.zeros(M - 1), head="softmax")
        pi = np.full(M, 1 / M)
        counts = np.bincount([ai_select_action(policy, pi, rng) for _ in range(self.n)],
                             minlength=M)[1:]
        sigma = math.sqrt(self.n / (M - 1) * (1 - 1 / (M - 1)))
        assert np.all(np.abs(counts - self.n / (M - 1)) <= 4 * sigma)

    def test_near_degenerate(self):
        rng = np.random.default_rng(1)
        logits = np.zeros(M - 1)
        logits[0] = 12.0
        policy = fixed_output(logits, head="softmax")
        pi = np.full(M, 1 / M)
        hits = sum(ai_select_action(policy, pi, rng) == 1 for _ in range(self.n))
        assert hits / self.n > 0.99

    def test_seeded(self):
        policy = nn.init_mlp([M, 8, 8, M - 1], np.random.default_rng(2), head="softmax")
        pi = np.full(M, 1 / M)
        r1 = np.random.default_rng(5)
        r2 = np.random.default_rng(5)
        assert [ai_select_action(policy, pi, r1) for _ in range(50)] == \
               [ai_select_action(policy, pi, r2) for _ in range(50)]


def test_agent_learn_updates_both():
    agent = ActiveInferenceAgent(M, np.random.default_rng(0), hidden=8)
    rng = np.random.default_rng(1)
    agent.learn(belief(rng), 2, 0.4, belief(rng), False, rng)
    assert agent.efe.adam.t == 1 and agent.policy.adam.t == 1
