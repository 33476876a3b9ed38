#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "imitate/policies.hpp"

using namespace imitate;

namespace {

const ChannelModel kRef({0.3, 0.5, 0.8});

PolicyParams params(Policy p, double sigma, double eps, Scope scope = Scope::global) {
  PolicyParams q = PolicyParams::defaults(p, scope);
  q.sigma = sigma;
  q.epsilon_u = eps;
  return q;
}

// Enumerates every sample an SU could draw and asks the decision rules
// directly whether any of them moves it.
bool brute_force_stable(const NetworkState& s, std::span<const double> u,
                        const PolicyParams& p, Policy policy) {
  const bool global = p.scope == Scope::global;
  const std::size_t n = s.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Channel own = global ? s.channel_now[j] : s.channel_prev[j];
    const double uj = global ? u[j] : s.payoff_prev[j];
    std::vector<std::size_t> pool;
    for (std::size_t k = 0; k < n; ++k) {
      if (global ? k != j : s.channel_now[k] == s.channel_now[j]) pool.push_back(k);
    }
    const auto strat = [&](std::size_t k) { return global ? s.channel_now[k] : s.channel_prev[k]; };
    const auto util = [&](std::size_t k) { return global ? u[k] : s.payoff_prev[k]; };
    if (policy == Policy::pisap) {
      for (std::size_t k : pool) {
        const auto d = pisap_decision(uj, util(k), strat(k), p);
        if (d.probability > 0 && strat(k) != own) return false;
      }
      continue;
    }
    for (std::size_t a : pool) {
      for (std::size_t b : pool) {
        if (global && a == b && pool.size() > 1) continue;
        std::size_t k1 = a, k2 = b;
        if (util(k2) < util(k1) || (util(k2) == util(k1) && k2 < k1)) std::swap(k1, k2);
        const auto [d1, d2] = disap_decision(uj, own, {util(k1), strat(k1)}, {util(k2), strat(k2)}, p);
        if ((d1.probability > 0 && strat(k1) != own) || (d2.probability > 0 && strat(k2) != own)) {
          return false;
        }
      }
    }
  }
  return true;
}

NetworkState random_state(Rng& rng, std::size_t n, std::size_t c, const ChannelModel& ch) {
  NetworkState s;
  for (std::size_t j = 0; j < n; ++j) {
    s.channel_now.push_back(rng.below(c));
    s.channel_prev.push_back(rng.below(c));
  }
  s.payoff_prev = expected_payoffs(ch, s.channel_prev);
  s.iteration = 1;
  return s;
}

}  // namespace

TEST(QFactor, Examples) {
  EXPECT_DOUBLE_EQ(q_factor(0.5, 1, 0), 1.5);
  EXPECT_DOUBLE_EQ(q_factor(1, 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(q_factor(0, 1, 0), 2.0);
  EXPECT_THROW(q_factor(1.5, 1, 0), std::domain_error);
  EXPECT_THROW(q_factor(0.5, 0, 1), std::invalid_argument);
}

TEST(Pisap, Examples) {
  EXPECT_NEAR(pisap_decision(0.2, 0.5, 1, params(Policy::pisap, 1, 0.05)).probability, 0.3, 1e-15);
  EXPECT_EQ(pisap_decision(0.5, 0.5, 1, params(Policy::pisap, 1, 0.05)).probability, 0.0);
  EXPECT_EQ(pisap_decision(0.46, 0.5, 1, params(Policy::pisap, 1, 0.05)).probability, 0.0);
  EXPECT_EQ(pisap_decision(0.1, 0.9, 1, params(Policy::pisap, 5, 0)).probability, 1.0);
}

TEST(Disap, DistinctChannels) {
  const auto [d1, d2] = disap_decision(0.2, 0, {0.4, 1}, {0.6, 2}, params(Policy::disap, 0.25, 0));
  EXPECT_EQ(d1.probability, 0.0);
  EXPECT_NEAR(d2.probability, 0.115, 1e-15);
  EXPECT_EQ(*d1.target, 1u);
  EXPECT_EQ(*d2.target, 2u);
}

TEST(Disap, SameSampleChannelAndEqualPayoffs) {
  const auto [d1, d2] = disap_decision(0.3, 0, {0.3, 1}, {0.3, 1}, params(Policy::disap, 0.25, 0));
  EXPECT_EQ(d1.probability, 0.0);
  EXPECT_EQ(d2.probability, 0.0);
  // i1 = i2 != own: p1 = sigma/2 [Q1 (U1 - U) + Q2 (U2 - U)]+.
  const auto [e1, e2] = disap_decision(0.2, 0, {0.4, 1}, {0.6, 1}, params(Policy::disap, 0.25, 0));
  EXPECT_NEAR(e1.probability, 0.125 * (1.6 * 0.2 + 1.4 * 0.4), 1e-15);
  EXPECT_EQ(e2.probability, 0.0);
}

TEST(Disap, FirstSampleOnOwnChannel) {
  const auto [d1, d2] = disap_decision(0.3, 0, {0.3, 0}, {0.5, 2}, params(Policy::disap, 0.25, 0));
  EXPECT_EQ(d1.probability, 0.0);
  EXPECT_NEAR(d2.probability, 0.0425, 1e-15);
}

TEST(Disap, RejectsUnorderedSamples) {
  EXPECT_THROW(disap_decision(0.2, 0, {0.6, 1}, {0.4, 2}, params(Policy::disap, 0.25, 0)),
               std::invalid_argument);
}

TEST(Disap, ProbabilitiesRescaledWhenTheyExceedOne) {
  const auto [d1, d2] = disap_decision(0.0, 0, {0.9, 1}, {1.0, 1}, params(Policy::disap, 10, 0));
  EXPECT_LE(d1.probability + d2.probability, 1.0 + 1e-15);
  EXPECT_GE(d1.probability, 0.0);
}

TEST(Disap, GateOnEachSample) {
  // Only the better sample clears the threshold.
  const auto [d1, d2] = disap_decision(0.2, 0, {0.25, 1}, {0.9, 2}, params(Policy::disap, 0.25, 0.1));
  EXPECT_EQ(d1.probability, 0.0);
  EXPECT_GT(d2.probability, 0.0);
}

TEST(PolicyStep, TwoPlayerEnumeration) {
  const ChannelModel ch({0.3, 0.8});
  NetworkState s;
  s.channel_now = {0, 1};
  s.channel_prev = s.channel_now;
  s.payoff_prev = {0.3, 0.8};
  const auto p = params(Policy::pisap, 1, 0);
  int both = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto next = policy_step(s, ch, p, Policy::pisap, seed);
    ASSERT_EQ(next.channel_now[1], 1u);  // the better SU never moves
    both += next.channel_now[0] == 1;
  }
  EXPECT_NEAR(both / 10000.0, 0.5, 0.02);
}

TEST(PolicyStep, ThresholdOneFreezesEveryState) {
  Rng rng(9);
  for (int k = 0; k < 300; ++k) {
    const Policy pol = k % 2 ? Policy::pisap : Policy::disap;
    const Scope scope = k % 3 ? Scope::global : Scope::same_channel;
    const auto s = random_state(rng, 2 + rng.below(30), 3, kRef);
    const auto p = params(pol, 1, 1.0, scope);
    const auto next = policy_step(s, kRef, p, pol, rng());
    EXPECT_EQ(next.channel_now, scope == Scope::global ? s.channel_now : s.channel_prev);
  }
}

TEST(PolicyStep, OneOccupiedChannelStaysPut) {
  const auto s = state_from_counts(std::vector<int>{0, 20, 0});
  for (Policy pol : {Policy::pisap, Policy::disap}) {
    const auto next = policy_step(s, kRef, PolicyParams::defaults(pol), pol, 1);
    EXPECT_EQ(next.channel_now, s.channel_now);
  }
}

TEST(PolicyStep, HistoryBookkeeping) {
  Rng rng(4);
  auto s = random_state(rng, 10, 3, kRef);
  const auto u = expected_payoffs(kRef, s.channel_now);
  const auto next = policy_step(s, u, kRef, PolicyParams::defaults(Policy::pisap), Policy::pisap, 5);
  EXPECT_EQ(next.channel_prev, s.channel_now);
  EXPECT_EQ(next.payoff_prev, u);
  EXPECT_EQ(next.iteration, s.iteration + 1);
  s.iteration = 0;
  EXPECT_THROW(policy_step(s, kRef, PolicyParams::defaults(Policy::pisap, Scope::same_channel),
                           Policy::pisap, 5),
               std::logic_error);
}

TEST(PolicyStep, SamplesRespectScope) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const Scope scope = k % 2 ? Scope::global : Scope::same_channel;
    const Policy pol = k % 4 < 2 ? Policy::pisap : Policy::disap;
    const auto s = random_state(rng, 2 + rng.below(20), 3, kRef);
    std::vector<SuRevision> rev;
    policy_step(s, expected_payoffs(kRef, s.channel_now), kRef, PolicyParams::defaults(pol, scope),
                pol, rng(), &rev);
    for (std::size_t j = 0; j < s.size(); ++j) {
      ASSERT_EQ(rev[j].num_sampled, pol == Policy::pisap ? 1u : 2u);
      for (std::size_t m = 0; m < rev[j].num_sampled; ++m) {
        const std::size_t peer = rev[j].sampled[m];
        if (scope == Scope::global) {
          EXPECT_NE(peer, j);
        } else {
          EXPECT_EQ(s.channel_now[peer], s.channel_now[j]);
        }
      }
      if (pol == Policy::disap && scope == Scope::global && s.size() > 2) {
        EXPECT_NE(rev[j].sampled[0], rev[j].sampled[1]);
      }
    }
  }
}

TEST(PolicyStep, GlobalPairDrawIsUniform) {
  const auto s = state_from_counts(std::vector<int>{2, 1, 1});
  const ImitationView view(s, expected_payoffs(kRef, s.channel_now), 3, Scope::global);
  std::map<std::pair<std::size_t, std::size_t>, int> hist;
  Rng rng(12);
  for (int k = 0; k < 60000; ++k) {
    auto [a, b] = view.draw_two(0, rng);
    ++hist[{std::min(a, b), std::max(a, b)}];
  }
  ASSERT_EQ(hist.size(), 3u);  // pairs among SUs 1, 2, 3
  for (const auto& [pair, n] : hist) EXPECT_NEAR(n / 60000.0, 1.0 / 3, 0.01);
}

TEST(PolicyStep, DeterministicPerSeed) {
  Rng rng(21);
  const auto s = random_state(rng, 40, 3, kRef);
  const auto p = PolicyParams::defaults(Policy::disap, Scope::same_channel);
  EXPECT_EQ(policy_step(s, kRef, p, Policy::disap, 99), policy_step(s, kRef, p, Policy::disap, 99));
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 10 && !differs; ++seed) {
    differs = policy_step(s, kRef, p, Policy::disap, seed) != policy_step(s, kRef, p, Policy::disap, 99);
  }
  EXPECT_TRUE(differs);
}

TEST(PolicyStep, ExplorationOnlyUnderChannelScope) {
  const auto s = state_from_counts(std::vector<int>{0, 0, 30});
  auto p = PolicyParams::defaults(Policy::pisap, Scope::same_channel);
  p.exploration = 1.0;
  auto st = s;
  st.iteration = 1;
  st.payoff_prev = expected_payoffs(kRef, st.channel_prev);
  const auto next = policy_step(st, kRef, p, Policy::pisap, 3);
  const auto counts = channel_counts(next.channel_now, 3);
  EXPECT_GT(counts[0], 0);
  EXPECT_GT(counts[1], 0);
  p.scope = Scope::global;
  EXPECT_EQ(policy_step(st, kRef, p, Policy::pisap, 3).channel_now, s.channel_now);
}

TEST(Stability, ReferenceExamples) {
  const auto p = params(Policy::pisap, 1, 0.01);
  EXPECT_TRUE(is_imitation_stable(state_from_counts(std::vector<int>{9, 16, 25}), kRef, p, Policy::pisap));
  EXPECT_FALSE(is_imitation_stable(state_from_counts(std::vector<int>{25, 16, 9}), kRef, p, Policy::pisap));
  EXPECT_TRUE(is_imitation_stable(state_from_counts(std::vector<int>{0, 50, 0}), kRef, p, Policy::pisap));
  EXPECT_TRUE(is_imitation_stable(state_from_counts(std::vector<int>{0, 50, 0}), kRef,
                                  PolicyParams::defaults(Policy::disap), Policy::disap));
}

TEST(Stability, MatchesSampleEnumeration) {
  Rng rng(31);
  int stable = 0, total = 0;
  for (int k = 0; k < 4000; ++k) {
    const std::size_t c = 2 + rng.below(2);
    const ChannelModel ch(c == 2 ? std::vector<double>{0.3, 0.8} : std::vector<double>{0.3, 0.5, 0.8});
    const Policy pol = k % 2 ? Policy::pisap : Policy::disap;
    const Scope scope = (k / 2) % 2 ? Scope::global : Scope::same_channel;
    PolicyParams p = PolicyParams::defaults(pol, scope);
    p.epsilon_u = rng.below(3) == 0 ? 0.0 : 0.3 * rng.uniform();
    auto s = random_state(rng, 2 + rng.below(5), c, ch);
    const auto u = expected_payoffs(ch, s.channel_now);
    const bool want = brute_force_stable(s, u, p, pol);
    ASSERT_EQ(is_imitation_stable(s, u, ch, p, pol), want) << "case " << k;
    stable += want;
    ++total;
  }
  // Both outcomes must be exercised for the comparison to mean anything.
  EXPECT_GT(stable, total / 20);
  EXPECT_LT(stable, total - total / 20);
}

TEST(Stability, StableStatesNeverMove) {
  Rng rng(77);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const Policy pol = k % 2 ? Policy::pisap : Policy::disap;
    PolicyParams p = PolicyParams::defaults(pol);
    p.epsilon_u = 0.3 * rng.uniform();
    const auto s = random_state(rng, 2 + rng.below(6), 3, kRef);
    if (!is_imitation_stable(s, kRef, p, pol)) continue;
    ++checked;
    for (int r = 0; r < 5; ++r) {
      ASSERT_EQ(policy_step(s, kRef, p, pol, rng()).channel_now, s.channel_now);
    }
  }
  EXPECT_GT(checked, 100);
}
