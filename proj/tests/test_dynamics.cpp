#include <gtest/gtest.h>

#include "imitate/dynamics.hpp"

using namespace imitate;

namespace {

const ChannelModel kRef({0.3, 0.5, 0.8});
const ChannelModel kTwo({0.3, 0.8});

Mixture random_mixture(Rng& rng, std::size_t c) {
  std::vector<double> x(c);
  for (auto& v : x) v = 0.01 + rng.uniform();
  return Mixture::normalized(std::move(x));
}

MigrationMatrix random_matrix(Rng& rng, std::size_t c) {
  std::vector<std::vector<double>> rows(c, std::vector<double>(c));
  double total = 0.0;
  for (auto& r : rows)
    for (auto& v : r) total += v = 0.01 + rng.uniform();
  for (auto& r : rows)
    for (auto& v : r) v /= total;
  return MigrationMatrix(rows);
}

// x_i(t+1) = x_i(t-1) + sigma pi_i x_i(t-1) - sigma sum_{j,l} pi_l x_j^i x_j^l / x_j
std::vector<double> pi_expansion(const MigrationMatrix& m, double sigma, const ChannelModel& ch, int n) {
  const std::size_t c = ch.size();
  const auto prev = m.column_sums(), now = m.row_sums();
  std::vector<double> out(c);
  for (std::size_t i = 0; i < c; ++i) {
    const double pi_i = ch.mu(i) / (n * prev[i]);
    double cross = 0.0;
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t l = 0; l < c; ++l) cross += ch.mu(l) / (n * prev[l]) * m(j, i) * m(j, l) / now[j];
    out[i] = prev[i] + sigma * pi_i * prev[i] - sigma * cross;
  }
  return out;
}

// Expanded double-imitation update with omega = 1, alpha = 0:
// x_i(t+1) = x_i(t-1)(1 + 2 pi_i) - sum_j x_j^i [(2 + pi_i) pbar_j - pbar_j^2].
std::vector<double> di_expansion(const MigrationMatrix& m, const ChannelModel& ch, int n) {
  const std::size_t c = ch.size();
  const auto prev = m.column_sums(), now = m.row_sums();
  std::vector<double> pbar(c, 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t l = 0; l < c; ++l) pbar[j] += m(j, l) * ch.mu(l) / (n * prev[l]);
    pbar[j] /= now[j];
  }
  std::vector<double> out(c);
  for (std::size_t i = 0; i < c; ++i) {
    const double pi_i = ch.mu(i) / (n * prev[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += m(j, i) * ((2 + pi_i) * pbar[j] - pbar[j] * pbar[j]);
    out[i] = prev[i] * (1 + 2 * pi_i) - s;
  }
  return out;
}

}  // namespace

TEST(Replicator, VanishesAtEquilibriumAndIsTangent) {
  const DynamicsConfig cfg;
  for (double v : replicator_rhs(nash_equilibrium(kRef).values(), cfg, kRef)) EXPECT_NEAR(v, 0, 1e-17);
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_mixture(rng, 3);
    const auto v = replicator_rhs(x.values(), cfg, kRef);
    const auto w = aggregate_monotone_rhs(x.values(), cfg, kRef);
    EXPECT_NEAR(v[0] + v[1] + v[2], 0.0, 1e-16);
    EXPECT_NEAR(w[0] + w[1] + w[2], 0.0, 1e-16);
  }
}

TEST(Replicator, BoundaryExample) {
  // mu_i / N - x_i sum(mu) / N at x = (1, 0).
  const auto v = replicator_rhs(std::vector<double>{1.0, 0.0}, DynamicsConfig{}, kTwo);
  EXPECT_NEAR(v[0], 0.006 - 0.022, 1e-15);
  EXPECT_NEAR(v[1], 0.016, 1e-15);
}

TEST(Replicator, MatchesPayoffForm) {
  DynamicsConfig cfg;
  cfg.sigma = 0.7;
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto x = random_mixture(rng, 3);
    const auto pi = channel_payoffs(x.values(), kRef, cfg.n_sus);
    double pbar = 0.0;
    for (int i = 0; i < 3; ++i) pbar += x[i] * pi[i];
    const auto v = replicator_rhs(x.values(), cfg, kRef);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], cfg.sigma * x[i] * (pi[i] - pbar), 1e-15);
  }
}

TEST(Aggregate, GainOverReplicator) {
  const DynamicsConfig cfg;
  EXPECT_NEAR(aggregate_gain(kRef, cfg), 1.968, 1e-12);
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto x = random_mixture(rng, 3);
    const auto v = replicator_rhs(x.values(), cfg, kRef);
    const auto w = aggregate_monotone_rhs(x.values(), cfg, kRef);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(w[i], 1.968 * v[i], 1e-15);
  }
  for (double v : aggregate_monotone_rhs(nash_equilibrium(kRef).values(), cfg, kRef)) EXPECT_NEAR(v, 0, 1e-17);
}

TEST(ClosedForm, Endpoints) {
  const DynamicsConfig cfg;
  const Mixture x0({0.6, 0.3, 0.1});
  EXPECT_LT(sup_distance(replicator_closed_form(x0, 0, cfg, kRef).values(), x0.values()), 1e-15);
  EXPECT_LT(sup_distance(aggregate_closed_form(x0, 0, cfg, kRef).values(), x0.values()), 1e-15);
  const auto ne = nash_equilibrium(kRef);
  EXPECT_LT(sup_distance(replicator_closed_form(x0, 1e6, cfg, kRef).values(), ne.values()), 1e-12);
  EXPECT_LT(sup_distance(aggregate_closed_form(x0, 1e6, cfg, kRef).values(), ne.values()), 1e-12);
  EXPECT_THROW(replicator_closed_form(x0, -1, cfg, kRef), std::invalid_argument);
}

TEST(ClosedForm, MatchesRk4) {
  DynamicsConfig cfg;
  cfg.t_max = 50;
  const Mixture x0({0.9, 0.1});
  const auto traj =
      integrate([&](std::span<const double> x) { return replicator_rhs(x, cfg, kTwo); }, x0, cfg);
  ASSERT_EQ(traj.size(), 5001u);
  EXPECT_NEAR(traj.back().t, 50.0, 1e-9);
  EXPECT_LT(sup_distance(traj.back().x.values(), replicator_closed_form(x0, 50, cfg, kTwo).values()), 1e-8);
  cfg.t_max = 100;
  for (const auto& start : {Mixture::uniform(3), Mixture({0.02, 0.08, 0.9})}) {
    const auto agg =
        integrate([&](std::span<const double> x) { return aggregate_monotone_rhs(x, cfg, kRef); }, start, cfg);
    double err = 0;
    for (const auto& p : agg) {
      err = std::max(err, sup_distance(p.x.values(), aggregate_closed_form(start, p.t, cfg, kRef).values()));
    }
    EXPECT_LT(err, 1e-8);
  }
}

TEST(Rk4, ZeroFieldIsConstant) {
  DynamicsConfig cfg;
  cfg.t_max = 5;
  const Mixture x0({0.2, 0.3, 0.5});
  const auto traj = integrate([](std::span<const double> x) { return std::vector<double>(x.size(), 0.0); }, x0, cfg);
  for (const auto& p : traj) EXPECT_EQ(p.x, x0);
}

TEST(Rk4, FourthOrderConvergence) {
  // A stiff-enough rate makes the truncation error visible above rounding.
  DynamicsConfig cfg;
  cfg.sigma = 40;
  cfg.t_max = 10;
  const Mixture x0({0.9, 0.1});
  auto max_error = [&](double dt) {
    DynamicsConfig c = cfg;
    c.dt = dt;
    const auto traj = integrate([&](std::span<const double> x) { return replicator_rhs(x, c, kTwo); }, x0, c);
    double err = 0;
    for (const auto& p : traj) {
      err = std::max(err, sup_distance(p.x.values(), replicator_closed_form(x0, p.t, c, kTwo).values()));
    }
    return err;
  };
  const double coarse = max_error(0.5), fine = max_error(0.25);
  EXPECT_GT(coarse / fine, 12.0);
  EXPECT_LT(coarse / fine, 20.0);
}

TEST(Rk4, DivergenceIsReported) {
  DynamicsConfig cfg;
  cfg.t_max = 1;
  EXPECT_THROW(integrate([](std::span<const double> x) { return std::vector<double>(x.size(), 1e3); },
                         Mixture::uniform(2), cfg),
               std::runtime_error);
}

TEST(ConstrainedPi, StationaryAtEquilibrium) {
  const auto ne = nash_equilibrium(kRef);
  const auto step = constrained_pi_map(MigrationMatrix::independent(ne, ne), ne, DynamicsConfig{}, kRef);
  EXPECT_LT(sup_distance(step.x.values(), ne.values()), 1e-15);
  EXPECT_FALSE(step.clamped);
}

TEST(ConstrainedPi, MatchesExpansion) {
  Rng rng(4);
  DynamicsConfig cfg;
  for (int k = 0; k < 100; ++k) {
    cfg.sigma = 0.2 + 2 * rng.uniform();
    const auto m = random_matrix(rng, 3);
    const Mixture prev(m.column_sums());
    const auto step = constrained_pi_map(m, prev, cfg, kRef);
    ASSERT_FALSE(step.clamped);
    EXPECT_NEAR(step.m.total(), 1.0, 1e-14);
    const auto want = pi_expansion(m, cfg.sigma, kRef, cfg.n_sus);
    EXPECT_LT(sup_distance(step.x.values(), want), 1e-14);
    EXPECT_LT(sup_distance(step.m.column_sums(), m.row_sums()), 1e-14);
  }
}

TEST(ConstrainedDi, MatchesExpansion) {
  Rng rng(5);
  const DynamicsConfig cfg;
  for (int k = 0; k < 100; ++k) {
    const auto m = random_matrix(rng, 3);
    const Mixture prev(m.column_sums());
    const auto step = constrained_di_map(m, prev, cfg, kRef);
    EXPECT_NEAR(step.m.total(), 1.0, 1e-14);
    EXPECT_LT(sup_distance(step.x.values(), di_expansion(m, kRef, cfg.n_sus)), 1e-14);
  }
  const auto ne = nash_equilibrium(kRef);
  const auto at_ne = constrained_di_map(MigrationMatrix::independent(ne, ne), ne, cfg, kRef);
  EXPECT_LT(sup_distance(at_ne.x.values(), ne.values()), 1e-15);
}

TEST(ConstrainedMaps, RejectInconsistentInputs) {
  const auto u = Mixture::uniform(3);
  const auto m = MigrationMatrix::independent(u, u);
  EXPECT_THROW(constrained_pi_map(m, Mixture({0.5, 0.25, 0.25}), DynamicsConfig{}, kRef), std::invalid_argument);
  DynamicsConfig bad;
  bad.omega = 2;
  EXPECT_THROW(constrained_di_map(m, u, bad, kRef), std::invalid_argument);
  EXPECT_THROW(MigrationMatrix({{0.5, 0.5}, {0.5, 0.5}}), std::invalid_argument);
}

TEST(ConstrainedMaps, LargeStepsAreClampedAndRenormalized) {
  DynamicsConfig cfg;
  cfg.n_sus = 1;
  cfg.sigma = 50;
  const auto m = MigrationMatrix::independent(Mixture({0.05, 0.05, 0.9}), Mixture({0.9, 0.05, 0.05}));
  const auto step = constrained_pi_map(m, Mixture({0.9, 0.05, 0.05}), cfg, kRef);
  EXPECT_TRUE(step.clamped);
  EXPECT_NEAR(step.m.total(), 1.0, 1e-12);
  for (double v : step.x.values()) EXPECT_GE(v, 0.0);
}

TEST(DoubleMaps, FixedPointAndContraction) {
  const DynamicsConfig cfg;
  const auto ne = nash_equilibrium(kRef);
  EXPECT_LT(sup_distance(double_replicator_step(ne, cfg, kRef).x.values(), ne.values()), 1e-16);
  EXPECT_LT(sup_distance(double_aggregate_step(ne, cfg, kRef).x.values(), ne.values()), 1e-16);
  const auto jac = double_replicator_jacobian(cfg, kRef);
  EXPECT_NEAR(inf_norm(jac), 0.968, 1e-12);
  Rng rng(6);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_mixture(rng, 3), b = random_mixture(rng, 3);
    const double before = sup_distance(a.values(), b.values());
    const double after = sup_distance(double_replicator_step(a, cfg, kRef).x.values(),
                                      double_replicator_step(b, cfg, kRef).x.values());
    EXPECT_NEAR(after, 0.968 * before, 1e-14);
  }
}

TEST(DoubleMaps, IterationConverges) {
  const DynamicsConfig cfg;
  const auto ne = nash_equilibrium(kRef);
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    Mixture x = random_mixture(rng, 3), y = x;
    int steps = 0;
    while (sup_distance(x.values(), ne.values()) > 1e-9 && steps < 2000) {
      x = double_replicator_step(x, cfg, kRef).x;
      ++steps;
    }
    EXPECT_LE(sup_distance(x.values(), ne.values()), 1e-9);
    for (int s = 0; s < 2000; ++s) y = double_aggregate_step(y, cfg, kRef).x;
    EXPECT_LE(sup_distance(y.values(), ne.values()), 1e-9);
  }
}

TEST(DoubleMaps, AggregateStepsFurther) {
  const DynamicsConfig cfg;
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_mixture(rng, 3);
    const double rep = sup_distance(double_replicator_step(x, cfg, kRef).x.values(), x.values());
    const double agg = sup_distance(double_aggregate_step(x, cfg, kRef).x.values(), x.values());
    EXPECT_GE(agg, rep);
  }
}

TEST(Trajectories, IndependentStartIsExactlyApproximated) {
  // With independent initial choices the migration matrix stays a product
  // x(t) x(t-1)^T, and both maps reduce to the interleaved one-step maps.
  const DynamicsConfig cfg;
  const Mixture x0({0.6, 0.2, 0.2}), x1({0.2, 0.2, 0.6});
  for (Policy p : {Policy::pisap, Policy::disap}) {
    const auto exact = constrained_trajectory(p, x0, x1, 200, cfg, kRef);
    const auto approx = interleaved_trajectory(p, x0, x1, 200, cfg, kRef);
    ASSERT_EQ(exact.size(), 201u);
    for (std::size_t t = 0; t < exact.size(); ++t) {
      EXPECT_LT(sup_distance(exact[t].values(), approx[t].values()), 1e-12);
    }
  }
}

TEST(Trajectories, CorrelatedStartIsOnlyApproximated) {
  // Most SUs kept their channel between iterations 0 and 1. The one-step
  // maps then lag the exact ones (by about 0.07 here) but share the limit.
  const DynamicsConfig cfg;
  const auto ne = nash_equilibrium(kRef);
  const MigrationMatrix m0({{0.30, 0.02, 0.02}, {0.02, 0.30, 0.02}, {0.02, 0.02, 0.28}});
  for (Policy p : {Policy::pisap, Policy::disap}) {
    std::vector<Mixture> exact{Mixture(m0.column_sums()), Mixture(m0.row_sums())};
    MigrationMatrix m = m0;
    for (int t = 1; t < 2000; ++t) {
      auto step = p == Policy::pisap ? constrained_pi_map(m, exact[t - 1], cfg, kRef)
                                     : constrained_di_map(m, exact[t - 1], cfg, kRef);
      m = step.m;
      exact.push_back(step.x);
    }
    const auto approx = interleaved_trajectory(p, exact[0], exact[1], 2000, cfg, kRef);
    double gap = 0;
    for (std::size_t t = 0; t < exact.size(); ++t) gap = std::max(gap, sup_distance(exact[t].values(), approx[t].values()));
    EXPECT_GT(gap, 1e-3);
    EXPECT_LT(sup_distance(exact.back().values(), ne.values()), 1e-4);
    EXPECT_LT(sup_distance(approx.back().values(), ne.values()), 1e-4);
  }
}

TEST(Trajectories, DoubleImitationSettlesFirst) {
  const DynamicsConfig cfg;
  const auto ne = nash_equilibrium(kRef);
  const auto u = Mixture::uniform(3);
  const auto pi = settling_index(constrained_trajectory(Policy::pisap, u, u, 1000, cfg, kRef), ne, 1e-3);
  const auto di = settling_index(constrained_trajectory(Policy::disap, u, u, 1000, cfg, kRef), ne, 1e-3);
  ASSERT_TRUE(pi && di);
  EXPECT_LT(*di, *pi);
}

TEST(Phase, TwoChannelPortrait) {
  const DynamicsConfig cfg;
  const auto p = phase_portrait(kTwo, cfg, 23);
  EXPECT_NEAR(p.nullcline, 3.0 / 11, 1e-15);
  for (const auto& f : p.field) {
    if (f.x1 < p.nullcline - 1e-12) {
      EXPECT_GT(f.replicator_v, 0);
      EXPECT_GT(f.aggregate_v, 0);
    } else if (f.x1 > p.nullcline + 1e-12) {
      EXPECT_LT(f.replicator_v, 0);
      EXPECT_LT(f.aggregate_v, 0);
    }
  }
  EXPECT_EQ(p.trajectories.size(), 10u);
  for (const auto& tr : p.trajectories) {
    EXPECT_DOUBLE_EQ(tr.points.front().second, tr.start);
    // Monotone approach towards the rest point.
    for (std::size_t k = 1; k < tr.points.size(); ++k) {
      EXPECT_LE(std::abs(tr.points[k].second - p.nullcline), std::abs(tr.points[k - 1].second - p.nullcline) + 1e-15);
    }
  }
  EXPECT_THROW(phase_portrait(kRef, cfg, 21), std::invalid_argument);
}
