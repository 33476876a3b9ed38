#pragma once

// Finite-population imitation rules. PISAP samples one peer and copies its
// channel with probability proportional to the payoff gap; DISAP samples two
// peers and weighs gaps with Q(U). Under the channel constraint the peers are
// drawn from the SU's current channel and the comparison uses payoffs (and
// channels) of the previous iteration.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imitate/model.hpp"
#include "imitate/rng.hpp"

namespace imitate {

enum class Policy { pisap, disap };
enum class Scope { global, same_channel };

inline std::string_view to_string(Policy p) { return p == Policy::pisap ? "pisap" : "disap"; }
inline std::string_view to_string(Scope s) { return s == Scope::global ? "global" : "channel"; }

struct PolicyParams {
  double sigma = 1.0;      // imitation factor
  double epsilon_u = 0.01; // imitation threshold
  double omega = 1.0;      // upper payoff bound
  double alpha = 0.0;      // lower payoff bound
  Scope scope = Scope::global;
  // Probability of jumping to a uniformly random channel instead of imitating.
  // Only consulted under the channel constraint; 0 gives the plain rule.
  double exploration = 0.0;

  /// sigma = 1/(omega - alpha) for PISAP; 0.25 for DISAP so that the largest
  /// bracket (2 sigma) stays below one half.
  static PolicyParams defaults(Policy policy, Scope scope = Scope::global) {
    PolicyParams p;
    p.scope = scope;
    p.sigma = policy == Policy::pisap ? 1.0 / (p.omega - p.alpha) : 0.25;
    return p;
  }

  void validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(epsilon_u >= 0.0)) throw std::invalid_argument("epsilon_u must be nonnegative");
    if (!(alpha < omega)) throw std::invalid_argument("alpha must be below omega");
    if (!(exploration >= 0.0 && exploration <= 1.0)) {
      throw std::invalid_argument("exploration must lie in [0, 1]");
    }
  }
};

struct MigrationDecision {
  std::optional<Channel> target;
  double probability = 0.0;
};

/// A sampled peer as seen by the imitating SU.
struct Sample {
  double payoff;
  Channel channel;
};

/// Q(U) = [2 - (U - alpha)/(omega - alpha)] / (omega - alpha).
inline double q_factor(double u, double omega, double alpha) {
  if (!(alpha < omega)) throw std::invalid_argument("alpha must be below omega");
  if (u < alpha - kPayoffTolerance || u > omega + kPayoffTolerance) {
    throw std::domain_error("payoff " + std::to_string(u) + " outside [alpha, omega]");
  }
  const double range = omega - alpha;
  return (2.0 - (u - alpha) / range) / range;
}

namespace detail {

// Imitation of a target is allowed only when it beats the own payoff by more
// than epsilon_u.
inline bool passes_threshold(double u_self, double u_target, double epsilon_u) {
  return u_target - u_self - epsilon_u > kPayoffTolerance;
}

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }
inline double positive_part(double a) { return std::max(0.0, a); }

}  // namespace detail

inline MigrationDecision pisap_decision(double u_self, double u_other, Channel other_channel,
                                        const PolicyParams& params) {
  MigrationDecision d;
  d.target = other_channel;
  if (detail::passes_threshold(u_self, u_other, params.epsilon_u)) {
    d.probability = detail::clamp01(params.sigma * (u_other - u_self));
  }
  return d;
}

/// Double-imitation switch probabilities towards the channels of the two
/// samples. `s1` must be the lower-payoff sample.
inline std::pair<MigrationDecision, MigrationDecision> disap_decision(
    double u_self, Channel self_channel, Sample s1, Sample s2, const PolicyParams& params) {
  if (s1.payoff > s2.payoff) {
    throw std::invalid_argument("disap_decision expects samples ordered by payoff");
  }
  const double w = params.omega, a = params.alpha, sigma = params.sigma;
  const double u = u_self, u1 = s1.payoff, u2 = s2.payoff;
  const double q = q_factor(u, w, a), q1 = q_factor(u1, w, a), q2 = q_factor(u2, w, a);
  using detail::positive_part;

  double p1 = 0.0, p2 = 0.0;
  if (s1.channel == s2.channel) {
    p1 = sigma / 2.0 * positive_part(q1 * (u1 - u) + q2 * (u2 - u));
  } else if (s1.channel == self_channel) {
    p2 = sigma / 4.0 * positive_part(q1 * (u2 - u1) + q * (u2 - u1));
  } else {
    p1 = sigma / 2.0 * positive_part(q * (u1 - u2) + q2 * (u1 - u));
    // May come out negative when the second bracket is below p1.
    p2 = std::max(0.0, sigma / 2.0 * positive_part(q1 * (u2 - u) + q2 * (u1 - u)) - p1);
  }

  if (!detail::passes_threshold(u, u1, params.epsilon_u)) p1 = 0.0;
  if (!detail::passes_threshold(u, u2, params.epsilon_u)) p2 = 0.0;
  p1 = detail::clamp01(p1);
  p2 = detail::clamp01(p2);
  if (p1 + p2 > 1.0) {
    const double total = p1 + p2;
    p1 /= total;
    p2 /= total;
  }
  return {MigrationDecision{s1.channel, p1}, MigrationDecision{s2.channel, p2}};
}

/// What every SU compares and offers for imitation during one step.
///  - Global scope: current channel and current payoff; peers are all other SUs.
///  - Channel constraint: previous channel and previous payoff; peers are the
///    SUs currently on the same channel, self included.
/// `strategy[j]` is also where SU j ends up when it does not imitate.
class ImitationView {
 public:
  ImitationView(const NetworkState& state, std::span<const double> payoffs_now,
                std::size_t num_channels, Scope scope)
      : scope_(scope) {
    const std::size_t n = state.size();
    if (payoffs_now.size() != n) throw std::invalid_argument("payoff vector size mismatch");
    if (n < 2) throw std::invalid_argument("need at least 2 SUs");
    if (scope == Scope::global) {
      strategy_ = state.channel_now;
      utility_.assign(payoffs_now.begin(), payoffs_now.end());
      pools_.resize(1);
      pools_[0].resize(n);
      for (std::size_t j = 0; j < n; ++j) pools_[0][j] = j;
      pool_of_.assign(n, 0);
    } else {
      if (state.channel_prev.size() != n || state.payoff_prev.size() != n) {
        throw std::invalid_argument("channel-constrained imitation needs one iteration of history");
      }
      strategy_ = state.channel_prev;
      utility_ = state.payoff_prev;
      pools_.resize(num_channels);
      pool_of_.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const Channel ch = state.channel_now[j];
        if (ch >= num_channels) throw std::out_of_range("channel index out of range");
        pools_[ch].push_back(j);
        pool_of_[j] = ch;
      }
    }
    for (Channel ch : strategy_) {
      if (ch >= num_channels) throw std::out_of_range("channel index out of range");
    }
  }

  Scope scope() const noexcept { return scope_; }
  std::size_t size() const noexcept { return strategy_.size(); }
  Channel strategy(std::size_t j) const { return strategy_[j]; }
  double utility(std::size_t j) const { return utility_[j]; }
  const std::vector<std::size_t>& pool(std::size_t j) const { return pools_[pool_of_[j]]; }
  const std::vector<std::vector<std::size_t>>& pools() const noexcept { return pools_; }
  bool excludes_self() const noexcept { return scope_ == Scope::global; }

  /// Uniform draw of one peer for SU j.
  std::size_t draw_one(std::size_t j, Rng& rng) const {
    const auto& p = pool(j);
    if (!excludes_self()) return p[rng.below(p.size())];
    const std::size_t k = rng.below(p.size() - 1);
    return k < j ? k : k + 1;  // the global pool is 0..N-1 in order
  }

  /// Two peers. Global scope: distinct and different from j (with N = 2 the
  /// only other SU is used twice). Channel constraint: independent draws.
  std::array<std::size_t, 2> draw_two(std::size_t j, Rng& rng) const {
    if (!excludes_self()) return {draw_one(j, rng), draw_one(j, rng)};
    const std::size_t n = size();
    const std::size_t a = draw_one(j, rng);
    if (n == 2) return {a, a};
    std::size_t k = rng.below(n - 2);
    const std::size_t lo = std::min(a, j), hi = std::max(a, j);
    if (k >= lo) ++k;
    if (k >= hi) ++k;
    return {a, k};
  }

 private:
  Scope scope_;
  std::vector<Channel> strategy_;
  std::vector<double> utility_;
  std::vector<std::vector<std::size_t>> pools_;
  std::vector<std::size_t> pool_of_;
};

/// Outcome of one SU's revision.
struct SuRevision {
  Channel next;
  std::array<std::size_t, 2> sampled{};
  std::size_t num_sampled = 0;  // 0 when the SU explored instead of imitating
};

inline SuRevision revise(const ImitationView& view, std::size_t j, std::size_t num_channels,
                         const PolicyParams& params, Policy policy, Rng& rng) {
  SuRevision r{view.strategy(j)};
  if (view.scope() == Scope::same_channel && params.exploration > 0.0 &&
      rng.uniform() < params.exploration) {
    r.next = static_cast<Channel>(rng.below(num_channels));
    return r;
  }
  const double u = view.utility(j);
  if (policy == Policy::pisap) {
    const std::size_t k = view.draw_one(j, rng);
    r.sampled[0] = k;
    r.num_sampled = 1;
    const auto d = pisap_decision(u, view.utility(k), view.strategy(k), params);
    if (rng.uniform() < d.probability) r.next = *d.target;
    return r;
  }
  auto [k1, k2] = view.draw_two(j, rng);
  if (view.utility(k2) < view.utility(k1) ||
      (view.utility(k2) == view.utility(k1) && k2 < k1)) {
    std::swap(k1, k2);
  }
  r.sampled = {k1, k2};
  r.num_sampled = 2;
  const auto [d1, d2] = disap_decision(u, view.strategy(j), {view.utility(k1), view.strategy(k1)},
                                       {view.utility(k2), view.strategy(k2)}, params);
  const double x = rng.uniform();
  if (x < d1.probability) {
    r.next = *d1.target;
  } else if (x < d1.probability + d2.probability) {
    r.next = *d2.target;
  }
  return r;
}

/// One synchronous revision. Every SU decides from the same snapshot using
/// its own random stream derived from `step_seed` and its index; then all
/// moves are applied. `payoffs_now` are the payoffs earned under
/// `state.channel_now` and become the next state's `payoff_prev`.
inline NetworkState policy_step(const NetworkState& state, std::span<const double> payoffs_now,
                                const ChannelModel& channels, const PolicyParams& params,
                                Policy policy, std::uint64_t step_seed,
                                std::vector<SuRevision>* revisions = nullptr) {
  params.validate();
  if (params.scope == Scope::same_channel && state.iteration < 1) {
    throw std::logic_error("channel-constrained imitation starts after two random iterations");
  }
  const ImitationView view(state, payoffs_now, channels.size(), params.scope);
  NetworkState next;
  next.channel_now.resize(state.size());
  next.channel_prev = state.channel_now;
  next.payoff_prev.assign(payoffs_now.begin(), payoffs_now.end());
  next.iteration = state.iteration + 1;
  if (revisions) revisions->resize(state.size());
  for (std::size_t j = 0; j < state.size(); ++j) {
    Rng rng(derive_seed(step_seed, {j}));
    const SuRevision r = revise(view, j, channels.size(), params, policy, rng);
    next.channel_now[j] = r.next;
    if (revisions) (*revisions)[j] = r;
  }
  return next;
}

/// Convenience overload using exact expected payoffs mu_i / n_i.
inline NetworkState policy_step(const NetworkState& state, const ChannelModel& channels,
                                const PolicyParams& params, Policy policy,
                                std::uint64_t step_seed) {
  const auto u = expected_payoffs(channels, state.channel_now);
  return policy_step(state, u, channels, params, policy, step_seed);
}

namespace detail {

// Peers that share payoff and channel are interchangeable for a decision, so
// the stability scan works on these classes instead of on individual SUs.
struct PeerClass {
  double utility;
  Channel channel;
  std::vector<std::size_t> members;  // ascending SU indices

  std::size_t available(std::size_t self, bool exclude_self) const {
    if (!exclude_self) return members.size();
    const bool has_self = std::binary_search(members.begin(), members.end(), self);
    return members.size() - (has_self ? 1 : 0);
  }
  std::size_t min_member(std::size_t self, bool exclude_self) const {
    for (std::size_t m : members) {
      if (!exclude_self || m != self) return m;
    }
    return members.front();
  }
  std::size_t max_member(std::size_t self, bool exclude_self) const {
    for (auto it = members.rbegin(); it != members.rend(); ++it) {
      if (!exclude_self || *it != self) return *it;
    }
    return members.back();
  }
};

inline std::vector<PeerClass> classify(const ImitationView& view,
                                       const std::vector<std::size_t>& pool) {
  std::vector<PeerClass> classes;
  for (std::size_t k : pool) {
    auto it = std::find_if(classes.begin(), classes.end(), [&](const PeerClass& c) {
      return c.utility == view.utility(k) && c.channel == view.strategy(k);
    });
    if (it == classes.end()) {
      classes.push_back({view.utility(k), view.strategy(k), {k}});
    } else {
      it->members.push_back(k);
    }
  }
  return classes;
}

}  // namespace detail

/// True iff no SU has a positive probability of switching away from its own
/// strategy channel for any sample it could draw. Exploration is ignored.
inline bool is_imitation_stable(const NetworkState& state, std::span<const double> payoffs_now,
                                const ChannelModel& channels, const PolicyParams& params,
                                Policy policy) {
  params.validate();
  const ImitationView view(state, payoffs_now, channels.size(), params.scope);
  const bool excl = view.excludes_self();

  std::vector<std::vector<detail::PeerClass>> classes;
  classes.reserve(view.pools().size());
  for (const auto& pool : view.pools()) classes.push_back(detail::classify(view, pool));

  const auto moves = [](const MigrationDecision& d, Channel own) {
    return d.probability > 0.0 && d.target && *d.target != own;
  };

  const std::size_t pool_index_global = 0;
  for (std::size_t j = 0; j < view.size(); ++j) {
    const auto& peers = view.scope() == Scope::global
                            ? classes[pool_index_global]
                            : classes[state.channel_now[j]];
    const double u = view.utility(j);
    const Channel own = view.strategy(j);

    if (policy == Policy::pisap) {
      for (const auto& c : peers) {
        if (c.available(j, excl) == 0) continue;
        if (moves(pisap_decision(u, c.utility, c.channel, params), own)) return false;
      }
      continue;
    }

    const auto check_pair = [&](const detail::PeerClass& lo, const detail::PeerClass& hi) {
      const auto [d1, d2] =
          disap_decision(u, own, {lo.utility, lo.channel}, {hi.utility, hi.channel}, params);
      return moves(d1, own) || moves(d2, own);
    };

    // Global scope with N = 2 pairs the single peer with itself.
    const bool forced_repeat = excl && view.size() == 2;
    for (std::size_t a = 0; a < peers.size(); ++a) {
      const auto& ca = peers[a];
      const std::size_t na = ca.available(j, excl);
      if (na == 0) continue;
      if ((!excl || na >= 2 || forced_repeat) && check_pair(ca, ca)) return false;
      for (std::size_t b = a + 1; b < peers.size(); ++b) {
        const auto& cb = peers[b];
        if (cb.available(j, excl) == 0) continue;
        if (ca.utility < cb.utility) {
          if (check_pair(ca, cb)) return false;
        } else if (cb.utility < ca.utility) {
          if (check_pair(cb, ca)) return false;
        } else {
          // Equal payoffs: the lower SU index is listed first.
          if (ca.min_member(j, excl) < cb.max_member(j, excl) && check_pair(ca, cb)) return false;
          if (cb.min_member(j, excl) < ca.max_member(j, excl) && check_pair(cb, ca)) return false;
        }
      }
    }
  }
  return true;
}

inline bool is_imitation_stable(const NetworkState& state, const ChannelModel& channels,
                                const PolicyParams& params, Policy policy) {
  const auto u = expected_payoffs(channels, state.channel_now);
  return is_imitation_stable(state, u, channels, params, policy);
}

}  // namespace imitate
