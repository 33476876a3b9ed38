#pragma once

// The spectrum access game: C channels with availability probabilities mu,
// N secondary users sharing each free channel evenly. Utilities are normalized
// to the channel bandwidth, so an SU on channel i earns mu_i / n_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imitate {

using Channel = std::size_t;

/// Absolute tolerance used whenever two payoffs are compared for equality.
inline constexpr double kPayoffTolerance = 1e-12;

/// Tolerance on the simplex constraint for mixtures.
inline constexpr double kSimplexTolerance = 1e-9;

class ChannelModel {
 public:
  explicit ChannelModel(std::vector<double> mu) : mu_(std::move(mu)) {
    if (mu_.size() < 2) {
      throw std::invalid_argument("channel model needs at least 2 channels");
    }
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      if (!(mu_[i] > 0.0 && mu_[i] <= 1.0)) {
        throw std::invalid_argument("availability mu[" + std::to_string(i) +
                                    "] must lie in (0, 1]");
      }
    }
  }

  std::size_t size() const noexcept { return mu_.size(); }
  double mu(Channel i) const { return mu_.at(i); }
  std::span<const double> mu() const noexcept { return mu_; }

  double total() const noexcept { return std::accumulate(mu_.begin(), mu_.end(), 0.0); }
  double min() const noexcept { return *std::min_element(mu_.begin(), mu_.end()); }
  double max() const noexcept { return *std::max_element(mu_.begin(), mu_.end()); }

  bool operator==(const ChannelModel&) const = default;

 private:
  std::vector<double> mu_;
};

/// Population shares on the channel simplex.
class Mixture {
 public:
  Mixture() = default;

  /// Validating constructor: entries nonnegative and summing to one.
  explicit Mixture(std::vector<double> x) : x_(std::move(x)) {
    if (x_.empty()) throw std::invalid_argument("mixture must be nonempty");
    double sum = 0.0;
    for (double v : x_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("mixture entries must be finite and nonnegative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw std::invalid_argument("mixture must sum to 1 (got " + std::to_string(sum) + ")");
    }
  }

  /// Projects an arbitrary nonnegative-ish vector back onto the simplex:
  /// entries below `floor` are raised to it, then the vector is rescaled.
  static Mixture normalized(std::vector<double> x, double floor = 0.0) {
    double sum = 0.0;
    for (double& v : x) {
      if (!std::isfinite(v)) throw std::domain_error("mixture has non-finite entry");
      v = std::max(v, floor);
      sum += v;
    }
    if (!(sum > 0.0)) throw std::domain_error("cannot normalize a zero vector");
    for (double& v : x) v /= sum;
    Mixture m;
    m.x_ = std::move(x);
    return m;
  }

  static Mixture uniform(std::size_t c) {
    return Mixture(std::vector<double>(c, 1.0 / static_cast<double>(c)));
  }

  std::size_t size() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> values() const noexcept { return x_; }
  const std::vector<double>& vec() const noexcept { return x_; }

  bool operator==(const Mixture&) const = default;

 private:
  std::vector<double> x_;
};

/// Sup-norm distance between two equally sized vectors.
inline double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch in sup_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Per-SU state of the finite network. `channel_prev` and `payoff_prev`
/// describe the iteration before `iteration`.
struct NetworkState {
  std::vector<Channel> channel_now;
  std::vector<Channel> channel_prev;
  std::vector<double> payoff_prev;
  std::size_t iteration = 0;

  std::size_t size() const noexcept { return channel_now.size(); }
  bool operator==(const NetworkState&) const = default;
};

inline std::vector<int> channel_counts(std::span<const Channel> channels, std::size_t c) {
  std::vector<int> n(c, 0);
  for (Channel ch : channels) {
    if (ch >= c) throw std::out_of_range("channel index out of range");
    ++n[ch];
  }
  return n;
}

/// Builds a state whose current assignment has exactly the given counts,
/// SUs filled channel by channel. History equals the current assignment.
inline NetworkState state_from_counts(std::span<const int> counts) {
  NetworkState s;
  for (std::size_t ch = 0; ch < counts.size(); ++ch) {
    if (counts[ch] < 0) throw std::invalid_argument("negative channel count");
    s.channel_now.insert(s.channel_now.end(), static_cast<std::size_t>(counts[ch]), ch);
  }
  s.channel_prev = s.channel_now;
  s.payoff_prev.assign(s.channel_now.size(), 0.0);
  return s;
}

/// U = mu_i / n_i for an SU sharing channel i with n_i - 1 others.
inline double expected_payoff(double mu_i, int n_i) {
  if (n_i < 1) throw std::domain_error("payoff of an empty channel is undefined");
  return mu_i / static_cast<double>(n_i);
}

/// Expected payoff of every SU under the given assignment.
inline std::vector<double> expected_payoffs(const ChannelModel& channels,
                                            std::span<const Channel> assignment) {
  const auto n = channel_counts(assignment, channels.size());
  std::vector<double> u(assignment.size());
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    u[j] = expected_payoff(channels.mu(assignment[j]), n[assignment[j]]);
  }
  return u;
}

/// The unique equilibrium of the large-population game: x_i = mu_i / sum(mu).
inline Mixture nash_equilibrium(const ChannelModel& channels) {
  const double total = channels.total();
  std::vector<double> x(channels.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = channels.mu(i) / total;
  return Mixture(std::move(x));
}

inline constexpr double kDefaultPotentialEps0 = 1e-6;

/// Potential of the congestion game, P(x) = sum_i (mu_i / N)(log x_i - log eps0).
inline double potential(std::span<const double> x, const ChannelModel& channels, int n_sus,
                        double eps0 = kDefaultPotentialEps0) {
  if (x.size() != channels.size()) throw std::invalid_argument("mixture size mismatch");
  if (n_sus < 1) throw std::invalid_argument("population must be positive");
  if (!(eps0 > 0.0)) throw std::domain_error("eps0 must be positive");
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::domain_error("potential requires an interior mixture");
    p += channels.mu(i) / n_sus * (std::log(x[i]) - std::log(eps0));
  }
  return p;
}

/// Analytic gradient of `potential`: mu_i / (x_i N), the payoff on channel i.
inline std::vector<double> potential_gradient(std::span<const double> x,
                                              const ChannelModel& channels, int n_sus) {
  if (x.size() != channels.size()) throw std::invalid_argument("mixture size mismatch");
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::domain_error("gradient requires an interior mixture");
    g[i] = channels.mu(i) / (x[i] * n_sus);
  }
  return g;
}

/// Largest gain any SU can obtain by moving alone to another channel. The
/// mover joins the target, so the target payoff is mu_l / (n_l + 1); an empty
/// target therefore yields mu_l.
inline double best_deviation_gain(std::span<const int> counts, const ChannelModel& channels) {
  if (counts.size() != channels.size()) throw std::invalid_argument("count size mismatch");
  double best = -1.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double here = expected_payoff(channels.mu(i), counts[i]);
    for (std::size_t l = 0; l < counts.size(); ++l) {
      if (l == i) continue;
      best = std::max(best, expected_payoff(channels.mu(l), counts[l] + 1) - here);
    }
  }
  return best;
}

inline bool epsilon_ne_check(std::span<const int> counts, const ChannelModel& channels,
                             double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");
  return best_deviation_gain(counts, channels) <= eps + kPayoffTolerance;
}

inline bool epsilon_ne_check(const NetworkState& state, const ChannelModel& channels,
                             double eps) {
  const auto counts = channel_counts(state.channel_now, channels.size());
  return epsilon_ne_check(counts, channels, eps);
}

/// Jain's fairness index (sum a)^2 / (n sum a^2).
inline double jain_index(std::span<const double> a) {
  if (a.empty()) throw std::domain_error("jain index of an empty allocation");
  double s = 0.0, s2 = 0.0;
  for (double v : a) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw std::domain_error("jain index needs finite nonnegative allocations");
    }
    s += v;
    s2 += v * v;
  }
  if (!(s2 > 0.0)) throw std::domain_error("jain index of an all-zero allocation");
  return std::min(1.0, s * s / (static_cast<double>(a.size()) * s2));
}

}  // namespace imitate
