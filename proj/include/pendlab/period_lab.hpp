#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pendlab/chain.hpp"
#include "pendlab/errors.hpp"
#include "pendlab/integrator.hpp"
#include "pendlab/linear.hpp"

namespace pendlab {

/// Upper end of the uniform amplitude perturbation applied per trial [rad].
inline constexpr double kMaxPerturbation = 0.017;
/// Height match tolerance for the return-to-height detector [m].
inline constexpr double kHeightTolerance = 1e-3;

enum class PeriodMethod { kVelocitySignChange, kReturnToHeight };

inline const char* to_string(PeriodMethod m) {
  return m == PeriodMethod::kVelocitySignChange ? "velocity-sign-change" : "return-to-height";
}

struct BobPeriodEstimate {
  std::size_t bob_index = 0;  // 1-based
  std::vector<double> crossing_periods;
  double mean_period = 0.0;
  PeriodMethod method = PeriodMethod::kVelocitySignChange;
};

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct Crossing {
  double time;
  int direction;  // +1 for - to +, -1 for + to -
};

/// Zero crossings of a sampled signal, located by linear interpolation.
/// Exact zeros are skipped so a release from rest is not a crossing.
inline std::vector<Crossing> zero_crossings(std::span<const double> times,
                                            std::span<const double> signal) {
  std::vector<Crossing> out;
  std::optional<std::size_t> prev;
  for (std::size_t k = 0; k < signal.size(); ++k) {
    const int s = sign_of(signal[k]);
    if (s == 0) continue;
    if (prev && sign_of(signal[*prev]) != s) {
      const double v0 = signal[*prev];
      const double v1 = signal[k];
      const double frac = v0 / (v0 - v1);
      out.push_back({times[*prev] + frac * (times[k] - times[*prev]), s});
    }
    prev = k;
  }
  return out;
}

/// Time from the start until `heights` has come back to its initial value
/// `returns` times, each return preceded by an excursion beyond `tolerance`.
inline std::optional<double> height_return(std::span<const double> times,
                                           std::span<const double> heights, double tolerance,
                                           int returns) {
  if (heights.empty()) return std::nullopt;
  const double h0 = heights[0];
  int found = 0;
  bool away = false;
  for (std::size_t k = 1; k < heights.size(); ++k) {
    const double d0 = heights[k - 1] - h0;
    const double d1 = heights[k] - h0;
    if (!away) {
      away = std::abs(d1) >= tolerance;
      continue;
    }
    double at = 0.0;
    if (sign_of(d0) != sign_of(d1) && d0 != d1) {
      at = times[k - 1] + d0 / (d0 - d1) * (times[k] - times[k - 1]);
    } else if (std::abs(d1) < tolerance) {
      // Touching return (turning point): take the closest approach.
      while (k + 1 < heights.size() && std::abs(heights[k + 1] - h0) < std::abs(heights[k] - h0)) {
        ++k;
      }
      at = times[k];
    } else {
      continue;
    }
    away = false;
    if (++found == returns) return at - times[0];
  }
  return std::nullopt;
}

}  // namespace detail

/**
 * Pseudo-period of one sampled oscillator.
 *
 * Primary detector: sign changes of `velocity`. One pseudo-complete cycle
 * runs between two consecutive crossings in the same direction, so every
 * crossing pair (c_i, c_{i+2}) yields one cycle duration. Without a single
 * such cycle the detector falls back to `height` recurrence: a bob released
 * from rest starts at a turning point and regains its height at the mirror
 * turning point, so one cycle is the second return to the initial height.
 */
inline BobPeriodEstimate estimate_period(std::span<const double> times,
                                         std::span<const double> velocity,
                                         std::span<const double> height,
                                         double height_tolerance = kHeightTolerance) {
  if (times.size() < 3 || velocity.size() != times.size() || height.size() != times.size()) {
    throw ContractError("period estimation needs >= 3 aligned samples");
  }
  BobPeriodEstimate est;
  const auto crossings = detail::zero_crossings(times, velocity);
  for (std::size_t i = 0; i + 2 < crossings.size(); ++i) {
    est.crossing_periods.push_back(crossings[i + 2].time - crossings[i].time);
  }
  if (est.crossing_periods.empty()) {
    const auto t = detail::height_return(times, height, height_tolerance, 2);
    if (!t || !(*t > 0.0)) {
      throw EstimationError("no complete cycle in " +
                            std::to_string(times.back() - times.front()) + " s of samples");
    }
    est.crossing_periods = {*t};
    est.method = PeriodMethod::kReturnToHeight;
  }
  double sum = 0.0;
  for (double p : est.crossing_periods) sum += p;
  est.mean_period = sum / static_cast<double>(est.crossing_periods.size());
  return est;
}

/// Per-bob estimate from a chain trajectory. The velocity signal is the
/// bob's horizontal velocity (swing direction); the height signal is its y.
/// Vertical velocity is unusable here: it reverses at the bottom of every
/// swing as well as at the turning points, halving the period.
inline BobPeriodEstimate estimate_bob_period(const Trajectory& traj, std::size_t bob_index) {
  const std::size_t n = traj.chain.size();
  if (bob_index < 1 || bob_index > n) {
    throw ContractError("bob index " + std::to_string(bob_index) + " outside 1.." +
                        std::to_string(n));
  }
  const std::size_t i = bob_index - 1;
  std::vector<double> times, swing, height;
  times.reserve(traj.samples.size());
  swing.reserve(traj.samples.size());
  height.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    const CartesianSample c = to_cartesian(traj.chain, s);
    times.push_back(s.time);
    swing.push_back(c.vxs[i]);
    height.push_back(c.ys[i]);
  }
  BobPeriodEstimate est = estimate_period(times, swing, height);
  est.bob_index = bob_index;
  return est;
}

struct SystemPeriod {
  double period = 0.0;
  std::vector<BobPeriodEstimate> bobs;
  std::vector<std::size_t> failed_bobs;  // 1-based
};

/// Mean of the per-bob pseudo-periods. Bobs without a cycle are excluded
/// and listed in failed_bobs.
inline SystemPeriod system_period(const Trajectory& traj) {
  SystemPeriod out;
  for (std::size_t b = 1; b <= traj.chain.size(); ++b) {
    try {
      out.bobs.push_back(estimate_bob_period(traj, b));
    } catch (const EstimationError&) {
      out.failed_bobs.push_back(b);
    }
  }
  if (out.bobs.empty()) throw EstimationError("no bob completed a pseudo-cycle");
  double sum = 0.0;
  for (const auto& b : out.bobs) sum += b.mean_period;
  out.period = sum / static_cast<double>(out.bobs.size());
  return out;
}

/// theta0 + u with u uniform on [0, kMaxPerturbation), reproducible per seed.
inline double perturb_initial(double theta0, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return theta0 + kMaxPerturbation * unit;
}

/// Mean relative deviation (1/K) sum |S_k - T_k| / S_k of model values T
/// from measured values S.
inline double decimal_error(std::span<const double> measured, std::span<const double> model) {
  if (measured.empty() || measured.size() != model.size()) {
    throw ContractError("decimal_error needs equal, nonzero lengths");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    if (measured[k] == 0.0) throw DomainError("measured value is zero");
    sum += std::abs(measured[k] - model[k]) / std::abs(measured[k]);
  }
  return sum / static_cast<double>(measured.size());
}

struct TrialReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double theta0_used = 0.0;
  double measured_period = 0.0;
  double model_t0 = 0.0;
  double model_t_real = 0.0;
  double decimal_error = 0.0;
  double energy_drift = 0.0;
  std::vector<double> bob_periods;       // measured bobs, ascending index
  std::vector<std::size_t> failed_bobs;  // 1-based

  friend bool operator==(const TrialReport&, const TrialReport&) = default;
};

struct TrialRun {
  TrialReport report;
  Trajectory trajectory;
};

/**
 * One trial: a uniform 1 m / 1 kg chain with every link at the perturbed
 * amplitude and zero velocity, integrated, measured per bob, and compared
 * bob by bob against the corrected model at the perturbed amplitude.
 * Returns the trajectory alongside the report.
 */
inline TrialRun simulate_trial(std::size_t n, double theta0, std::uint64_t seed,
                               const IntegrationConfig& config) {
  if (n < 1) throw ContractError("trial needs n >= 1");
  const PendulumChain chain = PendulumChain::uniform(n);
  TrialReport r;
  r.n = n;
  r.seed = seed;
  r.theta0_used = perturb_initial(theta0, seed);
  const PeriodModel model = pseudo_period_corrected(chain, r.theta0_used);
  r.model_t0 = model.t0;
  r.model_t_real = model.t_real;

  Trajectory traj = integrate(chain, ChainState::released(n, r.theta0_used), config);
  r.energy_drift = traj.energy_drift;
  const SystemPeriod sp = system_period(traj);
  r.measured_period = sp.period;
  for (const auto& b : sp.bobs) r.bob_periods.push_back(b.mean_period);
  r.failed_bobs = sp.failed_bobs;
  const std::vector<double> model_values(r.bob_periods.size(), model.t_real);
  r.decimal_error = decimal_error(r.bob_periods, model_values);
  return {std::move(r), std::move(traj)};
}

inline TrialReport run_trial(std::size_t n, double theta0, std::uint64_t seed,
                             const IntegrationConfig& config) {
  return simulate_trial(n, theta0, seed, config).report;
}

}  // namespace pendlab
