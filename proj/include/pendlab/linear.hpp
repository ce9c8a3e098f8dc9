#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "pendlab/chain.hpp"
#include "pendlab/errors.hpp"

namespace pendlab {

/// Series order used when callers do not pick one. Terms past this are
/// below 1e-12 for amplitudes up to pi/4.
inline constexpr int kDefaultSeriesOrder = 40;

/**
 * Diagonal small-angle model M theta_ddot + L theta = 0.
 *
 * inertia[j]   = l_j * (tail mass at j)
 * stiffness[j] = g * m_j
 */
struct LinearSystem {
  std::vector<double> inertia;
  std::vector<double> stiffness;
};

inline LinearSystem linear_system(const PendulumChain& chain) {
  LinearSystem sys;
  const std::size_t n = chain.size();
  sys.inertia.resize(n);
  sys.stiffness.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    sys.inertia[j] = chain.lengths()[j] * chain.tail_mass(j);
    sys.stiffness[j] = chain.gravity() * chain.masses()[j];
  }
  return sys;
}

/// Decoupled linearized accelerations; the quadratic velocity term is dropped.
inline std::vector<double> linearized_accelerations(const PendulumChain& chain,
                                                    const ChainState& state) {
  check_state(chain, state);
  const LinearSystem sys = linear_system(chain);
  std::vector<double> out(chain.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = -(sys.stiffness[j] / sys.inertia[j]) * state.thetas[j];
  }
  return out;
}

/// omega_j = sqrt(g m_j / (l_j M)), M the total mass. Roots of the diagonal
/// determinant with each tail mass replaced by M.
inline std::vector<double> normal_frequencies(const PendulumChain& chain) {
  const double total = chain.total_mass();
  std::vector<double> out(chain.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::sqrt(chain.gravity() * chain.masses()[j] / (chain.lengths()[j] * total));
  }
  return out;
}

inline double mean_normal_frequency(const PendulumChain& chain) {
  double sum = 0.0;
  for (double w : normal_frequencies(chain)) sum += w;
  return sum / static_cast<double>(chain.size());
}

/// T0 = 2 pi N / sum(omega_j). Equals 2 pi sqrt(N l / g) for a uniform chain.
inline double pseudo_period_ideal(const PendulumChain& chain) {
  double sum = 0.0;
  for (double w : normal_frequencies(chain)) sum += w;
  return 2.0 * std::numbers::pi * static_cast<double>(chain.size()) / sum;
}

inline void check_amplitude(double theta0) {
  if (!(theta0 >= 0.0 && theta0 < std::numbers::pi)) {
    throw DomainError("amplitude must lie in [0, pi), got " + std::to_string(theta0));
  }
}

/**
 * Large-amplitude period correction dT/T0 truncated after `order` terms:
 *
 *   sum_{n=1}^{order} [ (2n)! / (2^{2n} (n!)^2) ]^2 sin^{2n}(theta0 / 2)
 *
 * The central binomial ratio is built by c_n = c_{n-1} (2n-1)/(2n).
 */
inline double correction_series(double theta0, int order = kDefaultSeriesOrder) {
  check_amplitude(theta0);
  if (order < 1) throw DomainError("series order must be >= 1");
  const double s = std::sin(0.5 * theta0);
  const double s2 = s * s;
  double coeff = 1.0;
  double power = 1.0;
  double sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    coeff *= static_cast<double>(2 * n - 1) / static_cast<double>(2 * n);
    power *= s2;
    sum += coeff * coeff * power;
  }
  return sum;
}

struct PeriodModel {
  std::size_t n = 0;
  double omega_bar = 0.0;
  double t0 = 0.0;
  double correction = 0.0;
  double t_real = 0.0;
};

inline PeriodModel pseudo_period_corrected(const PendulumChain& chain, double theta0,
                                           int order = kDefaultSeriesOrder) {
  PeriodModel m;
  m.n = chain.size();
  m.omega_bar = mean_normal_frequency(chain);
  m.t0 = 2.0 * std::numbers::pi / m.omega_bar;
  m.correction = correction_series(theta0, order);
  m.t_real = m.t0 * (1.0 + m.correction);
  return m;
}

/// 1 - |T - T0| / T, which reduces to 1 / (1 + dT/T0) and does not depend on N.
inline double circular_error_bound(double theta0, int order = kDefaultSeriesOrder) {
  return 1.0 / (1.0 + correction_series(theta0, order));
}

}  // namespace pendlab
