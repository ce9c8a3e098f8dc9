#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pendlab/chain.hpp"
#include "pendlab/dynamics.hpp"
#include "pendlab/errors.hpp"

namespace pendlab {

/// Packs a state as [theta_1..theta_N, omega_1..omega_N].
template <class Real>
Vector<Real> pack(const BasicChainState<Real>& s) {
  const auto n = static_cast<Eigen::Index>(s.thetas.size());
  Vector<Real> y(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = s.thetas[i];
    y(n + i) = s.omegas[i];
  }
  return y;
}

template <class Real>
BasicChainState<Real> unpack(const Vector<Real>& y, Real time) {
  const Eigen::Index n = y.size() / 2;
  BasicChainState<Real> s;
  s.thetas.assign(y.data(), y.data() + n);
  s.omegas.assign(y.data() + n, y.data() + 2 * n);
  s.time = time;
  return s;
}

/**
 * One classical Runge-Kutta step for dy/dt = f(t, y):
 *
 *   k1 = h f(t, y)               k2 = h f(t + h/2, y + k1/2)
 *   k3 = h f(t + h/2, y + k2/2)  k4 = h f(t + h, y + k3)
 *   y' = y + (k1 + 2 k2 + 2 k3 + k4) / 6
 */
template <class Derivative, class Real>
Vector<Real> rk4_advance(Derivative&& f, std::type_identity_t<Real> t, const Vector<Real>& y,
                         std::type_identity_t<Real> h) {
  const Real half = h / 2;
  const Vector<Real> k1 = h * f(t, y);
  const Vector<Real> k2 = h * f(t + half, Vector<Real>(y + k1 / 2));
  const Vector<Real> k3 = h * f(t + half, Vector<Real>(y + k2 / 2));
  const Vector<Real> k4 = h * f(t + h, Vector<Real>(y + k3));
  return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6;
}

/// Integrates `steps` fixed steps of size h from t0 and returns the end state.
template <class Derivative, class Real>
Vector<Real> rk4_solve(Derivative&& f, std::type_identity_t<Real> t0, Vector<Real> y,
                       std::type_identity_t<Real> h, std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) {
    y = rk4_advance<Derivative&, Real>(f, t0 + static_cast<Real>(k) * h, y, h);
  }
  return y;
}

/// Derivative functor for a chain that also tracks solver conditioning.
template <class Real>
class ChainDerivative {
 public:
  explicit ChainDerivative(const BasicPendulumChain<Real>& chain) : chain_(chain) {}

  Vector<Real> operator()(Real t, const Vector<Real>& y) {
    const auto s = unpack(y, t);
    const auto sol = solve_accelerations(chain_, s);
    max_condition_ = std::max(max_condition_, sol.condition);
    if (sol.ill_conditioned) ++ill_conditioned_evals_;
    const Eigen::Index n = y.size() / 2;
    Vector<Real> dy(y.size());
    dy.head(n) = y.tail(n);
    for (Eigen::Index i = 0; i < n; ++i) dy(n + i) = sol.thetas_ddot[i];
    return dy;
  }

  double max_condition() const noexcept { return max_condition_; }
  std::size_t ill_conditioned_evals() const noexcept { return ill_conditioned_evals_; }

 private:
  const BasicPendulumChain<Real>& chain_;
  double max_condition_ = 0.0;
  std::size_t ill_conditioned_evals_ = 0;
};

template <class Real>
BasicChainState<Real> rk4_step(const BasicPendulumChain<Real>& chain,
                               const BasicChainState<Real>& state,
                               std::type_identity_t<Real> dt) {
  if (!(dt > 0)) throw ContractError("step size must be > 0");
  check_state(chain, state);
  ChainDerivative<Real> f(chain);
  Vector<Real> y;
  try {
    y = rk4_advance<ChainDerivative<Real>&, Real>(f, state.time, pack(state), dt);
  } catch (const SolverError& e) {
    throw IntegrationError(e.what(), static_cast<double>(state.time));
  }
  if (!y.allFinite()) {
    throw IntegrationError("non-finite state after step", static_cast<double>(state.time));
  }
  return unpack<Real>(y, state.time + dt);
}

struct IntegrationConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  std::size_t sample_stride = 10;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractError("dt must be finite and > 0");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw ContractError("t_end must be >= dt");
    if (sample_stride < 1) throw ContractError("sample_stride must be >= 1");
  }

  /// Number of fixed steps; t_end is rounded to the nearest multiple of dt.
  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

  /// Config that runs `duration` seconds and records `frames` intervals.
  /// The frame interval must be a whole number of steps.
  static IntegrationConfig for_frames(double duration, std::size_t frames, double dt) {
    if (frames < 1) throw ContractError("frames must be >= 1");
    if (!(dt > 0.0)) throw ContractError("dt must be > 0");
    const double frame_dt = duration / static_cast<double>(frames);
    const double ratio = frame_dt / dt;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-6 * ratio) {
      throw ContractError("frame interval " + std::to_string(frame_dt) +
                          " s is not a whole multiple of dt " + std::to_string(dt));
    }
    IntegrationConfig c{dt, duration, stride};
    c.validate();
    return c;
  }
};

template <class Real>
struct BasicTrajectory {
  BasicPendulumChain<Real> chain;
  std::vector<BasicChainState<Real>> samples;
  /// max |E(t) - E(0)| / |E(0)| over samples (absolute when E(0) == 0).
  Real energy_drift = 0;
  double max_condition = 0.0;
  std::size_t ill_conditioned_evals = 0;
};

using Trajectory = BasicTrajectory<double>;

template <class Real>
Real energy_drift(const BasicPendulumChain<Real>& chain,
                  const std::vector<BasicChainState<Real>>& samples) {
  using std::abs;
  if (samples.empty()) return 0;
  const Real e0 = total_energy(chain, samples.front());
  const Real scale = e0 != 0 ? abs(e0) : Real(1);
  Real drift = 0;
  for (const auto& s : samples) {
    drift = std::max(drift, Real(abs(total_energy(chain, s) - e0) / scale));
  }
  return drift;
}

/// Fixed-step RK4 from initial.time for config.steps() steps, recording
/// every sample_stride-th state including the first. Sample times are
/// computed as t0 + k dt, not accumulated.
template <class Real>
BasicTrajectory<Real> integrate(const BasicPendulumChain<Real>& chain,
                                const BasicChainState<Real>& initial,
                                const IntegrationConfig& config) {
  config.validate();
  check_state(chain, initial);
  ChainDerivative<Real> f(chain);
  const std::size_t steps = config.steps();
  const Real t0 = initial.time;
  const auto dt = static_cast<Real>(config.dt);
  BasicTrajectory<Real> traj{chain, {}, 0, 0.0, 0};
  traj.samples.reserve(steps / config.sample_stride + 1);
  traj.samples.push_back(initial);
  Vector<Real> y = pack(initial);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Real t = t0 + static_cast<Real>(k - 1) * dt;
    try {
      y = rk4_advance<ChainDerivative<Real>&, Real>(f, t, y, dt);
    } catch (const SolverError& e) {
      throw IntegrationError(e.what(), static_cast<double>(t));
    }
    if (!y.allFinite()) throw IntegrationError("non-finite state", static_cast<double>(t));
    if (k % config.sample_stride == 0) {
      traj.samples.push_back(unpack<Real>(y, t0 + static_cast<Real>(k) * dt));
    }
  }
  traj.energy_drift = energy_drift(chain, traj.samples);
  traj.max_condition = f.max_condition();
  traj.ill_conditioned_evals = f.ill_conditioned_evals();
  return traj;
}

/**
 * Observed order p = log2(|y_h - y_{h/2}| / |y_{h/2} - y_{h/4}|) from three
 * runs over [t0, t0 + t_end]. Throws DomainError when the differences vanish.
 */
template <class Derivative, class Real>
double richardson_order(Derivative&& f, std::type_identity_t<Real> t0, const Vector<Real>& y0,
                        double t_end, double h) {
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  if (steps < 1) throw ContractError("t_end must cover at least one coarse step");
  const auto rh = static_cast<Real>(h);
  const Vector<Real> y1 = rk4_solve<Derivative&, Real>(f, t0, y0, rh, steps);
  const Vector<Real> y2 = rk4_solve<Derivative&, Real>(f, t0, y0, rh / 2, 2 * steps);
  const Vector<Real> y4 = rk4_solve<Derivative&, Real>(f, t0, y0, rh / 4, 4 * steps);
  const auto num = static_cast<double>((y1 - y2).norm());
  const auto den = static_cast<double>((y2 - y4).norm());
  if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num / den)) {
    throw DomainError("convergence order undefined: successive solutions coincide");
  }
  return std::log2(num / den);
}

template <class Real>
double convergence_order(const BasicPendulumChain<Real>& chain,
                         const BasicChainState<Real>& initial, double dt_coarse,
                         double t_end = 1.0) {
  check_state(chain, initial);
  if (!(dt_coarse > 0.0)) throw ContractError("dt must be > 0");
  ChainDerivative<Real> f(chain);
  try {
    return richardson_order<ChainDerivative<Real>&, Real>(f, initial.time, pack(initial), t_end,
                                                          dt_coarse);
  } catch (const SolverError& e) {
    throw IntegrationError(e.what(), static_cast<double>(initial.time));
  }
}

/// 0.5 dt^2 |theta_ddot|_2: leading single-step error of an explicit Euler
/// step. A conservative per-step diagnostic, not RK4's own local error.
template <class Real>
Real local_truncation_estimate(const BasicPendulumChain<Real>& chain,
                               const BasicChainState<Real>& state,
                               std::type_identity_t<Real> dt) {
  using std::sqrt;
  const std::vector<Real> acc = accelerations(chain, state);
  Real sq = 0;
  for (Real a : acc) sq += a * a;
  return dt * dt * sqrt(sq) / 2;
}

}  // namespace pendlab
