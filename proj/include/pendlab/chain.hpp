#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pendlab/errors.hpp"

namespace pendlab {

inline constexpr double kStandardGravity = 9.8;

/**
 * Static description of a planar chain of N point masses on massless,
 * inextensible rods hanging from a fixed pivot at the origin.
 * Templated on the scalar type; PendulumChain is the double instance.
 *
 * Bob i hangs from bob i-1 (bob 0 is the pivot). Indices are 0-based in
 * code; the tail mass sum at link j is the mass hanging at or below j.
 */
template <class Real>
class BasicPendulumChain {
 public:
  BasicPendulumChain(std::vector<Real> lengths, std::vector<Real> masses,
                     Real gravity = Real(kStandardGravity))
      : lengths_(std::move(lengths)), masses_(std::move(masses)), gravity_(gravity) {
    if (lengths_.empty() || lengths_.size() != masses_.size()) {
      throw ContractError("chain needs equal, nonzero counts of lengths and masses (got " +
                          std::to_string(lengths_.size()) + " lengths, " +
                          std::to_string(masses_.size()) + " masses)");
    }
    for (std::size_t i = 0; i < lengths_.size(); ++i) {
      if (!(lengths_[i] > 0) || !std::isfinite(lengths_[i])) {
        throw ContractError("rod length " + std::to_string(i) + " must be finite and > 0");
      }
      if (!(masses_[i] > 0) || !std::isfinite(masses_[i])) {
        throw ContractError("bob mass " + std::to_string(i) + " must be finite and > 0");
      }
    }
    if (!(gravity_ > 0) || !std::isfinite(gravity_)) {
      throw ContractError("gravity must be finite and > 0");
    }
    tail_mass_.assign(masses_.size(), Real(0));
    Real acc = 0;
    for (std::size_t k = masses_.size(); k-- > 0;) {
      acc += masses_[k];
      tail_mass_[k] = acc;
    }
  }

  /// N identical links: every rod `length`, every bob `mass`.
  static BasicPendulumChain uniform(std::size_t n, Real length = 1, Real mass = 1,
                                    Real gravity = Real(kStandardGravity)) {
    return BasicPendulumChain(std::vector<Real>(n, length), std::vector<Real>(n, mass), gravity);
  }

  std::size_t size() const noexcept { return lengths_.size(); }
  const std::vector<Real>& lengths() const noexcept { return lengths_; }
  const std::vector<Real>& masses() const noexcept { return masses_; }
  Real gravity() const noexcept { return gravity_; }

  /// Sum of masses in ascending index order.
  Real total_mass() const noexcept {
    Real sum = 0;
    for (Real m : masses_) sum += m;
    return sum;
  }

  /// Mass at or below link j, i.e. sum of m_k for k >= j.
  Real tail_mass(std::size_t j) const { return tail_mass_[j]; }

  /// Cumulative rod length from the pivot down to bob i.
  Real depth(std::size_t i) const {
    Real sum = 0;
    for (std::size_t k = 0; k <= i; ++k) sum += lengths_.at(k);
    return sum;
  }

  friend bool operator==(const BasicPendulumChain& a, const BasicPendulumChain& b) {
    return a.lengths_ == b.lengths_ && a.masses_ == b.masses_ && a.gravity_ == b.gravity_;
  }

 private:
  std::vector<Real> lengths_;
  std::vector<Real> masses_;
  Real gravity_;
  std::vector<Real> tail_mass_;
};

/// Angles are measured counterclockwise from the downward vertical.
template <class Real>
struct BasicChainState {
  std::vector<Real> thetas;
  std::vector<Real> omegas;
  Real time = 0;

  /// All links at the same angle, released from rest.
  static BasicChainState released(std::size_t n, Real theta0, Real time = 0) {
    return BasicChainState{std::vector<Real>(n, theta0), std::vector<Real>(n, Real(0)), time};
  }

  friend bool operator==(const BasicChainState&, const BasicChainState&) = default;
};

template <class Real>
struct BasicCartesianSample {
  std::vector<Real> xs, ys;
  std::vector<Real> vxs, vys;
};

using PendulumChain = BasicPendulumChain<double>;
using ChainState = BasicChainState<double>;
using CartesianSample = BasicCartesianSample<double>;

/// Throws ContractError unless `state` matches `chain` and is finite.
template <class Real>
void check_state(const BasicPendulumChain<Real>& chain, const BasicChainState<Real>& state) {
  const std::size_t n = chain.size();
  if (state.thetas.size() != n || state.omegas.size() != n) {
    throw ContractError("state dimension (" + std::to_string(state.thetas.size()) + ", " +
                        std::to_string(state.omegas.size()) + ") does not match chain size " +
                        std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(state.thetas[i]) || !std::isfinite(state.omegas[i])) {
      throw ContractError("state entry " + std::to_string(i) + " is not finite");
    }
  }
}

/// Bob positions and velocities as prefix sums over the links above each bob.
template <class Real>
BasicCartesianSample<Real> to_cartesian(const BasicPendulumChain<Real>& chain,
                                        const BasicChainState<Real>& state) {
  using std::cos;
  using std::sin;
  check_state(chain, state);
  const std::size_t n = chain.size();
  const auto& l = chain.lengths();
  BasicCartesianSample<Real> out;
  out.xs.resize(n);
  out.ys.resize(n);
  out.vxs.resize(n);
  out.vys.resize(n);
  Real x = 0, y = 0, vx = 0, vy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Real s = sin(state.thetas[k]);
    const Real c = cos(state.thetas[k]);
    x += l[k] * s;
    y -= l[k] * c;
    vx += l[k] * state.omegas[k] * c;
    vy += l[k] * state.omegas[k] * s;
    out.xs[k] = x;
    out.ys[k] = y;
    out.vxs[k] = vx;
    out.vys[k] = vy;
  }
  return out;
}

template <class Real>
Real kinetic_energy(const BasicPendulumChain<Real>& chain, const BasicChainState<Real>& state) {
  const auto c = to_cartesian(chain, state);
  Real t = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    t += 0.5 * chain.masses()[i] * (c.vxs[i] * c.vxs[i] + c.vys[i] * c.vys[i]);
  }
  return t;
}

/// Potential datum at the pivot, so hanging bobs have V < 0.
template <class Real>
Real potential_energy(const BasicPendulumChain<Real>& chain, const BasicChainState<Real>& state) {
  const auto c = to_cartesian(chain, state);
  Real v = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    v += chain.masses()[i] * chain.gravity() * c.ys[i];
  }
  return v;
}

template <class Real>
Real total_energy(const BasicPendulumChain<Real>& chain, const BasicChainState<Real>& state) {
  return kinetic_energy(chain, state) + potential_energy(chain, state);
}

}  // namespace pendlab
