#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pendlab/chain.hpp"
#include "pendlab/errors.hpp"

namespace pendlab {

/// Condition estimates above this are flagged but still solved.
inline constexpr double kConditionWarn = 1e12;
/// Condition estimates above this abort the solve.
inline constexpr double kConditionFail = 1e14;

template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Coupling index for links i and j: the deeper of the two. The tail mass
/// below it is what both links have to drag along.
constexpr std::size_t coupling_index(std::size_t i, std::size_t j) noexcept {
  return i < j ? j : i;
}

/**
 * Exact equations of motion A(theta) * theta_ddot = b(theta, omega), one row
 * per link (each Euler-Lagrange row divided through by l_i):
 *
 *   A_ij = l_j cos(theta_i - theta_j) S_max(i,j)
 *   b_i  = -g sin(theta_i) S_i - sum_j l_j omega_j^2 sin(theta_i - theta_j) S_max(i,j)
 *
 * where S_k is the tail mass at link k.
 */
template <class Real>
struct BasicEomSystem {
  Matrix<Real> a_matrix;
  Vector<Real> b_vector;
};

using EomSystem = BasicEomSystem<double>;

template <class Real>
BasicEomSystem<Real> assemble(const BasicPendulumChain<Real>& chain,
                              const BasicChainState<Real>& state) {
  using std::cos;
  using std::sin;
  check_state(chain, state);
  const std::size_t n = chain.size();
  const auto& l = chain.lengths();
  const auto& th = state.thetas;
  const auto& om = state.omegas;
  const Real g = chain.gravity();

  const auto ni = static_cast<Eigen::Index>(n);
  BasicEomSystem<Real> sys{Matrix<Real>(ni, ni), Vector<Real>(ni)};
  // cos(d) is shared by (i,j) and (j,i); sin(d) flips sign.
  Matrix<Real> cosd(ni, ni), sind(ni, ni);
  for (std::size_t i = 0; i < n; ++i) {
    cosd(i, i) = 1;
    sind(i, i) = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Real d = th[i] - th[j];
      const Real c = cos(d);
      const Real s = sin(d);
      cosd(i, j) = c;
      cosd(j, i) = c;
      sind(i, j) = s;
      sind(j, i) = -s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    Real bi = -g * sin(th[i]) * chain.tail_mass(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Real mass = chain.tail_mass(coupling_index(i, j));
      sys.a_matrix(i, j) = l[j] * (cosd(i, j) * mass);
      bi -= l[j] * (om[j] * om[j] * sind(i, j)) * mass;
    }
    sys.b_vector(i) = bi;
  }
  return sys;
}

template <class Real>
struct BasicAccelerationSolution {
  std::vector<Real> thetas_ddot;
  double condition = 1.0;  // L1 condition estimate of A
  bool ill_conditioned = false;
};

/// Solves A x = b by LU with partial pivoting. Throws SolverError above
/// kConditionFail or when the residual check fails.
template <class Real>
BasicAccelerationSolution<Real> solve_accelerations(const BasicPendulumChain<Real>& chain,
                                                    const BasicChainState<Real>& state) {
  const BasicEomSystem<Real> sys = assemble(chain, state);
  const Eigen::PartialPivLU<Matrix<Real>> lu(sys.a_matrix);
  const auto rcond = static_cast<double>(lu.rcond());
  const double condition =
      rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kConditionFail)) {
    throw SolverError("equations-of-motion matrix is singular or ill-conditioned (cond ~ " +
                          std::to_string(condition) + ")",
                      condition);
  }
  const Vector<Real> x = lu.solve(sys.b_vector);
  const Real bnorm = sys.b_vector.template lpNorm<Eigen::Infinity>();
  const Real resid = (sys.a_matrix * x - sys.b_vector).template lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || resid > Real(1e-10) * bnorm + std::numeric_limits<Real>::min()) {
    throw SolverError("linear solve residual too large (" +
                          std::to_string(static_cast<double>(resid)) + ")",
                      condition);
  }
  BasicAccelerationSolution<Real> out;
  out.thetas_ddot.assign(x.data(), x.data() + x.size());
  out.condition = condition;
  out.ill_conditioned = condition > kConditionWarn;
  return out;
}

template <class Real>
std::vector<Real> accelerations(const BasicPendulumChain<Real>& chain,
                                const BasicChainState<Real>& state) {
  return solve_accelerations(chain, state).thetas_ddot;
}

/// First-order form: derivative of the packed vector [theta; omega] is
/// [omega; theta_ddot], length 2N.
template <class Real>
std::vector<Real> state_derivative(const BasicPendulumChain<Real>& chain,
                                   const BasicChainState<Real>& state) {
  const std::vector<Real> acc = accelerations(chain, state);
  std::vector<Real> out;
  out.reserve(2 * chain.size());
  out.insert(out.end(), state.omegas.begin(), state.omegas.end());
  out.insert(out.end(), acc.begin(), acc.end());
  return out;
}

}  // namespace pendlab
