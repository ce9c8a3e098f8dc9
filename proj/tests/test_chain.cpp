#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pendlab/chain.hpp"

namespace pendlab {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(PendulumChain, RejectsBadParameters) {
  EXPECT_THROW(PendulumChain({}, {}), ContractError);
  EXPECT_THROW(PendulumChain({1.0, 1.0}, {1.0}), ContractError);
  EXPECT_THROW(PendulumChain({1.0, -1.0}, {1.0, 1.0}), ContractError);
  EXPECT_THROW(PendulumChain({1.0}, {0.0}), ContractError);
  EXPECT_THROW(PendulumChain({1.0}, {1.0}, 0.0), ContractError);
  EXPECT_THROW(PendulumChain({NAN}, {1.0}), ContractError);
}

TEST(PendulumChain, MassSums) {
  const PendulumChain chain({1.0, 2.0, 0.5}, {0.5, 1.5, 2.0});
  EXPECT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain.total_mass(), 0.5 + 1.5 + 2.0);
  EXPECT_EQ(chain.tail_mass(0), 4.0);
  EXPECT_EQ(chain.tail_mass(1), 3.5);
  EXPECT_EQ(chain.tail_mass(2), 2.0);
  EXPECT_EQ(chain.depth(2), 3.5);
}

TEST(ToCartesian, HangingAtRest) {
  const auto c = to_cartesian(PendulumChain::uniform(1), ChainState::released(1, 0.0));
  EXPECT_DOUBLE_EQ(c.xs[0], 0.0);
  EXPECT_DOUBLE_EQ(c.ys[0], -1.0);
}

TEST(ToCartesian, BothLinksHorizontal) {
  const auto c = to_cartesian(PendulumChain::uniform(2), ChainState::released(2, kPi / 2));
  EXPECT_NEAR(c.xs[1], 2.0, 1e-15);
  EXPECT_NEAR(c.ys[1], 0.0, 1e-15);
}

TEST(ToCartesian, VelocitySums) {
  const ChainState s{{kPi / 4, kPi / 4}, {1.0, 0.0}, 0.0};
  const auto c = to_cartesian(PendulumChain::uniform(2), s);
  EXPECT_NEAR(c.vxs[0], 0.70711, 1e-5);
  EXPECT_EQ(c.vxs[1], c.vxs[0]);
}

TEST(ToCartesian, DimensionMismatch) {
  EXPECT_THROW(to_cartesian(PendulumChain::uniform(2), ChainState::released(3, 0.0)),
               ContractError);
  ChainState bad = ChainState::released(2, 0.0);
  bad.omegas[1] = INFINITY;
  EXPECT_THROW(to_cartesian(PendulumChain::uniform(2), bad), ContractError);
}

TEST(Energy, KineticExamples) {
  EXPECT_EQ(kinetic_energy(PendulumChain::uniform(4), ChainState::released(4, 0.3)), 0.0);
  EXPECT_DOUBLE_EQ(kinetic_energy(PendulumChain::uniform(1), ChainState{{0.7}, {2.0}, 0.0}), 2.0);
  EXPECT_DOUBLE_EQ(
      kinetic_energy(PendulumChain::uniform(2), ChainState{{0.0, 0.0}, {1.0, 1.0}, 0.0}), 2.5);
}

TEST(Energy, PotentialExamples) {
  const auto one = PendulumChain::uniform(1);
  EXPECT_DOUBLE_EQ(potential_energy(one, ChainState::released(1, 0.0)), -9.8);
  EXPECT_NEAR(potential_energy(one, ChainState::released(1, kPi / 2)), 0.0, 1e-15);
  EXPECT_NEAR(potential_energy(PendulumChain::uniform(2), ChainState::released(2, kPi / 4)),
              -20.789, 5e-4);
}

TEST(Energy, TotalExamples) {
  EXPECT_NEAR(total_energy(PendulumChain::uniform(1), ChainState::released(1, kPi / 4)),
              -6.9296, 5e-5);
  const PendulumChain chain({1.0, 2.0, 0.5}, {0.5, 1.5, 2.0}, 9.81);
  double expected = 0.0;
  for (std::size_t i = 0; i < 3; ++i) expected -= 9.81 * chain.masses()[i] * chain.depth(i);
  EXPECT_DOUBLE_EQ(total_energy(chain, ChainState::released(3, 0.0)), expected);
}

class RandomChains : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20190310};
  std::uniform_real_distribution<double> param{0.3, 2.5};
  std::uniform_real_distribution<double> angle{-kPi, kPi};
  std::uniform_real_distribution<double> rate{-5.0, 5.0};

  PendulumChain chain(std::size_t n) {
    std::vector<double> l(n), m(n);
    for (auto& v : l) v = param(rng);
    for (auto& v : m) v = param(rng);
    return PendulumChain(l, m, 9.81);
  }
  ChainState state(std::size_t n) {
    ChainState s;
    for (std::size_t i = 0; i < n; ++i) {
      s.thetas.push_back(angle(rng));
      s.omegas.push_back(rate(rng));
    }
    return s;
  }
};

TEST_F(RandomChains, RodLengthsPreserved) {
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const auto ch = chain(n);
    const auto c = to_cartesian(ch, state(n));
    double px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::hypot(c.xs[i] - px, c.ys[i] - py);
      ASSERT_NEAR(d, ch.lengths()[i], 1e-9 * ch.lengths()[i]);
      px = c.xs[i];
      py = c.ys[i];
    }
  }
}

TEST_F(RandomChains, EnergyBounds) {
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto ch = chain(n);
    const auto s = state(n);
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) bound += ch.gravity() * ch.masses()[i] * ch.depth(i);
    const double v = potential_energy(ch, s);
    ASSERT_LE(v, bound * (1 + 1e-14));
    ASSERT_GE(v, -bound * (1 + 1e-14));
    ASSERT_GE(kinetic_energy(ch, s), 0.0);
  }
}

TEST_F(RandomChains, VelocitiesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto ch = chain(n);
    const auto s = state(n);
    ChainState fwd = s, back = s;
    for (std::size_t i = 0; i < n; ++i) {
      fwd.thetas[i] += h * s.omegas[i];
      back.thetas[i] -= h * s.omegas[i];
    }
    const auto c = to_cartesian(ch, s);
    const auto cf = to_cartesian(ch, fwd);
    const auto cb = to_cartesian(ch, back);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::max(1.0, std::hypot(c.vxs[i], c.vys[i]));
      ASSERT_NEAR((cf.xs[i] - cb.xs[i]) / (2 * h), c.vxs[i], 1e-5 * scale);
      ASSERT_NEAR((cf.ys[i] - cb.ys[i]) / (2 * h), c.vys[i], 1e-5 * scale);
    }
  }
}

}  // namespace
}  // namespace pendlab
