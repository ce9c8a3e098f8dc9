// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pendlab/pendlab.hpp"

namespace {

using namespace pendlab;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome double_pendulum_oracle() {
  std::mt19937_64 rng(20190310);
  std::uniform_real_distribution<double> param(0.5, 2.0), angle(-kPi, kPi), rate(-5.0, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double l1 = param(rng), l2 = param(rng), m1 = param(rng), m2 = param(rng);
    const ChainState s{{angle(rng), angle(rng)}, {rate(rng), rate(rng)}, 0.0};
    const auto got = accelerations(PendulumChain({l1, l2}, {m1, m2}, 9.8), s);
    const auto ref = oracle::double_pendulum(l1, l2, m1, m2, 9.8, s.thetas[0], s.thetas[1],
                                             s.omegas[0], s.omegas[1]);
    for (int i = 0; i < 2; ++i) {
      const double scale = std::max(std::abs(ref[i]), 1e-300);
      worst = std::max(worst, std::abs(got[i] - ref[i]) / scale);
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g over 100 states (tol 1e-10)", worst)};
}

Outcome table_t0_column() {
  const std::size_t ns[] = {5, 10, 20, 100};
  const double expected[] = {4.487, 6.347, 8.976, 20.071};
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 4; ++k) {
    const double t0 = pseudo_period_ideal(PendulumChain::uniform(ns[k]));
    ok = ok && std::abs(t0 - expected[k]) <= 1e-3;
    detail += fmt("N=%zu %.5f (ref %.3f)  ", ns[k], t0, expected[k]);
  }
  return {ok, detail + "tol 1e-3 s"};
}

Outcome sqrt_scaling() {
  const double t1 = pseudo_period_ideal(PendulumChain::uniform(1));
  double worst = 0.0;
  for (std::size_t n : {2u, 4u, 9u, 16u, 100u}) {
    const double r = pseudo_period_ideal(PendulumChain::uniform(n)) / t1;
    worst = std::max(worst, std::abs(r - std::sqrt(static_cast<double>(n))));
  }
  return {worst <= 1e-12, fmt("max |T0(N)/T0(1) - sqrt(N)| = %.3g (tol 1e-12)", worst)};
}

Outcome elliptic_correction() {
  double worst = 0.0;
  for (double th : {0.1, 0.5, kPi / 4, 1.0}) {
    worst = std::max(worst, std::abs(1.0 + correction_series(th, 60) - oracle::period_ratio(th)));
  }
  // Fit corr/theta^2 = a + b theta^2 + ... near zero.
  const int samples = 40, degree = 6;
  Eigen::MatrixXd v(samples, degree);
  Eigen::VectorXd rhs(samples);
  for (int k = 0; k < samples; ++k) {
    const double th = 0.02 + 0.28 * k / (samples - 1);
    const double x = th * th;
    for (int p = 0; p < degree; ++p) v(k, p) = std::pow(x, p);
    rhs(k) = correction_series(th, 60) / x;
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
  const double ra = std::abs(c(0) * 16 - 1.0);
  const double rb = std::abs(c(1) * 3072 / 11 - 1.0);
  const bool ok = worst <= 1e-9 && ra <= 1e-6 && rb <= 1e-6;
  return {ok, fmt("max |series - AGM| = %.3g (tol 1e-9); fitted 1/16 rel %.2g, 11/3072 rel %.2g "
                  "(tol 1e-6)",
                  worst, ra, rb)};
}

Outcome rk4_order() {
  const double p1 =
      convergence_order(PendulumChain::uniform(1), ChainState::released(1, 0.5), 1e-2, 1.0);
  const double p2 =
      convergence_order(PendulumChain::uniform(2), ChainState::released(2, kPi / 4), 1e-2, 1.0);

  // Drift at these steps sits near double roundoff, so it is measured in
  // extended precision; the double figures are reported alongside.
  const BasicPendulumChain<long double> wide({1.0L, 1.0L, 1.0L}, {1.0L, 1.0L, 1.0L}, 9.8L);
  const auto wide_init = BasicChainState<long double>::released(3, std::numbers::pi_v<long double> / 4);
  const auto wide_drift = [&](double dt, std::size_t stride) {
    return static_cast<double>(integrate(wide, wide_init, IntegrationConfig{dt, 10.0, stride}).energy_drift);
  };
  const double e_coarse = wide_drift(2e-4, 50);
  const double e_fine = wide_drift(1e-4, 100);
  const double ratio = e_coarse / e_fine;

  const auto chain = PendulumChain::uniform(3);
  const auto init = ChainState::released(3, kPi / 4);
  const double d_coarse = integrate(chain, init, IntegrationConfig{2e-4, 10.0, 50}).energy_drift;
  const double d_fine = integrate(chain, init, IntegrationConfig{1e-4, 10.0, 100}).energy_drift;

  const bool ok = p1 >= 3.5 && p1 <= 4.5 && p2 >= 3.5 && p2 <= 4.5 && ratio >= 12 && ratio <= 20;
  return {ok, fmt("p(N=1)=%.4f p(N=2)=%.4f (band [3.5,4.5]); drift %.3g -> %.3g, ratio %.2f "
                  "(band [12,20], extended precision; double gives %.3g -> %.3g)",
                  p1, p2, e_coarse, e_fine, ratio, d_coarse, d_fine)};
}

Outcome small_angle_recovery() {
  const auto config = IntegrationConfig::for_frames(10.0, 1000, 1e-3);
  const auto chain = PendulumChain::uniform(1);
  const double small = system_period(integrate(chain, ChainState::released(1, kPi / 180), config)).period;
  const double large = system_period(integrate(chain, ChainState::released(1, kPi / 4), config)).period;
  const double ref_small = oracle::small_angle_period(1.0, 9.8);
  const double ref_large = ref_small * oracle::period_ratio(kPi / 4);
  const double e1 = std::abs(small - ref_small) / ref_small;
  const double e2 = std::abs(large - ref_large) / ref_large;
  return {e1 <= 0.005 && e2 <= 0.01,
          fmt("1 deg: %.5f s vs %.5f (rel %.2g, tol 0.005); pi/4: %.5f s vs %.5f (rel %.2g, tol 0.01)",
              small, ref_small, e1, large, ref_large, e2)};
}

constexpr std::uint64_t kCampaignSeed = 20190310;

CampaignResult default_campaign(const fs::path& dir, std::size_t jobs) {
  CampaignConfig c;
  c.seed = kCampaignSeed;
  c.output_dir = dir.string();
  c.write_trajectories = false;
  c.jobs = jobs;
  return run_campaign(c);
}

struct CampaignRuns {
  fs::path root;
  CampaignResult first;
  CampaignResult second;
};

Outcome error_envelope(const CampaignResult& result) {
  bool ok = true;
  std::string detail;
  for (const auto& run : result.runs) {
    if (!run.ok()) {
      ok = false;
      detail += fmt("N=%zu t%zu failed: %s; ", run.n, run.trial, run.error.c_str());
      continue;
    }
    const auto& r = *run.report;
    if (run.n <= 20) {
      ok = ok && r.decimal_error <= 0.40;
      detail += fmt("N=%zu t%zu e=%.3f; ", run.n, run.trial, r.decimal_error);
    } else {
      const bool finite = std::isfinite(r.decimal_error) && std::isfinite(r.measured_period);
      ok = ok && finite;
      detail += fmt("N=%zu t%zu e=%.3f (smoke, %zu/%zu bobs); ", run.n, run.trial,
                    r.decimal_error, r.bob_periods.size(), run.n);
    }
  }
  return {ok, detail + "tol e <= 0.40 for N <= 20"};
}

Outcome chaos_witness() {
  const auto chain = PendulumChain::uniform(3);
  const auto config = IntegrationConfig::for_frames(10.0, 1000, 1e-3);
  const double delta = 1e-8;
  ChainState a = ChainState::released(3, kPi / 4);
  ChainState b = a;
  b.thetas[0] += delta;
  const auto ta = integrate(chain, a, config);
  const auto tb = integrate(chain, b, config);
  double sep = 0.0;
  for (std::size_t k = 0; k < ta.samples.size(); ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      sep = std::max(sep, std::abs(ta.samples[k].thetas[i] - tb.samples[k].thetas[i]));
    }
  }
  const double growth = sep / delta;
  return {growth >= 1e3, fmt("max separation %.3g rad, growth factor %.3g (floor 1e3)", sep, growth)};
}

Outcome determinism(const CampaignRuns& runs) {
  const std::string a = slurp(runs.root / "jobs1" / "summary.csv");
  const std::string b = slurp(runs.root / "jobs2" / "summary.csv");
  const bool ok = !a.empty() && a == b;
  return {ok, fmt("summary.csv %zu bytes, jobs=1 vs jobs=2 %s", a.size(),
                  ok ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  run(1, "double-pendulum oracle", double_pendulum_oracle);
  run(2, "T0 table column", table_t0_column);
  run(3, "sqrt(N) scaling", sqrt_scaling);
  run(4, "elliptic correction oracle", elliptic_correction);
  run(5, "RK4 order and energy drift", rk4_order);
  run(6, "small-angle period recovery", small_angle_recovery);

  CampaignRuns campaigns;
  campaigns.root = fs::temp_directory_path() / "pendlab_acceptance";
  fs::remove_all(campaigns.root);
  std::string campaign_error;
  const auto start = std::chrono::steady_clock::now();
  try {
    campaigns.first = default_campaign(campaigns.root / "jobs1", 1);
    campaigns.second = default_campaign(campaigns.root / "jobs2", 2);
  } catch (const std::exception& e) {
    campaign_error = e.what();
  }
  const double campaign_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("  (two default campaigns, seed %llu: %.1f s)\n",
              static_cast<unsigned long long>(kCampaignSeed), campaign_secs);

  run(7, "campaign error envelope", [&] {
    if (!campaign_error.empty()) return Outcome{false, "campaign failed: " + campaign_error};
    return error_envelope(campaigns.first);
  });
  run(8, "chaos witness", chaos_witness);
  run(9, "campaign determinism", [&] {
    if (!campaign_error.empty()) return Outcome{false, "campaign failed: " + campaign_error};
    return determinism(campaigns);
  });
  fs::remove_all(campaigns.root);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
