#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pendlab/chain.hpp"
#include "pendlab/errors.hpp"
#include "pendlab/integrator.hpp"
#include "pendlab/linear.hpp"
#include "pendlab/period_lab.hpp"

namespace pendlab {

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

/// 17 significant digits, enough to round-trip any double.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC 4180 quoting for fields containing separators, quotes or newlines.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

inline constexpr const char* kPhaseSpaceHeader = "t,x,y,vx,vy";
inline constexpr const char* kModelTableHeader = "n,t0,delta_t,t_low,t_high";
inline constexpr const char* kSummaryHeader =
    "n,trial,seed,status,theta0_used,measured_period,model_t0,model_t_real,decimal_error,"
    "bobs_measured,bobs_failed,energy_drift,message";

/// Cartesian trace of one bob, one row per sample.
inline void emit_phase_space(const PendulumChain& chain, const Trajectory& traj,
                             std::size_t bob_index, const std::filesystem::path& path) {
  if (bob_index < 1 || bob_index > chain.size()) {
    throw ContractError("bob index " + std::to_string(bob_index) + " outside 1.." +
                        std::to_string(chain.size()));
  }
  const std::size_t i = bob_index - 1;
  std::ofstream out = open_output(path);
  out << kPhaseSpaceHeader << '\n';
  for (const auto& s : traj.samples) {
    const CartesianSample c = to_cartesian(chain, s);
    out << format_real(s.time) << ',' << format_real(c.xs[i]) << ',' << format_real(c.ys[i])
        << ',' << format_real(c.vxs[i]) << ',' << format_real(c.vys[i]) << '\n';
  }
  finish_output(out, path);
}

/// Full state history: t, theta_1..theta_N, omega_1..omega_N.
inline void emit_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  const std::size_t n = traj.chain.size();
  std::ofstream out = open_output(path);
  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",theta_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",omega_" << i;
  out << '\n';
  for (const auto& s : traj.samples) {
    out << format_real(s.time);
    for (double v : s.thetas) out << ',' << format_real(v);
    for (double v : s.omegas) out << ',' << format_real(v);
    out << '\n';
  }
  finish_output(out, path);
}

struct ModelRow {
  std::size_t n = 0;
  double t0 = 0.0;
  double delta_t = 0.0;  // correction * t0
  double t_low = 0.0;
  double t_high = 0.0;

  friend bool operator==(const ModelRow&, const ModelRow&) = default;
};

/// Ideal period and amplitude band for uniform 1 m / 1 kg chains.
inline std::vector<ModelRow> model_table(const std::vector<std::size_t>& n_values,
                                         double theta0) {
  const double corr = correction_series(theta0);
  std::vector<ModelRow> rows;
  for (std::size_t n : n_values) {
    const double t0 = pseudo_period_ideal(PendulumChain::uniform(n));
    const double dt = corr * t0;
    rows.push_back({n, t0, dt, t0 - dt, t0 + dt});
  }
  return rows;
}

inline void write_model_table(const std::vector<ModelRow>& rows,
                              const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << kModelTableHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << format_real(r.t0) << ',' << format_real(r.delta_t) << ','
        << format_real(r.t_low) << ',' << format_real(r.t_high) << '\n';
  }
  finish_output(out, path);
}

inline std::vector<ModelRow> emit_model_table(const std::vector<std::size_t>& n_values,
                                              double theta0, const std::filesystem::path& path) {
  auto rows = model_table(n_values, theta0);
  write_model_table(rows, path);
  return rows;
}

// ---------------------------------------------------------------------------
// Campaign
// ---------------------------------------------------------------------------

struct CampaignConfig {
  std::vector<std::size_t> n_values{5, 10, 20, 100};
  std::size_t trials = 3;
  double theta0 = std::numbers::pi / 4;
  double duration = 10.0;
  std::size_t frames = 1000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::string output_dir;  // empty: keep results in memory only
  std::size_t jobs = 1;
  bool write_trajectories = true;

  void validate() const {
    if (n_values.empty()) throw ContractError("campaign needs at least one n value");
    for (std::size_t n : n_values) {
      if (n < 1) throw ContractError("n values must be >= 1");
    }
    if (trials < 1) throw ContractError("trials must be >= 1");
    if (jobs < 1) throw ContractError("jobs must be >= 1");
    check_amplitude(theta0);
    integration().validate();
  }

  IntegrationConfig integration() const {
    return IntegrationConfig::for_frames(duration, frames, dt);
  }

  friend bool operator==(const CampaignConfig&, const CampaignConfig&) = default;
};

/// Seed for one (n, trial) cell, mixed from the campaign seed.
inline std::uint64_t run_seed(std::uint64_t campaign_seed, std::size_t n, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(campaign_seed),
                    static_cast<std::uint32_t>(campaign_seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct RunRecord {
  std::size_t n = 0;
  std::size_t trial = 0;  // 1-based
  std::uint64_t seed = 0;
  std::optional<TrialReport> report;  // empty when the run failed
  std::string error;

  bool ok() const noexcept { return report.has_value(); }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct NSummary {
  std::size_t n = 0;
  double mean_decimal_error = 0.0;
  double sigma = 0.0;  // mean error * sqrt(successful trials)
  std::size_t successful_trials = 0;

  friend bool operator==(const NSummary&, const NSummary&) = default;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<RunRecord> runs;  // ordered by (n position, trial)
  std::vector<ModelRow> model_table;
  std::vector<NSummary> summary;

  std::size_t failed_runs() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok(); }));
  }

  friend bool operator==(const CampaignResult&, const CampaignResult&) = default;
};

inline std::string trajectory_filename(std::size_t n, std::size_t trial) {
  return "trajectory_n" + std::to_string(n) + "_trial" + std::to_string(trial) + ".csv";
}

inline void write_summary_csv(const CampaignResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << kSummaryHeader << '\n';
  for (const auto& run : result.runs) {
    out << run.n << ',' << run.trial << ',' << run.seed << ',';
    if (run.ok()) {
      const TrialReport& r = *run.report;
      out << "ok," << format_real(r.theta0_used) << ',' << format_real(r.measured_period) << ','
          << format_real(r.model_t0) << ',' << format_real(r.model_t_real) << ','
          << format_real(r.decimal_error) << ',' << r.bob_periods.size() << ','
          << r.failed_bobs.size() << ',' << format_real(r.energy_drift) << ",\n";
    } else {
      out << "failed,,,,,,,,," << csv_field(run.error) << '\n';
    }
  }
  finish_output(out, path);
}

// JSON mapping. Field names are the documented result schema.

inline void to_json(nlohmann::json& j, const TrialReport& r) {
  j = {{"n", r.n},
       {"seed", r.seed},
       {"theta0_used", r.theta0_used},
       {"measured_period", r.measured_period},
       {"model_t0", r.model_t0},
       {"model_t_real", r.model_t_real},
       {"decimal_error", r.decimal_error},
       {"energy_drift", r.energy_drift},
       {"bob_periods", r.bob_periods},
       {"failed_bobs", r.failed_bobs}};
}

inline void from_json(const nlohmann::json& j, TrialReport& r) {
  j.at("n").get_to(r.n);
  j.at("seed").get_to(r.seed);
  j.at("theta0_used").get_to(r.theta0_used);
  j.at("measured_period").get_to(r.measured_period);
  j.at("model_t0").get_to(r.model_t0);
  j.at("model_t_real").get_to(r.model_t_real);
  j.at("decimal_error").get_to(r.decimal_error);
  j.at("energy_drift").get_to(r.energy_drift);
  j.at("bob_periods").get_to(r.bob_periods);
  j.at("failed_bobs").get_to(r.failed_bobs);
}

inline void to_json(nlohmann::json& j, const CampaignConfig& c) {
  j = {{"n_values", c.n_values}, {"trials", c.trials},     {"theta0", c.theta0},
       {"duration", c.duration}, {"frames", c.frames},     {"dt", c.dt},
       {"seed", c.seed},         {"output_dir", c.output_dir}, {"jobs", c.jobs},
       {"write_trajectories", c.write_trajectories}};
}

inline void from_json(const nlohmann::json& j, CampaignConfig& c) {
  j.at("n_values").get_to(c.n_values);
  j.at("trials").get_to(c.trials);
  j.at("theta0").get_to(c.theta0);
  j.at("duration").get_to(c.duration);
  j.at("frames").get_to(c.frames);
  j.at("dt").get_to(c.dt);
  j.at("seed").get_to(c.seed);
  j.at("output_dir").get_to(c.output_dir);
  j.at("jobs").get_to(c.jobs);
  j.at("write_trajectories").get_to(c.write_trajectories);
}

inline void to_json(nlohmann::json& j, const ModelRow& r) {
  j = {{"n", r.n}, {"t0", r.t0}, {"delta_t", r.delta_t}, {"t_low", r.t_low}, {"t_high", r.t_high}};
}

inline void from_json(const nlohmann::json& j, ModelRow& r) {
  j.at("n").get_to(r.n);
  j.at("t0").get_to(r.t0);
  j.at("delta_t").get_to(r.delta_t);
  j.at("t_low").get_to(r.t_low);
  j.at("t_high").get_to(r.t_high);
}

inline void to_json(nlohmann::json& j, const RunRecord& r) {
  j = {{"n", r.n},
       {"trial", r.trial},
       {"seed", r.seed},
       {"status", r.ok() ? "ok" : "failed"},
       {"error", r.error},
       {"report", r.ok() ? nlohmann::json(*r.report) : nlohmann::json(nullptr)}};
}

inline void from_json(const nlohmann::json& j, RunRecord& r) {
  j.at("n").get_to(r.n);
  j.at("trial").get_to(r.trial);
  j.at("seed").get_to(r.seed);
  j.at("error").get_to(r.error);
  if (j.at("report").is_null()) {
    r.report.reset();
  } else {
    r.report = j.at("report").get<TrialReport>();
  }
}

inline void to_json(nlohmann::json& j, const NSummary& s) {
  j = {{"n", s.n},
       {"mean_decimal_error", s.mean_decimal_error},
       {"sigma", s.sigma},
       {"successful_trials", s.successful_trials}};
}

inline void from_json(const nlohmann::json& j, NSummary& s) {
  j.at("n").get_to(s.n);
  j.at("mean_decimal_error").get_to(s.mean_decimal_error);
  j.at("sigma").get_to(s.sigma);
  j.at("successful_trials").get_to(s.successful_trials);
}

inline constexpr const char* kResultSchema = "pendlab.campaign.v1";

inline void to_json(nlohmann::json& j, const CampaignResult& r) {
  j = {{"schema", kResultSchema},
       {"config", r.config},
       {"model_table", r.model_table},
       {"runs", r.runs},
       {"summary", r.summary}};
}

inline void from_json(const nlohmann::json& j, CampaignResult& r) {
  if (j.value("schema", std::string{}) != kResultSchema) {
    throw ContractError("unsupported result schema");
  }
  j.at("config").get_to(r.config);
  j.at("model_table").get_to(r.model_table);
  j.at("runs").get_to(r.runs);
  j.at("summary").get_to(r.summary);
}

inline CampaignResult read_result_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in).get<CampaignResult>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed result document " + path.string() + ": " + e.what());
  }
}

inline std::vector<NSummary> summarize(const CampaignConfig& config,
                                       const std::vector<RunRecord>& runs) {
  std::vector<NSummary> out;
  for (std::size_t n : config.n_values) {
    NSummary s{n, 0.0, 0.0, 0};
    for (const auto& r : runs) {
      if (r.n == n && r.ok()) {
        s.mean_decimal_error += r.report->decimal_error;
        ++s.successful_trials;
      }
    }
    if (s.successful_trials > 0) {
      s.mean_decimal_error /= static_cast<double>(s.successful_trials);
      s.sigma = s.mean_decimal_error * std::sqrt(static_cast<double>(s.successful_trials));
    }
    out.push_back(s);
  }
  return out;
}

/**
 * Runs every (n, trial) cell, up to config.jobs at a time. A failed run is
 * recorded and the campaign continues; an I/O failure aborts. When
 * output_dir is set it receives summary.csv, model_table.csv, result.json
 * and (optionally) one trajectory CSV per successful run.
 */
inline CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  const IntegrationConfig integration = config.integration();
  const std::filesystem::path out_dir = config.output_dir;

  CampaignResult result;
  result.config = config;
  for (std::size_t n : config.n_values) {
    for (std::size_t t = 1; t <= config.trials; ++t) {
      result.runs.push_back({n, t, run_seed(config.seed, n, t), std::nullopt, {}});
    }
  }
  result.model_table = model_table(config.n_values, config.theta0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr io_failure;
  std::mutex io_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < result.runs.size(); k = next++) {
      RunRecord& run = result.runs[k];
      try {
        TrialRun tr = simulate_trial(run.n, config.theta0, run.seed, integration);
        if (!out_dir.empty() && config.write_trajectories) {
          emit_trajectory(tr.trajectory, out_dir / "trajectories" /
                                             trajectory_filename(run.n, run.trial));
        }
        run.report = std::move(tr.report);
      } catch (const IoError&) {
        std::lock_guard lock(io_mutex);
        if (!io_failure) io_failure = std::current_exception();
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const std::size_t workers = std::min(config.jobs, result.runs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (io_failure) std::rethrow_exception(io_failure);

  result.summary = summarize(config, result.runs);

  if (!out_dir.empty()) {
    write_summary_csv(result, out_dir / "summary.csv");
    write_model_table(result.model_table, out_dir / "model_table.csv");
    const auto json_path = out_dir / "result.json";
    std::ofstream js = open_output(json_path);
    js << nlohmann::json(result).dump(2) << '\n';
    finish_output(js, json_path);
  }
  return result;
}

}  // namespace pendlab
