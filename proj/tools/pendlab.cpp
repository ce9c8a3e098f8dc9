// pendlab: simulate N-link pendulum chains and compare measured pseudo-periods
// against the linearized period model.
//
//   pendlab campaign    --n 5 --n 10 --trials 3 --theta0-deg 45 --seed 7 --out runs/
//   pendlab phase-space --n 3 --theta0-deg 45 --bob 3 --out trace.csv
//   pendlab model-table --n 5 --n 10 --theta0-deg 45 --out model.csv
//
// Every flag can also be set through PENDLAB_<FLAG> (e.g. PENDLAB_SEED).
// Exit codes: 0 success, 2 some campaign runs failed, 1 hard failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "pendlab/pendlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHard = 1;
constexpr int kExitPartial = 2;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct SimFlags {
  double theta0_deg = 45.0;
  double duration = 10.0;
  std::size_t frames = 1000;
  double dt = 1e-3;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--theta0-deg", f.theta0_deg, "Initial amplitude of every link [deg]")
      ->envname("PENDLAB_THETA0_DEG")
      ->capture_default_str();
  cmd->add_option("--duration", f.duration, "Simulated time [s]")
      ->envname("PENDLAB_DURATION")
      ->capture_default_str();
  cmd->add_option("--frames", f.frames, "Recorded frame intervals over the run")
      ->envname("PENDLAB_FRAMES")
      ->capture_default_str();
  cmd->add_option("--dt", f.dt, "Integration step [s]")
      ->envname("PENDLAB_DT")
      ->capture_default_str();
}

void print_report(const pendlab::CampaignResult& result) {
  std::cout << "model table (theta0 = " << result.config.theta0 << " rad)\n";
  for (const auto& row : result.model_table) {
    std::cout << "  N=" << row.n << "  T0=" << pendlab::format_real(row.t0)
              << "  dT=" << pendlab::format_real(row.delta_t) << '\n';
  }
  std::cout << "runs\n";
  for (const auto& run : result.runs) {
    std::cout << "  N=" << run.n << " trial " << run.trial << ": ";
    if (run.ok()) {
      std::cout << "theta0=" << run.report->theta0_used
                << " measured=" << run.report->measured_period
                << " model=" << run.report->model_t_real
                << " decimal_error=" << run.report->decimal_error << '\n';
    } else {
      std::cout << "FAILED: " << run.error << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-link pendulum chain simulator and pseudo-period lab"};
  app.require_subcommand(1);

  // campaign
  pendlab::CampaignConfig campaign;
  SimFlags campaign_sim;
  bool no_trajectories = false;
  auto* cmd_campaign = app.add_subcommand("campaign", "Run trials over several chain sizes");
  cmd_campaign->add_option("--n", campaign.n_values, "Chain size (repeatable)")
      ->envname("PENDLAB_N")
      ->delimiter(',')
      ->capture_default_str();
  cmd_campaign->add_option("--trials", campaign.trials, "Trials per chain size")
      ->envname("PENDLAB_TRIALS")
      ->capture_default_str();
  add_sim_flags(cmd_campaign, campaign_sim);
  cmd_campaign->add_option("--seed", campaign.seed, "Campaign seed")
      ->envname("PENDLAB_SEED")
      ->capture_default_str();
  cmd_campaign->add_option("--out", campaign.output_dir, "Output directory")
      ->envname("PENDLAB_OUT")
      ->required();
  cmd_campaign->add_option("--jobs", campaign.jobs, "Concurrent runs")
      ->envname("PENDLAB_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_campaign->add_flag("--no-trajectories", no_trajectories,
                         "Skip the per-run trajectory CSVs");

  // phase-space
  std::size_t ps_n = 3;
  std::size_t ps_bob = 0;
  std::string ps_out;
  SimFlags ps_sim;
  auto* cmd_ps = app.add_subcommand("phase-space", "Emit the Cartesian trace of one bob");
  cmd_ps->add_option("--n", ps_n, "Chain size")->envname("PENDLAB_N")->capture_default_str();
  cmd_ps->add_option("--bob", ps_bob, "Bob index, 1-based (default: last bob)")
      ->envname("PENDLAB_BOB");
  add_sim_flags(cmd_ps, ps_sim);
  cmd_ps->add_option("--out", ps_out, "Output CSV")->envname("PENDLAB_OUT")->required();

  // model-table
  std::vector<std::size_t> mt_n{5, 10, 20, 100};
  double mt_theta0_deg = 45.0;
  std::string mt_out;
  auto* cmd_mt = app.add_subcommand("model-table", "Emit ideal and corrected model periods");
  cmd_mt->add_option("--n", mt_n, "Chain size (repeatable)")
      ->envname("PENDLAB_N")
      ->delimiter(',')
      ->capture_default_str();
  cmd_mt->add_option("--theta0-deg", mt_theta0_deg, "Amplitude for the correction [deg]")
      ->envname("PENDLAB_THETA0_DEG")
      ->capture_default_str();
  cmd_mt->add_option("--out", mt_out, "Output CSV")->envname("PENDLAB_OUT")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitHard;
  }

  try {
    if (*cmd_campaign) {
      campaign.theta0 = deg_to_rad(campaign_sim.theta0_deg);
      campaign.duration = campaign_sim.duration;
      campaign.frames = campaign_sim.frames;
      campaign.dt = campaign_sim.dt;
      campaign.write_trajectories = !no_trajectories;
      const auto result = pendlab::run_campaign(campaign);
      print_report(result);
      std::cout << "wrote " << campaign.output_dir << "/{summary.csv,model_table.csv,result.json}\n";
      return result.failed_runs() > 0 ? kExitPartial : kExitOk;
    }
    if (*cmd_ps) {
      const auto chain = pendlab::PendulumChain::uniform(ps_n);
      const auto config =
          pendlab::IntegrationConfig::for_frames(ps_sim.duration, ps_sim.frames, ps_sim.dt);
      const auto traj = pendlab::integrate(
          chain, pendlab::ChainState::released(ps_n, deg_to_rad(ps_sim.theta0_deg)), config);
      const std::size_t bob = ps_bob == 0 ? ps_n : ps_bob;
      pendlab::emit_phase_space(chain, traj, bob, ps_out);
      std::cout << "wrote " << traj.samples.size() << " samples of bob " << bob << " to "
                << ps_out << " (energy drift " << traj.energy_drift << ")\n";
      return kExitOk;
    }
    if (*cmd_mt) {
      const auto rows = pendlab::emit_model_table(mt_n, deg_to_rad(mt_theta0_deg), mt_out);
      std::cout << "wrote " << rows.size() << " rows to " << mt_out << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "pendlab: " << e.what() << '\n';
    return kExitHard;
  }
  return kExitHard;
}
