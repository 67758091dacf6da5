#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mlbs/baselines.hpp"
#include "mlbs/gantt.hpp"
#include "mlbs/generator.hpp"
#include "mlbs/instance_io.hpp"
#include "mlbs/online.hpp"
#include "mlbs/ppo.hpp"

namespace {

using namespace mlbs;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string report_table(const std::string& label, const ObjectiveReport& r) {
  std::ostringstream ss;
  ss << "approach  N_u  T_d  N_d\n";
  ss << label << "  " << r.n_used << "  " << r.deadhead_total << "  "
     << r.n_uncovered << "\n";
  return ss.str();
}

std::string report_csv(const std::string& label, const ObjectiveReport& r) {
  std::ostringstream ss;
  ss << "approach,n_used,deadhead_total,n_uncovered\n";
  ss << label << "," << r.n_used << "," << r.deadhead_total << ","
     << r.n_uncovered << "\n";
  return ss.str();
}

std::string curve_csv(const std::vector<double>& curve) {
  std::ostringstream ss;
  ss << "episode,accumulated_reward\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ss << (i + 1) << "," << format_double(curve[i]) << "\n";
  }
  return ss.str();
}

std::string default_output_dir() {
  if (const char* env = std::getenv("MLBS_OUTPUT_DIR")) return env;
  return ".";
}

TrainConfig make_train_config(const ProblemInstance& instance, int episodes,
                              std::uint64_t seed, const std::string& algo,
                              const std::string& reward_mode,
                              bool screening_on) {
  (void)instance;
  TrainConfig cfg;
  cfg.mode = Mode::Offline;
  cfg.algo = algo == "reinforce" ? Algo::Reinforce : Algo::Ppo;
  cfg.episodes = episodes;
  cfg.seed = seed;
  cfg.sim.screening_enabled = screening_on;
  cfg.sim.final_reward_only = reward_mode == "final_only";
  return cfg;
}

ObjectiveReport eval_net(const ProblemInstance& instance,
                         const PolicyValueNet& net, bool apply_overrides,
                         Schedule* out_schedule) {
  SimOptions opts;
  opts.apply_overrides = apply_overrides;
  const EpisodeResult res =
      run_episode(instance, greedy_policy(net), Mode::Offline, opts);
  if (out_schedule) *out_schedule = res.schedule;
  return res.report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-line bus scheduling toolkit"};
  app.require_subcommand(1);

  try {
    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    GeneratorConfig gen_cfg;
    std::string gen_out = "instance.json";
    gen->add_option("--out", gen_out, "output instance path");
    gen->add_option("--seed", gen_cfg.seed);
    gen->add_option("--lines", gen_cfg.n_line_pairs, "number of line pairs");
    gen->add_option("--deletion", gen_cfg.deletion_fraction);
    gen->add_option("--headway-min", gen_cfg.headway_min);
    gen->add_option("--headway-max", gen_cfg.headway_max);
    gen->add_option("--travel-min", gen_cfg.travel_min);
    gen->add_option("--travel-max", gen_cfg.travel_max);
    gen->add_option("--deadhead-min", gen_cfg.deadhead_min);
    gen->add_option("--deadhead-max", gen_cfg.deadhead_max);
    gen->add_option("--r-min", gen_cfg.r_min);
    gen->add_option("--ns", gen_cfg.target_set_capacity, "target bus set capacity");
    gen->add_option("--day-start", gen_cfg.day_start);
    gen->add_option("--day-span", gen_cfg.day_span);
    gen->add_option("--fleet-margin", gen_cfg.fleet_margin);

    // ---- derive ----
    auto* derive = app.add_subcommand("derive", "delete departures from a base instance");
    std::string derive_in, derive_out = "derived.json";
    double derive_fraction = 0.3;
    std::uint64_t derive_seed = 0;
    derive->add_option("--instance", derive_in)->required();
    derive->add_option("--out", derive_out);
    derive->add_option("--fraction", derive_fraction);
    derive->add_option("--seed", derive_seed);

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train the offline policy");
    std::string train_instance, train_out = "model.json", train_curve;
    std::string train_algo = "ppo", train_reward_mode = "combined";
    bool train_screening_off = false;
    int train_episodes = 1000;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--instance", train_instance)->required();
    train_cmd->add_option("--out", train_out, "model output path");
    train_cmd->add_option("--curve", train_curve, "learning-curve CSV path");
    train_cmd->add_option("--episodes", train_episodes);
    train_cmd->add_option("--seed", train_seed);
    train_cmd->add_option("--algo", train_algo)
        ->check(CLI::IsMember({"ppo", "reinforce"}));
    train_cmd->add_option("--reward-mode", train_reward_mode)
        ->check(CLI::IsMember({"combined", "final_only"}));
    train_cmd->add_flag("--no-screening", train_screening_off,
                        "disable the bus priority screening mechanism");
    int train_epochs = -1, train_batch = -1;
    train_cmd->add_option("--epochs", train_epochs, "gradient epochs per batch");
    train_cmd->add_option("--batch-episodes", train_batch, "episodes per update batch");

    // ---- train-online ----
    auto* online_cmd = app.add_subcommand("train-online", "train the online policy");
    std::string to_instance, to_offline, to_out = "online_model.json", to_curve;
    int to_episodes = 500;
    std::uint64_t to_seed = 0;
    int to_window = 60;
    online_cmd->add_option("--instance", to_instance)->required();
    online_cmd->add_option("--offline-model", to_offline)->required();
    online_cmd->add_option("--out", to_out);
    online_cmd->add_option("--curve", to_curve);
    online_cmd->add_option("--episodes", to_episodes);
    online_cmd->add_option("--seed", to_seed);
    online_cmd->add_option("--window", to_window, "deadhead lookahead minutes");

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "run a policy or baseline offline");
    std::string eval_instance, eval_algo = "greedy", eval_model, eval_export,
        eval_csv;
    int eval_lns_iterations = 200;
    double eval_lns_destroy = 0.3;
    std::uint64_t eval_seed = 0;
    bool eval_overrides = false;
    eval_cmd->add_option("--instance", eval_instance)->required();
    eval_cmd->add_option("--algo", eval_algo)
        ->check(CLI::IsMember({"ppo", "reinforce", "greedy", "lns"}));
    eval_cmd->add_option("--model", eval_model, "model path for ppo/reinforce");
    eval_cmd->add_option("--export", eval_export, "schedule JSON output path");
    eval_cmd->add_option("--csv", eval_csv, "objective CSV output path");
    eval_cmd->add_option("--lns-iterations", eval_lns_iterations);
    eval_cmd->add_option("--lns-destroy", eval_lns_destroy);
    eval_cmd->add_option("--seed", eval_seed);
    eval_cmd->add_flag("--apply-overrides", eval_overrides);

    // ---- simulate-online ----
    auto* sim_cmd = app.add_subcommand("simulate-online",
                                       "run the online controller on a disruption scenario");
    std::string so_instance, so_online, so_offline, so_scenario, so_csv, so_export;
    int so_window = 60;
    sim_cmd->add_option("--instance", so_instance)->required();
    sim_cmd->add_option("--online-model", so_online)->required();
    sim_cmd->add_option("--offline-model", so_offline)->required();
    sim_cmd->add_option("--scenario", so_scenario,
                        "JSON file with a travel-time override list");
    sim_cmd->add_option("--window", so_window);
    sim_cmd->add_option("--csv", so_csv);
    sim_cmd->add_option("--export", so_export, "adjusted schedule JSON path");

    // ---- ablate ----
    auto* ablate_cmd = app.add_subcommand("ablate", "run ablation arms");
    std::string ab_instance, ab_arms = "reward", ab_outdir = default_output_dir();
    int ab_episodes = 1000;
    std::vector<std::uint64_t> ab_seeds = {0};
    ablate_cmd->add_option("--instance", ab_instance)->required();
    ablate_cmd->add_option("--arms", ab_arms)
        ->check(CLI::IsMember({"reward", "screening"}));
    ablate_cmd->add_option("--episodes", ab_episodes);
    ablate_cmd->add_option("--seeds", ab_seeds)->delimiter(',');
    ablate_cmd->add_option("--outdir", ab_outdir);

    // ---- plot ----
    auto* plot_cmd = app.add_subcommand("plot", "render a schedule as SVG");
    std::string plot_instance, plot_schedule, plot_out = "schedule.svg";
    plot_cmd->add_option("--instance", plot_instance)->required();
    plot_cmd->add_option("--schedule", plot_schedule)->required();
    plot_cmd->add_option("--out", plot_out);

    // ---- validate ----
    auto* val_cmd = app.add_subcommand("validate", "check a schedule file");
    std::string val_instance, val_schedule;
    val_cmd->add_option("--instance", val_instance)->required();
    val_cmd->add_option("--schedule", val_schedule)->required();

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
      const ProblemInstance inst = generate_instance(gen_cfg);
      save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << " (" << inst.total_departures()
                << " departures, fleet " << inst.fleet_size << ")\n";
      return 0;
    }

    if (derive->parsed()) {
      const ProblemInstance base = load_instance(derive_in);
      const ProblemInstance derived =
          derive_instance(base, derive_fraction, derive_seed);
      save_instance(derived, derive_out);
      std::cout << "wrote " << derive_out << " (" << derived.total_departures()
                << " departures)\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      const ProblemInstance inst = load_instance(train_instance);
      TrainConfig cfg =
          make_train_config(inst, train_episodes, train_seed, train_algo,
                            train_reward_mode, !train_screening_off);
      if (train_epochs > 0) cfg.hp.epochs_per_batch = train_epochs;
      if (train_batch > 0) cfg.hp.episodes_per_iteration = train_batch;
      const TrainResult result = train(inst, cfg);
      save_params(result.net, train_out,
                  config_hash(inst, cfg.hp, cfg.sim.weights, cfg.mode));
      if (!train_curve.empty()) atomic_write_file(train_curve, curve_csv(result.curve));
      const ObjectiveReport report = eval_net(inst, result.net, false, nullptr);
      std::cout << report_table(train_algo, report);
      return 0;
    }

    if (online_cmd->parsed()) {
      const ProblemInstance inst = load_instance(to_instance);
      const int dim = state_dimension(static_cast<int>(inst.control_points.size()),
                                      inst.target_set_capacity);
      const PolicyValueNet offline = load_params_checked(
          to_offline, dim, inst.target_set_capacity, "");
      OnlineTrainConfig cfg;
      cfg.episodes = to_episodes;
      cfg.seed = to_seed;
      cfg.window.window_minutes = to_window;
      const TrainResult result = train_online(inst, offline, cfg);
      save_params(result.net, to_out,
                  config_hash(inst, cfg.hp, cfg.sim.weights, Mode::Online));
      if (!to_curve.empty()) atomic_write_file(to_curve, curve_csv(result.curve));
      std::cout << "wrote " << to_out << "\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      const ProblemInstance inst = load_instance(eval_instance);
      Schedule schedule;
      if (eval_algo == "greedy") {
        schedule = greedy_schedule(inst);
      } else if (eval_algo == "lns") {
        LnsConfig cfg;
        cfg.iterations = eval_lns_iterations;
        cfg.destroy_fraction = eval_lns_destroy;
        cfg.seed = eval_seed;
        schedule = lns_improve(inst, greedy_schedule(inst), cfg);
      } else {
        if (eval_model.empty()) {
          std::cerr << "error: --model is required for --algo " << eval_algo << "\n";
          return 2;
        }
        const int dim = state_dimension(
            static_cast<int>(inst.control_points.size()), inst.target_set_capacity);
        bool mismatch = false;
        const PolicyValueNet net = load_params_checked(
            eval_model, dim, inst.target_set_capacity, "", &mismatch);
        eval_net(inst, net, eval_overrides, &schedule);
      }
      const ObjectiveReport report = compute_objectives(inst, schedule);
      if (!eval_export.empty()) save_schedule(inst, schedule, eval_export);
      if (!eval_csv.empty()) atomic_write_file(eval_csv, report_csv(eval_algo, report));
      std::cout << report_table(eval_algo, report);
      return 0;
    }

    if (sim_cmd->parsed()) {
      ProblemInstance inst = load_instance(so_instance);
      if (!so_scenario.empty()) {
        for (const auto& ov : load_overrides(so_scenario)) {
          inst.overrides.push_back(ov);
        }
      }
      const int dim = state_dimension(static_cast<int>(inst.control_points.size()),
                                      inst.target_set_capacity);
      const PolicyValueNet online_net =
          load_params_checked(so_online, dim, inst.target_set_capacity, "");
      const PolicyValueNet offline_net =
          load_params_checked(so_offline, dim, inst.target_set_capacity, "");
      TimeWindowConfig window{so_window};
      SimOptions opts;
      opts.apply_overrides = true;
      const OnlineRunResult adjusted =
          run_online(inst, online_net, offline_net, window, opts);
      ProblemInstance undisrupted = inst;
      undisrupted.overrides.clear();
      const OnlineRunResult original =
          run_online(undisrupted, online_net, offline_net, window, SimOptions{});
      std::ostringstream csv;
      csv << "scheme,n_used,deadhead_total,n_uncovered\n";
      csv << "original," << original.report.n_used << ","
          << original.report.deadhead_total << "," << original.report.n_uncovered
          << "\n";
      csv << "adjusted," << adjusted.report.n_used << ","
          << adjusted.report.deadhead_total << "," << adjusted.report.n_uncovered
          << "\n";
      if (!so_csv.empty()) atomic_write_file(so_csv, csv.str());
      if (!so_export.empty()) save_schedule(inst, adjusted.schedule, so_export);
      std::cout << csv.str();
      return 0;
    }

    if (ablate_cmd->parsed()) {
      const ProblemInstance inst = load_instance(ab_instance);
      std::filesystem::create_directories(ab_outdir);
      if (ab_arms == "reward") {
        for (const auto seed : ab_seeds) {
          for (const std::string arm : {"combined", "final_only"}) {
            const TrainConfig cfg =
                make_train_config(inst, ab_episodes, seed, "ppo", arm, true);
            const TrainResult result = train(inst, cfg);
            const std::string base =
                ab_outdir + "/reward_" + arm + "_seed" + std::to_string(seed);
            atomic_write_file(base + "_curve.csv", curve_csv(result.curve));
            const ObjectiveReport report = eval_net(inst, result.net, false, nullptr);
            atomic_write_file(base + "_objectives.csv", report_csv(arm, report));
            std::cout << arm << " seed " << seed << ": " << report.n_used << " "
                      << report.deadhead_total << " " << report.n_uncovered << "\n";
          }
        }
      } else {
        std::ostringstream csv;
        csv << "arm,state_dim,action_dim,seconds_per_episode\n";
        for (const bool screening_on : {true, false}) {
          const TrainConfig cfg = make_train_config(inst, ab_episodes, ab_seeds[0],
                                                    "ppo", "combined", screening_on);
          const auto t0 = std::chrono::steady_clock::now();
          const TrainResult result = train(inst, cfg);
          const auto t1 = std::chrono::steady_clock::now();
          const double secs =
              std::chrono::duration<double>(t1 - t0).count() / ab_episodes;
          csv << (screening_on ? "screening_on" : "screening_off") << ","
              << result.net.input_dim() << "," << result.net.n_actions() << ","
              << format_double(secs) << "\n";
        }
        atomic_write_file(ab_outdir + "/screening_ablation.csv", csv.str());
        std::cout << csv.str();
      }
      return 0;
    }

    if (plot_cmd->parsed()) {
      const ProblemInstance inst = load_instance(plot_instance);
      const Schedule schedule = load_schedule(plot_schedule);
      render_gantt_file(schedule, inst, plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }

    if (val_cmd->parsed()) {
      const ProblemInstance inst = load_instance(val_instance);
      const Schedule schedule = load_schedule(val_schedule);
      const auto violations = validate_schedule(inst, schedule);
      const ObjectiveReport report = compute_objectives(inst, schedule);
      std::cout << report_table("schedule", report);
      for (const auto& v : violations) {
        std::cout << "violation (constraint " << v.constraint << ", bus "
                  << v.bus_id << "): " << v.detail << "\n";
      }
      if (!violations.empty()) {
        std::cout << violations.size() << " violation(s)\n";
        return 1;
      }
      std::cout << "schedule is feasible\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
