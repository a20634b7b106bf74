// cellfree: scenario simulation, DRL beamforming training runs, and the
// complexity/timing reports, from one binary.
//
//   cellfree run --scenario small --algo d4pg --seed 7 --out results/
//   cellfree flops --M 70 --K 20
//   cellfree timing --sweep 15:150:15 --out timing.csv
//   cellfree dist-demo --port 44217 --agents 3 --rounds 2

#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cellfree/dist.hpp"
#include "cellfree/harness.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free uplink beamforming simulator and DRL trainer"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "train/evaluate beamformers and emit metrics");
  std::string preset = "small";
  std::string config_path;
  std::string algos = "conjugate,mmse,ddpg,d4pg,dist";
  std::string seeds = "1";
  std::string out_dir = "out";
  std::string csi = "fixed-block";
  std::string activation = "sigmoid";
  cellfree::ExperimentConfig cfg;
  run->add_option("--scenario", preset, "small | medium | large | custom");
  run->add_option("--config", config_path, "scenario config file (key=value), implies custom");
  run->add_option("--algo", algos, "comma list: conjugate,mmse,grad-ascent,ddpg,d4pg,dist");
  run->add_option("--seed", seeds, "comma list of seeds");
  run->add_option("--episodes", cfg.episodes, "training episodes");
  run->add_option("--steps", cfg.steps_per_episode, "steps per episode");
  run->add_option("--batch", cfg.batch, "minibatch size");
  run->add_option("--sigma", cfg.noise_sigma, "exploration noise std");
  run->add_option("--sigma-final", cfg.noise_sigma_final, "terminal exploration noise std");
  run->add_option("--mix-sigma", cfg.noise_mix_sigma, "wide-probe noise std (annealed)");
  run->add_option("--mix-prob", cfg.noise_mix_prob, "initial wide-probe probability");
  run->add_option("--lr-actor", cfg.lr_actor, "actor learning rate");
  run->add_option("--lr-critic", cfg.lr_critic, "critic learning rate");
  run->add_option("--actor-delay", cfg.actor_delay, "steps before policy updates begin");
  run->add_option("--hidden", cfg.hidden, "hidden layer sizes")->expected(-1);
  run->add_option("--dist-hidden", cfg.dist_hidden, "hidden sizes for per-eAP agents")
      ->expected(-1);
  run->add_option("--csi", csi, "fixed-block | per-episode");
  run->add_option("--penalty", cfg.lambda_penalty, "infeasible-action penalty");
  run->add_option("--activation", activation, "flat-softmax | column-softmax | sigmoid");
  run->add_option("--actors", cfg.actors, "D4PG actor count (0 = one per eAP)");
  run->add_option("--nstep", cfg.nstep, "D4PG N-step return length");
  run->add_option("--atoms", cfg.atoms, "D4PG distributional atoms");
  run->add_option("--vmin", cfg.v_min, "D4PG support lower edge");
  run->add_option("--vmax", cfg.v_max, "D4PG support upper edge");
  run->add_option("--t-target", cfg.t_target, "D4PG target-copy period");
  run->add_option("--t-actors", cfg.t_actors, "D4PG actor-replication period");
  run->add_option("--rounds", cfg.episodes, "dist: coordinator rounds (alias of --episodes)");
  run->add_option("--ga-iters", cfg.ga_iters, "grad-ascent iterations");
  run->add_option("--ga-lr", cfg.ga_lr, "grad-ascent learning rate");
  bool free_running = false;
  run->add_flag("--free-running", free_running,
                "threaded actors/agents (disables determinism mode)");
  run->add_option("--out", out_dir, "output directory");

  // --- flops -------------------------------------------------------------
  auto* flops = app.add_subcommand("flops", "inference FLOP counts per scheme");
  int fM = 15, fK = 5;
  std::vector<int> fhidden = {256, 128};
  flops->add_option("--M", fM, "eAP count")->required();
  flops->add_option("--K", fK, "UE count")->required();
  flops->add_option("--hidden", fhidden, "hidden layer sizes")->expected(-1);

  // --- timing ------------------------------------------------------------
  auto* timing = app.add_subcommand("timing", "inference vs gradient-ascent runtime sweep");
  std::string sweep = "15:150:15";
  std::string timing_out = "timing.csv";
  cellfree::TimingOptions topt;
  timing->add_option("--sweep", sweep, "M sweep begin:end:step");
  timing->add_option("--reps", topt.inference_reps, "inference repetitions");
  timing->add_option("--ga-iters", topt.ga_iters, "gradient-ascent iterations");
  timing->add_option("--out", timing_out, "output CSV path");

  // --- dist-demo ---------------------------------------------------------
  auto* demo = app.add_subcommand("dist-demo",
                                  "coordinator + scripted agents over loopback sockets");
  int port = 47823, agents = 3, rounds = 2;
  demo->add_option("--port", port, "loopback TCP port");
  demo->add_option("--agents", agents, "agent count");
  demo->add_option("--rounds", rounds, "protocol rounds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cfg.preset = config_path.empty() ? preset : "custom";
      if (!config_path.empty()) cfg.scenario = cellfree::load_scenario_config(config_path);
      cfg.algos = split_csv(algos);
      cfg.seeds.clear();
      for (const std::string& s : split_csv(seeds)) cfg.seeds.push_back(std::stoull(s));
      cfg.csi = csi == "per-episode" ? cellfree::CsiMode::kPerEpisode
                                     : cellfree::CsiMode::kFixedBlock;
      cfg.deterministic = !free_running;
      if (activation == "column-softmax") {
        cfg.action_act = cellfree::OutputActivation::kColumnSoftmax;
      } else if (activation == "flat-softmax") {
        cfg.action_act = cellfree::OutputActivation::kFlatSoftmax;
      } else {
        cfg.action_act = cellfree::OutputActivation::kSigmoid;
      }
      cfg.out_dir = out_dir;
      const cellfree::ExperimentOutcome outcome = cellfree::run_experiment(cfg);
      for (const auto& [algo, runs] : outcome.per_algo) {
        for (const auto& r : runs) {
          std::cout << algo << " seed=" << r.seed << " final=" << r.final_reward
                    << " normalized=" << r.normalized << '\n';
        }
      }
      std::cout << "summary: " << outcome.summary_path << '\n';
    } else if (*flops) {
      using cellfree::FlopsScheme;
      const auto cen = cellfree::flops_report(fM, fK, fhidden, FlopsScheme::kCentralized);
      const auto dexp =
          cellfree::flops_report(fM, fK, fhidden, FlopsScheme::kDistributedExperience);
      const auto dl = cellfree::flops_report(fM, fK, fhidden, FlopsScheme::kDistributedLearning);
      std::cout << "model,flops,formula\n";
      std::cout << "centralized-ddpg," << cen.drl_flops << "," << cen.formula << '\n';
      std::cout << "distributed-experience-d4pg," << dexp.drl_flops << "," << dexp.formula
                << '\n';
      std::cout << "distributed-learning," << dl.drl_flops << "," << dl.formula << '\n';
      std::cout << "mmse,O((M*K)^2)=" << cen.mmse_order << ",\n";
    } else if (*timing) {
      if (sscanf(sweep.c_str(), "%d:%d:%d", &topt.m_begin, &topt.m_end, &topt.m_step) != 3) {
        std::cerr << "bad --sweep, expected begin:end:step\n";
        return 1;
      }
      const auto rows = cellfree::timing_report(topt);
      cellfree::write_timing_csv(rows, timing_out);
      for (const auto& r : rows) {
        std::cout << "M=" << r.M << " K=" << r.K << " inference=" << r.t_inference_s
                  << "s grad-ascent=" << r.t_gradascent_s << "s\n";
      }
      std::cout << "wrote " << timing_out << '\n';
    } else if (*demo) {
      std::thread server([&]() {
        const cellfree::Mat W =
            cellfree::socket_transport::serve_coordinator(port, agents, rounds);
        std::cout << "coordinator done, final W is " << W.rows << "x" << W.cols << '\n';
      });
      std::vector<std::thread> pool;
      for (int m = 0; m < agents; ++m) {
        pool.emplace_back([&, m]() {
          std::vector<double> row(4, 0.25 * (m + 1));
          cellfree::socket_transport::run_scripted_agent(port, m, rounds, row);
        });
      }
      for (auto& th : pool) th.join();
      server.join();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
