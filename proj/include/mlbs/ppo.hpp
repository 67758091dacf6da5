#pragma once

#include <random>
#include <string>

#include "mlbs/net.hpp"
#include "mlbs/sim.hpp"

namespace mlbs {

struct Hyperparams {
  double clip_eps = 0.1;
  double gamma = 0.99;
  double learning_rate = 1e-5;
  double adam_eps = 1e-5;
  int epochs_per_batch = 40;
  int episodes_per_iteration = 4;
  bool normalize_advantages = true;  // per-batch zero-mean unit-variance
};

std::vector<double> rewards_to_go(const std::vector<double>& rewards, double gamma);
std::vector<double> advantages(const std::vector<double>& rtg,
                               const std::vector<double>& values);

// min(ratio * A, g(eps, A)) with g = (1+eps)A for A >= 0, (1-eps)A otherwise.
double clip_objective(double ratio, double advantage, double eps);

struct UpdateStats {
  double mean_clip_objective = 0.0;
  double critic_loss = 0.0;
  bool aborted = false;  // non-finite loss/gradient; parameters rolled back
};

// Fills rewards_to_go and advantages on each trajectory.
void postprocess_trajectory(Trajectory& traj, const PolicyValueNet& net,
                            double gamma);

UpdateStats ppo_update(PolicyValueNet& net, AdamState& adam,
                       const std::vector<Trajectory>& batch,
                       const Hyperparams& hp);

// REINFORCE ablation: plain policy gradient weighted by rewards-to-go,
// no clip, critic untouched.
UpdateStats reinforce_update(PolicyValueNet& net, AdamState& adam,
                             const std::vector<Trajectory>& batch,
                             const Hyperparams& hp);

enum class Algo { Ppo, Reinforce };

struct TrainConfig {
  Mode mode = Mode::Offline;
  Algo algo = Algo::Ppo;
  Hyperparams hp;
  SimOptions sim;
  int episodes = 1000;
  std::uint64_t seed = 0;
  // Argmax-evaluate every this many episodes and keep the lexicographically
  // best (N_d, N_u, T_d) parameters; 0 disables checkpointing.
  int eval_interval = 50;
};

struct TrainResult {
  PolicyValueNet net;
  std::vector<double> curve;  // accumulated reward per training episode
};

TrainResult train(const ProblemInstance& instance, const TrainConfig& cfg);

// Sampled action (training) with the probability actually used.
int sample_action(const PolicyValueNet& net, const StateVector& state,
                  const std::vector<std::uint8_t>& mask, std::mt19937_64& rng,
                  double* prob_out);
// Greedy argmax over valid slots (evaluation).
int argmax_action(const PolicyValueNet& net, const StateVector& state,
                  const std::vector<std::uint8_t>& mask);

PolicyFn greedy_policy(const PolicyValueNet& net);

// Collects one episode with stochastic action sampling.
Trajectory collect_episode(Simulator& sim, const PolicyValueNet& net,
                           std::mt19937_64& rng);

// Model files: JSON tensor container with shapes, N_s, state dimension and a
// config hash. Round-trips are bit-exact for finite doubles.
void save_params(const PolicyValueNet& net, const std::string& path,
                 const std::string& config_hash);
struct LoadedParams {
  PolicyValueNet net;
  std::string config_hash;
};
LoadedParams load_params(const std::string& path);
// As above, but rejects dimension mismatches; hash mismatch only warns.
PolicyValueNet load_params_checked(const std::string& path, int expect_input_dim,
                                   int expect_actions,
                                   const std::string& expect_hash,
                                   bool* hash_mismatch = nullptr);

std::string config_hash(const ProblemInstance& instance, const Hyperparams& hp,
                        const RewardWeights& w, Mode mode);

}  // namespace mlbs
