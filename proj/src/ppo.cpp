#include "mlbs/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mlbs/instance_io.hpp"

namespace mlbs {

using nlohmann::json;

std::vector<double> rewards_to_go(const std::vector<double>& rewards, double gamma) {
  std::vector<double> rtg(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    rtg[i] = acc;
  }
  return rtg;
}

std::vector<double> advantages(const std::vector<double>& rtg,
                               const std::vector<double>& values) {
  if (rtg.size() != values.size()) {
    throw std::invalid_argument("advantages: length mismatch");
  }
  std::vector<double> adv(rtg.size());
  for (std::size_t i = 0; i < rtg.size(); ++i) adv[i] = rtg[i] - values[i];
  return adv;
}

double clip_objective(double ratio, double advantage, double eps) {
  const double g = advantage >= 0.0 ? (1.0 + eps) * advantage
                                    : (1.0 - eps) * advantage;
  return std::min(ratio * advantage, g);
}

void postprocess_trajectory(Trajectory& traj, const PolicyValueNet& net,
                            double gamma) {
  traj.rewards_to_go = rewards_to_go(traj.rewards, gamma);
  std::vector<double> values(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    values[i] = net.value(traj.states[i]);
  }
  traj.advantages = advantages(traj.rewards_to_go, values);
}

namespace {

struct FlatSample {
  const StateVector* state;
  const std::vector<std::uint8_t>* mask;
  int action;
  double behavior_prob;
  double rtg;
  double adv;
};

std::vector<FlatSample> flatten(const std::vector<Trajectory>& batch) {
  std::vector<FlatSample> out;
  for (const auto& traj : batch) {
    if (traj.rewards_to_go.size() != traj.size() ||
        traj.advantages.size() != traj.size()) {
      throw std::invalid_argument("update: trajectory not post-processed");
    }
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out.push_back({&traj.states[i], &traj.masks[i], traj.actions[i],
                     traj.behavior_probs[i], traj.rewards_to_go[i],
                     traj.advantages[i]});
    }
  }
  if (out.empty()) throw std::invalid_argument("update: empty batch");
  return out;
}

bool grads_finite(const PolicyValueNet& net, const PolicyValueNet::Grads& g) {
  for (const auto& [p, len] : net.grad_views(g)) {
    for (std::size_t i = 0; i < len; ++i) {
      if (!std::isfinite(p[i])) return false;
    }
  }
  return true;
}

}  // namespace

UpdateStats ppo_update(PolicyValueNet& net, AdamState& adam,
                       const std::vector<Trajectory>& batch,
                       const Hyperparams& hp) {
  auto samples = flatten(batch);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const PolicyValueNet backup = net;
  const AdamState adam_backup = adam;
  UpdateStats stats;

  if (hp.normalize_advantages) {
    double mean = 0.0;
    int n_act = 0;
    for (const auto& s : samples) {
      if (s.action >= 0) mean += s.adv, ++n_act;
    }
    if (n_act > 0) {
      mean /= n_act;
      double var = 0.0;
      for (const auto& s : samples) {
        if (s.action >= 0) var += (s.adv - mean) * (s.adv - mean);
      }
      const double sd = std::sqrt(var / n_act) + 1e-8;
      for (auto& s : samples) s.adv = (s.adv - mean) / sd;
    }
  }

  for (int epoch = 0; epoch < hp.epochs_per_batch; ++epoch) {
    auto grads = net.make_grads();
    double clip_sum = 0.0;
    double critic_sum = 0.0;
    for (const auto& s : samples) {
      const auto f = net.forward(*s.state);
      double dvalue = 2.0 * (f.value - s.rtg) * inv_n;  // d/dV of mean MSE
      critic_sum += (f.value - s.rtg) * (f.value - s.rtg);
      std::vector<double> dlogits(f.logits.size(), 0.0);
      if (s.action >= 0) {
        const auto probs = PolicyValueNet::masked_softmax(f.logits, *s.mask);
        const double p_new = probs[static_cast<std::size_t>(s.action)];
        const double ratio = p_new / s.behavior_prob;
        clip_sum += clip_objective(ratio, s.adv, hp.clip_eps);
        const double g = s.adv >= 0.0 ? (1.0 + hp.clip_eps) * s.adv
                                      : (1.0 - hp.clip_eps) * s.adv;
        if (ratio * s.adv <= g) {
          // Unclipped branch active; ascend, so descend the negative.
          const double coeff = -inv_n * s.adv * ratio;
          for (std::size_t j = 0; j < dlogits.size(); ++j) {
            if (!(*s.mask)[j]) continue;
            const double ind = static_cast<int>(j) == s.action ? 1.0 : 0.0;
            dlogits[j] = coeff * (ind - probs[j]);
          }
        }
      }
      net.backward(*s.state, f, dlogits, dvalue, &grads);
    }
    stats.mean_clip_objective = clip_sum * inv_n;
    stats.critic_loss = critic_sum * inv_n;
    if (!std::isfinite(stats.mean_clip_objective) ||
        !std::isfinite(stats.critic_loss) || !grads_finite(net, grads)) {
      net = backup;
      adam = adam_backup;
      stats.aborted = true;
      return stats;
    }
    adam_update(net, grads, adam, hp.learning_rate, hp.adam_eps);
    if (!net.all_finite()) {
      net = backup;
      adam = adam_backup;
      stats.aborted = true;
      return stats;
    }
  }
  return stats;
}

UpdateStats reinforce_update(PolicyValueNet& net, AdamState& adam,
                             const std::vector<Trajectory>& batch,
                             const Hyperparams& hp) {
  const auto samples = flatten(batch);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const PolicyValueNet backup = net;
  const AdamState adam_backup = adam;
  UpdateStats stats;

  auto grads = net.make_grads();
  double objective = 0.0;
  for (const auto& s : samples) {
    if (s.action < 0) continue;
    const auto f = net.forward(*s.state);
    const auto probs = PolicyValueNet::masked_softmax(f.logits, *s.mask);
    objective += std::log(probs[static_cast<std::size_t>(s.action)]) * s.rtg;
    std::vector<double> dlogits(f.logits.size(), 0.0);
    const double coeff = -inv_n * s.rtg;  // ascend log-prob * R
    for (std::size_t j = 0; j < dlogits.size(); ++j) {
      if (!(*s.mask)[j]) continue;
      const double ind = static_cast<int>(j) == s.action ? 1.0 : 0.0;
      dlogits[j] = coeff * (ind - probs[j]);
    }
    net.backward(*s.state, f, dlogits, 0.0, &grads);
  }
  stats.mean_clip_objective = objective * inv_n;
  if (!std::isfinite(stats.mean_clip_objective) || !grads_finite(net, grads)) {
    net = backup;
    adam = adam_backup;
    stats.aborted = true;
    return stats;
  }
  adam_update(net, grads, adam, hp.learning_rate, hp.adam_eps);
  if (!net.all_finite()) {
    net = backup;
    adam = adam_backup;
    stats.aborted = true;
  }
  return stats;
}

int sample_action(const PolicyValueNet& net, const StateVector& state,
                  const std::vector<std::uint8_t>& mask, std::mt19937_64& rng,
                  double* prob_out) {
  const auto f = net.forward(state);
  const auto probs = PolicyValueNet::masked_softmax(f.logits, mask);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  double acc = 0.0;
  int last_valid = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!mask[i]) continue;
    last_valid = static_cast<int>(i);
    acc += probs[i];
    if (r < acc) {
      if (prob_out) *prob_out = probs[i];
      return static_cast<int>(i);
    }
  }
  if (prob_out) *prob_out = probs[static_cast<std::size_t>(last_valid)];
  return last_valid;  // rounding residue lands on the last valid slot
}

int argmax_action(const PolicyValueNet& net, const StateVector& state,
                  const std::vector<std::uint8_t>& mask) {
  const auto f = net.forward(state);
  int best = -1;
  double best_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.logits.size(); ++i) {
    if (mask[i] && f.logits[i] > best_logit) {
      best_logit = f.logits[i];
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw std::logic_error("argmax_action: no valid slot");
  return best;
}

PolicyFn greedy_policy(const PolicyValueNet& net) {
  return [&net](const StateVector& s, const std::vector<std::uint8_t>& m) {
    return argmax_action(net, s, m);
  };
}

Trajectory collect_episode(Simulator& sim, const PolicyValueNet& net,
                           std::mt19937_64& rng) {
  Trajectory traj;
  while (!sim.done()) {
    traj.states.push_back(sim.observation().state);
    traj.masks.push_back(sim.observation().mask);
    StepOutcome out;
    if (sim.has_valid_action()) {
      double prob = 1.0;
      const int slot = sample_action(net, sim.observation().state,
                                     sim.observation().mask, rng, &prob);
      traj.actions.push_back(slot);
      traj.behavior_probs.push_back(prob);
      out = sim.step(slot);
    } else {
      traj.actions.push_back(-1);
      traj.behavior_probs.push_back(1.0);
      out = sim.skip_uncovered();
    }
    traj.rewards.push_back(out.reward);
    traj.dones.push_back(out.done ? 1 : 0);
  }
  return traj;
}

TrainResult train(const ProblemInstance& instance, const TrainConfig& cfg) {
  const CombinedTimetable combined = merge_timetables(instance);
  const int n_cps = static_cast<int>(instance.control_points.size());
  const int n_actions = cfg.sim.screening_enabled ? instance.target_set_capacity
                                                  : instance.fleet_size;
  const int dim = cfg.sim.screening_enabled
                      ? state_dimension(n_cps, instance.target_set_capacity)
                      : 5 * n_cps + 3 + 4 * instance.fleet_size;
  (void)combined;

  TrainResult result;
  result.net = PolicyValueNet(dim, n_actions, cfg.seed);
  AdamState adam = make_adam_state(result.net);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  // Track the lexicographically best (N_d, N_u, T_d) argmax policy seen during
  // training; sampled-policy reward does not always move in lockstep with the
  // greedy decode used at evaluation time.
  PolicyValueNet best = result.net;
  ObjectiveReport best_report;
  bool have_best = false;
  const auto maybe_checkpoint = [&]() {
    const EpisodeResult eval =
        run_episode(instance, greedy_policy(result.net), cfg.mode, cfg.sim);
    if (!have_best || eval.report.lex_less(best_report)) {
      best = result.net;
      best_report = eval.report;
      have_best = true;
    }
  };

  int episodes_done = 0;
  int since_eval = 0;
  while (episodes_done < cfg.episodes) {
    const int n = std::min(cfg.hp.episodes_per_iteration,
                           cfg.episodes - episodes_done);
    std::vector<Trajectory> batch;
    batch.reserve(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
      Simulator sim(instance, cfg.mode, cfg.sim);
      Trajectory traj = collect_episode(sim, result.net, rng);
      result.curve.push_back(traj.total_reward());
      postprocess_trajectory(traj, result.net, cfg.hp.gamma);
      batch.push_back(std::move(traj));
    }
    if (cfg.algo == Algo::Ppo) {
      ppo_update(result.net, adam, batch, cfg.hp);
    } else {
      reinforce_update(result.net, adam, batch, cfg.hp);
    }
    episodes_done += n;
    since_eval += n;
    if (cfg.eval_interval > 0 && since_eval >= cfg.eval_interval) {
      since_eval = 0;
      maybe_checkpoint();
    }
  }
  if (cfg.eval_interval > 0) {
    maybe_checkpoint();
    result.net = best;
  }
  return result;
}

namespace {

json tensor_json(const std::vector<double>& v) { return json(v); }

}  // namespace

void save_params(const PolicyValueNet& net, const std::string& path,
                 const std::string& config_hash) {
  json j;
  j["format"] = "mlbs-policy-v1";
  j["input_dim"] = net.input_dim();
  j["n_actions"] = net.n_actions();
  j["config_hash"] = config_hash;
  j["tensors"] = {{"w1", tensor_json(net.w1)}, {"b1", tensor_json(net.b1)},
                  {"w2", tensor_json(net.w2)}, {"b2", tensor_json(net.b2)},
                  {"w3", tensor_json(net.w3)}, {"b3", tensor_json(net.b3)},
                  {"wa", tensor_json(net.wa)}, {"ba", tensor_json(net.ba)},
                  {"wc", tensor_json(net.wc)}, {"bc", net.bc}};
  atomic_write_file(path, j.dump() + "\n");
}

LoadedParams load_params(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error("model file " + path + ": not valid JSON: " + e.what());
  }
  if (!j.contains("format") || j["format"] != "mlbs-policy-v1") {
    throw std::runtime_error("model file " + path + ": unknown format");
  }
  LoadedParams out;
  const int dim = j.at("input_dim").get<int>();
  const int na = j.at("n_actions").get<int>();
  out.net = PolicyValueNet(dim, na, 0);
  out.config_hash = j.value("config_hash", "");
  const json& t = j.at("tensors");
  auto load_tensor = [&](const char* name, std::vector<double>& dst) {
    const auto v = t.at(name).get<std::vector<double>>();
    if (v.size() != dst.size()) {
      throw std::runtime_error("model file " + path + ": tensor " + name +
                               " has " + std::to_string(v.size()) +
                               " values, expected " + std::to_string(dst.size()));
    }
    dst = v;
  };
  load_tensor("w1", out.net.w1);
  load_tensor("b1", out.net.b1);
  load_tensor("w2", out.net.w2);
  load_tensor("b2", out.net.b2);
  load_tensor("w3", out.net.w3);
  load_tensor("b3", out.net.b3);
  load_tensor("wa", out.net.wa);
  load_tensor("ba", out.net.ba);
  load_tensor("wc", out.net.wc);
  out.net.bc = t.at("bc").get<double>();
  return out;
}

PolicyValueNet load_params_checked(const std::string& path, int expect_input_dim,
                                   int expect_actions,
                                   const std::string& expect_hash,
                                   bool* hash_mismatch) {
  LoadedParams loaded = load_params(path);
  if (loaded.net.input_dim() != expect_input_dim ||
      loaded.net.n_actions() != expect_actions) {
    throw std::runtime_error(
        "model file " + path + ": shape (" +
        std::to_string(loaded.net.input_dim()) + "," +
        std::to_string(loaded.net.n_actions()) + ") does not match instance (" +
        std::to_string(expect_input_dim) + "," + std::to_string(expect_actions) + ")");
  }
  const bool mismatch = !expect_hash.empty() && loaded.config_hash != expect_hash;
  if (hash_mismatch) *hash_mismatch = mismatch;
  return std::move(loaded.net);
}

std::string config_hash(const ProblemInstance& instance, const Hyperparams& hp,
                        const RewardWeights& w, Mode mode) {
  std::ostringstream ss;
  ss << instance.control_points.size() << "|" << instance.lines.size() << "|"
     << instance.total_departures() << "|" << instance.fleet_size << "|"
     << instance.target_set_capacity << "|" << instance.r_min << "|"
     << hp.clip_eps << "|" << hp.gamma << "|" << hp.learning_rate << "|"
     << hp.adam_eps << "|" << w.w1_final << "|" << w.w2_final << "|"
     << w.w1_step << "|" << w.w2_step << "|" << w.w3_step << "|" << w.w4_step
     << "|" << (mode == Mode::Offline ? "offline" : "online");
  std::uint64_t h = 1469598103934665603ull;
  for (char c : ss.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

}  // namespace mlbs
