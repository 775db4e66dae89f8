#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rislab/config.hpp"
#include "rislab/env.hpp"
#include "rislab/rl.hpp"

namespace rislab::harness {

enum class Sweep { none, transmit_power, n_elements };

struct ExperimentSpec {
    env::SceneConfig scene;
    rl::AgentConfig agent;
    Sweep sweep = Sweep::none;
    std::vector<double> grid;           // watts or element counts
    std::vector<std::uint64_t> seeds = {1};
    std::vector<std::string> variants;  // see run_experiment
    std::string out_dir = ".";
    int episodes = 300;
    int steps = 50;
    int realizations = 10;              // fading draws per static evaluation
    double eval_power = dbm_to_watts(16.0); // budget when not sweeping power
};

struct ResultRow {
    std::string variant;
    double grid_value = 0.0;
    std::uint64_t seed = 0;
    double mean_ee = 0.0;
    double mean_mos = 0.0;   // per-user average
    double mean_power = 0.0; // total consumed, W
};

// Mean metrics of one physical-layer evaluation at a fixed transmit budget.
struct PhysEval {
    double sum_mos = 0.0;
    double total_power = 0.0;
    double ee = 0.0;
};

// Superposition beams rescaled to spend exactly p_tx.
PhysEval eval_ph_at_power(const env::Env& e, const env::EnvState& s, double p_tx);
// One ZF beam per cluster, equal power split inside each cluster.
PhysEval eval_zf_at_power(const env::Env& e, const env::EnvState& s, double p_tx);
// Time sharing: each user gets the full cluster budget half the time.
PhysEval eval_oma_at_power(const env::Env& e, const env::EnvState& s, double p_tx);

struct RolloutStats {
    double mean_ee = 0.0;
    double mean_mos = 0.0;
    double mean_power = 0.0;
};

// Greedy rollout of a trained network; empty params = uniform random actions.
RolloutStats policy_rollout(env::Env& e, const nn::QNetworkParams& params,
                            int episodes, int steps, std::uint64_t seed);

// Random phase-tweak walk; used to compare decoding-order policies on
// identical trajectories.
RolloutStats random_phase_rollout(env::Env& e, int episodes, int steps,
                                  std::uint64_t seed);

// Supported variants:
//   noma_ph, noma_zf, oma                     (fixed-budget sweeps)
//   learned, barycenter_deploy, random_deploy, no_ris   (deployment)
//   dynamic_order, fixed_order                (decoding-order comparison)
//   d3qn, ddqn, dqn, q_table                  (agent comparison)
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Arithmetic mean over seeds for each (variant, grid_value); seed = 0.
std::vector<ResultRow> summarize(const std::vector<ResultRow>& rows);

ExperimentSpec make_preset(const std::string& name); // fig4 .. fig7
ExperimentSpec spec_from(const config::KvFile& kv);

}  // namespace rislab::harness
