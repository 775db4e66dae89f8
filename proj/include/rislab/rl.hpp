#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "rislab/env.hpp"
#include "rislab/nn.hpp"
#include "rislab/types.hpp"

namespace rislab::rl {

// Cosine decay over match count m: a*cos(m pi / 2c) + b for m <= c, 0 after.
struct EpsilonSchedule {
    double a = 0.9;
    double b = 0.1;
    int c = 100;

    double at(int m) const;
};

struct EpsilonPolicy {
    bool decaying = true;
    double fixed_eps = 0.1;
    EpsilonSchedule schedule;

    double at(int episode) const {
        return decaying ? schedule.at(episode) : fixed_eps;
    }
};

enum class AgentKind { q_table, dqn, ddqn, d3qn };

struct AgentConfig {
    AgentKind kind = AgentKind::d3qn;
    double learning_rate = 0.01;
    double discount = 0.7;
    int target_sync = 100;       // learner steps between hard target copies
    int batch_size = 32;
    std::size_t buffer_capacity = 100000;
    int warmup = 500;            // transitions before learning starts
    std::vector<Eigen::Index> hidden = {128, 128};
    EpsilonPolicy eps;
};

struct Transition {
    RVec s;
    std::size_t a = 0;
    double r = 0.0;
    RVec s2;
};

class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition t);
    std::size_t size() const { return store_.size(); }

    // Uniform without replacement within the batch.
    std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const;

  private:
    std::size_t capacity_;
    std::deque<Transition> store_;
};

// Greedy with probability 1-eps (ties to lowest index); otherwise uniform
// over the remaining |A|-1 actions.
std::size_t select_action(const RVec& q_values, double eps, std::mt19937_64& rng);

// Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a'))
double q_table_update(double q, double r, double max_next, double alpha, double gamma);

double dqn_target(double r, double gamma, const RVec& target_q_next);

// Online network picks the argmax, target network values it.
double ddqn_target(double r, double gamma, const RVec& online_q_next,
                   const RVec& target_q_next);

// Sparse tabular Q over a discretized state key.
class QTable {
  public:
    QTable(std::size_t num_actions, const env::SceneConfig& scene)
        : num_actions_(num_actions), target_step_db_(scene.target_step_db) {}

    std::string key(const env::EnvState& s) const;
    RVec values(const std::string& k) const;
    void update(const std::string& k, std::size_t a, double r, double max_next,
                double alpha, double gamma);
    std::size_t size() const { return table_.size(); }

  private:
    std::size_t num_actions_;
    double target_step_db_;
    std::unordered_map<std::string, std::vector<double>> table_;
};

struct EpisodeRow {
    int episode = 0;
    double cumulative_reward = 0.0;
    double mean_ee = 0.0;
    double epsilon = 0.0;
    double loss_mean = 0.0;
    std::size_t violations = 0;
};

struct TrainLog {
    std::vector<EpisodeRow> rows;
    nn::QNetworkParams final_params; // empty for q_table agents
};

// Runs the episodic training loop; fully deterministic for a fixed seed.
TrainLog train(env::Env& environment, const AgentConfig& cfg, int episodes,
               int steps_per_episode, std::uint64_t seed);

// Mean EE of a greedy (or random, eps=1) rollout of a trained network.
double evaluate_policy(env::Env& environment, const nn::QNetworkParams& params,
                       int episodes, int steps_per_episode, std::uint64_t seed,
                       double eps = 0.0);

void write_log_csv(const TrainLog& log, const std::string& path);

}  // namespace rislab::rl
