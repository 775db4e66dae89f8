#include "rislab/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rislab::rl {

double EpsilonSchedule::at(int m) const {
    if (m < 0) throw std::domain_error("EpsilonSchedule: negative match count");
    if (m > c) return 0.0;
    if (m == c) return b; // cos(pi/2) is not exactly zero in floating point
    return a * std::cos(static_cast<double>(m) * std::numbers::pi /
                        (2.0 * static_cast<double>(c))) +
           b;
}

void ReplayBuffer::push(Transition t) {
    store_.push_back(std::move(t));
    if (store_.size() > capacity_) store_.pop_front();
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n,
                                                    std::mt19937_64& rng) const {
    if (store_.empty()) throw std::domain_error("ReplayBuffer::sample: empty buffer");
    n = std::min(n, store_.size());
    // Partial Fisher-Yates over an index vector.
    std::vector<std::size_t> idx(store_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
        out.push_back(&store_[idx[i]]);
    }
    return out;
}

std::size_t select_action(const RVec& q_values, double eps, std::mt19937_64& rng) {
    if (q_values.size() == 0)
        throw std::domain_error("select_action: empty q-value vector");
    Eigen::Index best = 0;
    q_values.maxCoeff(&best);
    const auto n = static_cast<std::size_t>(q_values.size());
    if (n == 1) return 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= eps) return static_cast<std::size_t>(best);
    // Uniform over the remaining |A|-1 actions.
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    std::size_t other = pick(rng);
    if (other >= static_cast<std::size_t>(best)) ++other;
    return other;
}

double q_table_update(double q, double r, double max_next, double alpha, double gamma) {
    return (1.0 - alpha) * q + alpha * (r + gamma * max_next);
}

double dqn_target(double r, double gamma, const RVec& target_q_next) {
    return r + gamma * target_q_next.maxCoeff();
}

double ddqn_target(double r, double gamma, const RVec& online_q_next,
                   const RVec& target_q_next) {
    if (online_q_next.size() != target_q_next.size())
        throw DimensionError("ddqn_target: q-vector length mismatch");
    Eigen::Index best = 0;
    online_q_next.maxCoeff(&best);
    return r + gamma * target_q_next(best);
}

std::string QTable::key(const env::EnvState& s) const {
    // Phases to pi/10 bins, positions to 1 m grid, targets to dB steps.
    std::ostringstream os;
    for (double th : s.theta)
        os << static_cast<long>(std::lround(th / (std::numbers::pi / 10.0))) << ',';
    os << static_cast<long>(std::lround(s.ris_pos.x)) << ','
       << static_cast<long>(std::lround(s.ris_pos.y)) << ','
       << static_cast<long>(std::lround(s.ris_pos.z)) << ';';
    for (const auto& p : s.user_pos)
        os << static_cast<long>(std::lround(p.x)) << ','
           << static_cast<long>(std::lround(p.y)) << ',';
    os << ';';
    for (double c : s.user_ctrl)
        os << static_cast<long>(std::lround(10.0 * std::log10(c > 0 ? c : 1e-300) /
                                            target_step_db_))
           << ',';
    return os.str();
}

RVec QTable::values(const std::string& k) const {
    const auto it = table_.find(k);
    if (it == table_.end())
        return RVec::Zero(static_cast<Eigen::Index>(num_actions_));
    RVec v(static_cast<Eigen::Index>(num_actions_));
    for (std::size_t i = 0; i < num_actions_; ++i)
        v(static_cast<Eigen::Index>(i)) = it->second[i];
    return v;
}

void QTable::update(const std::string& k, std::size_t a, double r, double max_next,
                    double alpha, double gamma) {
    auto& row = table_.try_emplace(k, std::vector<double>(num_actions_, 0.0))
                    .first->second;
    row[a] = q_table_update(row[a], r, max_next, alpha, gamma);
}

TrainLog train(env::Env& environment, const AgentConfig& cfg, int episodes,
               int steps_per_episode, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrainLog log;
    if (episodes <= 0) return log;

    const auto num_actions = environment.num_actions();
    const bool tabular = cfg.kind == AgentKind::q_table;

    QTable table(num_actions, environment.config());
    nn::QNetworkParams online, target;
    if (!tabular) {
        std::vector<Eigen::Index> sizes;
        sizes.push_back(
            static_cast<Eigen::Index>(environment.config().n_elements +
                                      2 * environment.config().n_users + 3));
        for (auto hsz : cfg.hidden) sizes.push_back(hsz);
        sizes.push_back(static_cast<Eigen::Index>(num_actions));
        online = nn::init_params(sizes, rng);
        target = online;
    }
    ReplayBuffer buffer(cfg.buffer_capacity);
    long learner_steps = 0;

    for (int ep = 0; ep < episodes; ++ep) {
        const double eps = cfg.eps.at(ep);
        environment.reset(rng());
        const std::size_t violations_before = environment.violation_count();

        double cumulative_reward = 0.0;
        double ee_sum = 0.0;
        double loss_sum = 0.0;
        long loss_count = 0;

        RVec s_enc = environment.encode_state();
        std::string s_key = tabular ? table.key(environment.state()) : std::string();

        for (int t = 0; t < steps_per_episode; ++t) {
            const RVec q = tabular ? table.values(s_key) : nn::forward(online, s_enc);
            const std::size_t a = select_action(q, eps, rng);
            const auto res = environment.step(a);
            cumulative_reward += res.reward;
            ee_sum += environment.current_ee();

            const RVec s2_enc = environment.encode_state();
            if (tabular) {
                const std::string s2_key = table.key(environment.state());
                const double max_next = table.values(s2_key).maxCoeff();
                table.update(s_key, a, res.reward, max_next, cfg.learning_rate,
                             cfg.discount);
                s_key = s2_key;
            } else {
                buffer.push({s_enc, a, res.reward, s2_enc});
                if (buffer.size() >= static_cast<std::size_t>(cfg.warmup)) {
                    const auto batch =
                        buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
                    std::vector<nn::TrainSample> samples;
                    samples.reserve(batch.size());
                    for (const auto* tr : batch) {
                        double y = 0.0;
                        if (cfg.kind == AgentKind::dqn) {
                            y = dqn_target(tr->r, cfg.discount,
                                           nn::forward(target, tr->s2));
                        } else {
                            y = ddqn_target(tr->r, cfg.discount,
                                            nn::forward(online, tr->s2),
                                            nn::forward(target, tr->s2));
                        }
                        samples.push_back(
                            {tr->s, static_cast<Eigen::Index>(tr->a), y});
                    }
                    auto [loss, grad] = nn::loss_and_gradient(online, samples);
                    if (!std::isfinite(loss))
                        throw std::runtime_error(
                            "train: loss diverged to NaN/inf; lower the learning "
                            "rate or increase the warmup");
                    nn::apply_update(online, grad, cfg.learning_rate);
                    loss_sum += loss;
                    ++loss_count;
                    if (++learner_steps % cfg.target_sync == 0) target = online;
                }
            }
            s_enc = s2_enc;
        }

        EpisodeRow row;
        row.episode = ep;
        row.cumulative_reward = cumulative_reward;
        row.mean_ee = ee_sum / static_cast<double>(steps_per_episode);
        row.epsilon = eps;
        row.loss_mean = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        row.violations = environment.violation_count() - violations_before;
        log.rows.push_back(row);
    }
    if (!tabular) log.final_params = online;
    return log;
}

double evaluate_policy(env::Env& environment, const nn::QNetworkParams& params,
                       int episodes, int steps_per_episode, std::uint64_t seed,
                       double eps) {
    std::mt19937_64 rng(seed);
    double ee_sum = 0.0;
    long count = 0;
    const bool random_policy = params.weights.empty();
    for (int ep = 0; ep < episodes; ++ep) {
        environment.reset(rng());
        for (int t = 0; t < steps_per_episode; ++t) {
            std::size_t a;
            if (random_policy) {
                std::uniform_int_distribution<std::size_t> pick(
                    0, environment.num_actions() - 1);
                a = pick(rng);
            } else {
                a = select_action(nn::forward(params, environment.encode_state()), eps,
                                  rng);
            }
            environment.step(a);
            ee_sum += environment.current_ee();
            ++count;
        }
    }
    return ee_sum / static_cast<double>(count);
}

void write_log_csv(const TrainLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_log_csv: cannot open " + path);
    out << "episode,cumulative_reward,mean_ee,epsilon,loss_mean,violations\n";
    char buf[256];
    for (const auto& r : log.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%zu\n", r.episode,
                      r.cumulative_reward, r.mean_ee, r.epsilon, r.loss_mean,
                      r.violations);
        out << buf;
    }
}

}  // namespace rislab::rl
