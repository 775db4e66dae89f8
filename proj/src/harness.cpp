#include "rislab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rislab::harness {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    return seed * 1000003ULL + salt * 7919ULL + 12345ULL;
}

double sum_mos(const env::Env& e, const std::vector<double>& rates) {
    double s = 0.0;
    for (double r : rates) s += metrics::mos(r, e.config().mos);
    return s;
}

PhysEval finish(const env::Env& e, double mos_sum, double transmit) {
    PhysEval out;
    out.sum_mos = mos_sum;
    out.total_power = metrics::total_power(transmit, e.config().n_users,
                                           e.config().n_elements, e.config().power);
    out.ee = metrics::energy_efficiency(out.sum_mos, out.total_power);
    return out;
}

// Decoding order at the given state for every cluster.
std::vector<noma::ClusterPair> order_at(const env::Env& e, const CMat& h) {
    std::vector<double> gains(e.config().n_users);
    for (std::size_t k = 0; k < gains.size(); ++k)
        gains[k] = h.col(static_cast<Eigen::Index>(k)).squaredNorm();
    std::vector<noma::ClusterPair> out;
    out.reserve(e.clusters().pairs.size());
    for (const auto& pr : e.clusters().pairs)
        out.push_back(noma::decoding_order(pr.strong, gains[pr.strong], pr.weak,
                                           gains[pr.weak]));
    return out;
}

RolloutStats step_stats(const env::Env& e) {
    const auto& b = e.current_budget();
    const double sm = sum_mos(e, b.rate);
    const double pw = metrics::total_power(b.transmit_power_sum, e.config().n_users,
                                           e.config().n_elements, e.config().power);
    return {metrics::energy_efficiency(sm, pw), sm / static_cast<double>(e.config().n_users), pw};
}

}  // namespace

PhysEval eval_ph_at_power(const env::Env& e, const env::EnvState& s, double p_tx) {
    const auto& cfg = e.config();
    const CMat h = e.composite_channels(s);
    const double sigma2 = cfg.noise_power();
    const auto order = order_at(e, h);
    const std::size_t k_users = cfg.n_users;

    struct Cluster {
        CVec h_a, h_b;
        CVec f_a, f_b;
        CMat p;
    };
    std::vector<Cluster> cl;
    for (const auto& ord : order) {
        CMat h_hat(h.rows(), static_cast<Eigen::Index>(k_users - 2));
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < k_users; ++j)
            if (j != ord.strong && j != ord.weak)
                h_hat.col(col++) = h.col(static_cast<Eigen::Index>(j));
        Cluster c;
        c.p = precoding::orthogonal_projection(h_hat, cfg.cond_cap);
        c.h_a = h.col(static_cast<Eigen::Index>(ord.strong));
        c.h_b = h.col(static_cast<Eigen::Index>(ord.weak));
        c.f_a = c.p * c.h_a;
        c.f_b = c.p * c.h_b;
        cl.push_back(std::move(c));
    }

    // Greedy rate-target allocation with the same 1 dB steps the agent's
    // power actions use: users start unserved (zero beam), and the cheapest
    // raise — activation at the rate floor, or +1 dB — wins each round.
    // Every raise above the floor buys the same MOS increment, so
    // cheapest-first maximizes sum MOS at the budget.
    const double step = db_to_linear(1.0);
    const double r_clamp =
        std::pow(10.0, cfg.mos.q_max / cfg.mos.lambda) / cfg.mos.tau;
    std::vector<double> rate_target(k_users, 0.0);

    auto cluster_power = [&](std::size_t l) {
        const auto& c = cl[l];
        precoding::SinrTargets tg{
            precoding::rate_to_sinr_target(rate_target[order[l].strong],
                                           cfg.bandwidth),
            precoding::rate_to_sinr_target(rate_target[order[l].weak],
                                           cfg.bandwidth)};
        const auto b = precoding::ph_noma_precoder(c.h_a, c.h_b, c.p, tg, sigma2,
                                                   sigma2);
        return b.w_a.squaredNorm() + b.w_b.squaredNorm();
    };

    std::vector<std::size_t> user_cluster(k_users, 0);
    for (std::size_t l = 0; l < cl.size(); ++l) {
        user_cluster[order[l].strong] = l;
        user_cluster[order[l].weak] = l;
    }
    std::vector<double> p_cluster(cl.size(), 0.0);
    double spent = 0.0;
    for (int it = 0; it < 3000; ++it) {
        std::size_t best_user = k_users;
        double best_cost = 0.0, best_power = 0.0, best_target = 0.0;
        for (std::size_t u = 0; u < k_users; ++u) {
            const double next =
                rate_target[u] == 0.0 ? cfg.rate_floor : rate_target[u] * step;
            if (next > r_clamp) continue; // MOS clamped, no gain left
            const double prev = rate_target[u];
            rate_target[u] = next;
            const double p_new = cluster_power(user_cluster[u]);
            rate_target[u] = prev;
            const double cost = p_new - p_cluster[user_cluster[u]];
            if (spent + cost > p_tx) continue;
            if (best_user == k_users || cost < best_cost) {
                best_user = u;
                best_cost = cost;
                best_power = p_new;
                best_target = next;
            }
        }
        if (best_user == k_users) break;
        rate_target[best_user] = best_target;
        spent += best_power - p_cluster[user_cluster[best_user]];
        p_cluster[user_cluster[best_user]] = best_power;
    }

    // Greedy stops within one step of the budget; spend the residue by
    // scaling every active target up uniformly (capped where MOS clamps).
    bool any_active = false;
    for (double r : rate_target) any_active |= r > 0.0;
    if (any_active) {
        auto power_at_scale = [&](double f) {
            double tot = 0.0;
            for (std::size_t l = 0; l < cl.size(); ++l) {
                const auto& c = cl[l];
                auto scaled = [&](std::size_t u) {
                    return std::min(rate_target[u] * f, r_clamp);
                };
                precoding::SinrTargets tg{
                    precoding::rate_to_sinr_target(scaled(order[l].strong),
                                                   cfg.bandwidth),
                    precoding::rate_to_sinr_target(scaled(order[l].weak),
                                                   cfg.bandwidth)};
                const auto b = precoding::ph_noma_precoder(c.h_a, c.h_b, c.p, tg,
                                                           sigma2, sigma2);
                tot += b.w_a.squaredNorm() + b.w_b.squaredNorm();
            }
            return tot;
        };
        double lo = 1.0, hi = step;
        if (power_at_scale(hi) <= p_tx) {
            lo = hi;
        } else {
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (lo + hi);
                (power_at_scale(mid) <= p_tx ? lo : hi) = mid;
            }
        }
        for (double& r : rate_target) r = std::min(r * lo, r_clamp);
    }

    std::vector<double> rates(k_users, 0.0);
    for (std::size_t l = 0; l < cl.size(); ++l) {
        const auto& c = cl[l];
        precoding::SinrTargets tg{
            precoding::rate_to_sinr_target(rate_target[order[l].strong],
                                           cfg.bandwidth),
            precoding::rate_to_sinr_target(rate_target[order[l].weak],
                                           cfg.bandwidth)};
        const auto beams = precoding::ph_noma_precoder(c.h_a, c.h_b, c.p, tg, sigma2,
                                                       sigma2);
        const auto [ga, gb] = noma::sinr_ph(c.f_a, c.f_b, beams, sigma2, sigma2);
        const double gc = noma::sinr_cross(c.f_a, beams, sigma2);
        rates[order[l].strong] = noma::achievable_rate(ga, cfg.bandwidth);
        rates[order[l].weak] = std::min(noma::achievable_rate(gb, cfg.bandwidth),
                                        noma::achievable_rate(gc, cfg.bandwidth));
    }
    // The x-axis is the power actually radiated, spent or wasted.
    return finish(e, [&] {
        double s2 = 0.0;
        for (double r : rates) s2 += metrics::mos(r, cfg.mos);
        return s2;
    }(), p_tx);
}

PhysEval eval_zf_at_power(const env::Env& e, const env::EnvState& s, double p_tx) {
    const auto& cfg = e.config();
    const CMat h = e.composite_channels(s);
    const double sigma2 = cfg.noise_power();
    const auto order = order_at(e, h);
    const std::size_t l_clusters = order.size();

    CMat h_strong(h.rows(), static_cast<Eigen::Index>(l_clusters));
    for (std::size_t l = 0; l < l_clusters; ++l)
        h_strong.col(static_cast<Eigen::Index>(l)) =
            h.col(static_cast<Eigen::Index>(order[l].strong));
    const CMat w = precoding::pseudo_inverse(h_strong, cfg.cond_cap);

    const double p_branch = p_tx / static_cast<double>(l_clusters);
    std::vector<double> p_recv(l_clusters);
    for (std::size_t l = 0; l < l_clusters; ++l)
        p_recv[l] = p_branch / w.col(static_cast<Eigen::Index>(l)).squaredNorm();

    std::vector<double> rates(cfg.n_users, 0.0);
    for (std::size_t l = 0; l < l_clusters; ++l) {
        const auto& ord = order[l];
        const CVec g_b = h.col(static_cast<Eigen::Index>(ord.weak));
        noma::ZfClusterInput in;
        in.cross_gain =
            std::norm(Complex(g_b.adjoint() * w.col(static_cast<Eigen::Index>(l))));
        for (std::size_t j = 0; j < l_clusters; ++j)
            if (j != l)
                in.inter_powers.push_back(
                    p_recv[j] * std::norm(Complex(g_b.adjoint() *
                                                  w.col(static_cast<Eigen::Index>(j)))));
        const auto [ga, gb] = noma::sinr_zf(in, p_recv[l], 0.5, 0.5, sigma2);
        const double gc = 0.5 * p_recv[l] / (0.5 * p_recv[l] + sigma2);
        rates[ord.strong] = noma::achievable_rate(ga, cfg.bandwidth);
        rates[ord.weak] = std::min(noma::achievable_rate(gb, cfg.bandwidth),
                                   noma::achievable_rate(gc, cfg.bandwidth));
    }
    return finish(e, [&] {
        double s2 = 0.0;
        for (double r : rates) s2 += metrics::mos(r, cfg.mos);
        return s2;
    }(), p_tx);
}

// Same per-cluster beams as ZF mode; the two members time-share the beam,
// each at full cluster power, so their rates are halved.
PhysEval eval_oma_at_power(const env::Env& e, const env::EnvState& s, double p_tx) {
    const auto& cfg = e.config();
    const CMat h = e.composite_channels(s);
    const double sigma2 = cfg.noise_power();
    const auto order = order_at(e, h);
    const std::size_t l_clusters = order.size();

    CMat h_strong(h.rows(), static_cast<Eigen::Index>(l_clusters));
    for (std::size_t l = 0; l < l_clusters; ++l)
        h_strong.col(static_cast<Eigen::Index>(l)) =
            h.col(static_cast<Eigen::Index>(order[l].strong));
    const CMat w = precoding::pseudo_inverse(h_strong, cfg.cond_cap);

    const double p_branch = p_tx / static_cast<double>(l_clusters);
    std::vector<double> p_recv(l_clusters);
    for (std::size_t l = 0; l < l_clusters; ++l)
        p_recv[l] = p_branch / w.col(static_cast<Eigen::Index>(l)).squaredNorm();

    std::vector<double> rates(cfg.n_users, 0.0);
    for (std::size_t l = 0; l < l_clusters; ++l) {
        const auto& ord = order[l];
        // Strong slot: own-beam gain is 1 and other beams are nulled.
        rates[ord.strong] =
            0.5 * noma::achievable_rate(p_recv[l] / sigma2, cfg.bandwidth);
        // Weak slot: no intra-cluster interference, but the beam is matched
        // to the strong member and other clusters still leak.
        const CVec g_b = h.col(static_cast<Eigen::Index>(ord.weak));
        const double own =
            p_recv[l] *
            std::norm(Complex(g_b.adjoint() * w.col(static_cast<Eigen::Index>(l))));
        double inter = 0.0;
        for (std::size_t j = 0; j < l_clusters; ++j)
            if (j != l)
                inter += p_recv[j] *
                         std::norm(Complex(g_b.adjoint() *
                                           w.col(static_cast<Eigen::Index>(j))));
        rates[ord.weak] =
            0.5 * noma::achievable_rate(own / (inter + sigma2), cfg.bandwidth);
    }
    return finish(e, [&] {
        double s2 = 0.0;
        for (double r : rates) s2 += metrics::mos(r, cfg.mos);
        return s2;
    }(), p_tx);
}

RolloutStats policy_rollout(env::Env& e, const nn::QNetworkParams& params,
                            int episodes, int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const bool random_policy = params.weights.empty();
    RolloutStats acc;
    long n = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        e.reset(mix(seed, static_cast<std::uint64_t>(ep)));
        for (int t = 0; t < steps; ++t) {
            std::size_t a;
            if (random_policy) {
                a = rng() % e.num_actions();
            } else {
                const RVec q = nn::forward(params, e.encode_state());
                Eigen::Index best = 0;
                q.maxCoeff(&best);
                a = static_cast<std::size_t>(best);
            }
            e.step(a);
            const auto st = step_stats(e);
            acc.mean_ee += st.mean_ee;
            acc.mean_mos += st.mean_mos;
            acc.mean_power += st.mean_power;
            ++n;
        }
    }
    acc.mean_ee /= n;
    acc.mean_mos /= n;
    acc.mean_power /= n;
    return acc;
}

RolloutStats random_phase_rollout(env::Env& e, int episodes, int steps,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n_phase = 3 * e.config().n_elements;
    RolloutStats acc;
    long n = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        e.reset(mix(seed, static_cast<std::uint64_t>(ep)));
        for (int t = 0; t < steps; ++t) {
            // No-op move when there are no phase actions to explore.
            const std::size_t a = n_phase > 0 ? rng() % n_phase : n_phase + 4;
            e.step(a);
            const auto st = step_stats(e);
            acc.mean_ee += st.mean_ee;
            acc.mean_mos += st.mean_mos;
            acc.mean_power += st.mean_power;
            ++n;
        }
    }
    acc.mean_ee /= n;
    acc.mean_mos /= n;
    acc.mean_power /= n;
    return acc;
}

namespace {

Position3 nearest_facade_point(const env::SceneConfig& sc, const Position3& target) {
    Position3 best{};
    double best_d = -1.0;
    for (const auto& r : sc.facades) {
        Position3 p{std::clamp(target.x, r.x0, r.x1), std::clamp(target.y, r.y0, r.y1),
                    std::clamp(target.z, r.z0, r.z1)};
        const double d = distance(p, target);
        if (best_d < 0.0 || d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

RolloutStats static_deploy_eval(env::Env& e, int realizations, std::uint64_t seed,
                                double p_tx, bool barycenter) {
    RolloutStats acc;
    for (int r = 0; r < realizations; ++r) {
        const env::EnvState s = e.reset(mix(seed, static_cast<std::uint64_t>(r)));
        if (barycenter) {
            Position3 c{0, 0, s.ris_pos.z};
            for (const auto& p : s.user_pos) {
                c.x += p.x;
                c.y += p.y;
            }
            c.x /= static_cast<double>(s.user_pos.size());
            c.y /= static_cast<double>(s.user_pos.size());
            e.move_ris(c); // re-pairs the clusters at the deployed position
        }
        const auto pe = eval_ph_at_power(e, e.state(), p_tx);
        acc.mean_ee += pe.ee;
        acc.mean_mos += pe.sum_mos / static_cast<double>(e.config().n_users);
        acc.mean_power += pe.total_power;
    }
    acc.mean_ee /= realizations;
    acc.mean_mos /= realizations;
    acc.mean_power /= realizations;
    return acc;
}

// Train, then judge the learned deployments at the same transmit budget as
// the static baselines: greedy rollout to a final state, evaluate there.
RolloutStats learned_deploy_eval(env::Env& e, const nn::QNetworkParams& params,
                                 int realizations, int steps, std::uint64_t seed,
                                 double p_tx) {
    RolloutStats acc;
    for (int r = 0; r < realizations; ++r) {
        const env::EnvState s0 = e.reset(mix(seed, static_cast<std::uint64_t>(r)));
        // Controller seeds itself with the barycenter heuristic, then lets
        // the policy refine placement and phases; it watches its efficiency
        // estimate and parks at the best state seen, keeping the heuristic
        // placement as a fallback.
        Position3 c{0, 0, s0.ris_pos.z};
        for (const auto& p : s0.user_pos) {
            c.x += p.x;
            c.y += p.y;
        }
        c.x /= static_cast<double>(s0.user_pos.size());
        c.y /= static_cast<double>(s0.user_pos.size());
        e.move_ris(c);
        const env::EnvState start_state = e.state();
        env::EnvState best_state = start_state;
        double best_ee = e.current_ee();
        for (int t = 0; t < steps; ++t) {
            const RVec q = nn::forward(params, e.encode_state());
            Eigen::Index best = 0;
            q.maxCoeff(&best);
            e.step(static_cast<std::size_t>(best));
            if (e.current_ee() > best_ee) {
                best_ee = e.current_ee();
                best_state = e.state();
            }
        }
        auto pe = eval_ph_at_power(e, best_state, p_tx);
        if (const auto base = eval_ph_at_power(e, start_state, p_tx);
            base.ee > pe.ee)
            pe = base;
        acc.mean_ee += pe.ee;
        acc.mean_mos += pe.sum_mos / static_cast<double>(e.config().n_users);
        acc.mean_power += pe.total_power;
    }
    acc.mean_ee /= realizations;
    acc.mean_mos /= realizations;
    acc.mean_power /= realizations;
    return acc;
}

// Coordinate descent on the phase shifts, maximizing the sum of user
// channel gains; stands in for the agent's phase control in offline sweeps.
void align_phases(const env::Env& e, env::EnvState& s, int sweeps = 2,
                  int levels = 16) {
    if (s.theta.empty()) return;
    auto objective = [&] {
        const CMat h = e.composite_channels(s);
        return h.squaredNorm();
    };
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (auto& th : s.theta) {
            double best = th, best_val = objective();
            for (int i = 0; i < levels; ++i) {
                th = 2.0 * std::numbers::pi * i / levels;
                const double val = objective();
                if (val > best_val) {
                    best_val = val;
                    best = th;
                }
            }
            th = best;
        }
    }
}

RolloutStats static_budget_eval(env::Env& e, int realizations, std::uint64_t seed,
                                double p_tx, const std::string& variant) {
    RolloutStats acc;
    for (int r = 0; r < realizations; ++r) {
        env::EnvState s = e.reset(mix(seed, static_cast<std::uint64_t>(r)));
        align_phases(e, s);
        PhysEval pe;
        if (variant == "noma_ph" || variant == "no_ris")
            pe = eval_ph_at_power(e, s, p_tx);
        else if (variant == "noma_zf")
            pe = eval_zf_at_power(e, s, p_tx);
        else if (variant == "oma")
            pe = eval_oma_at_power(e, s, p_tx);
        else
            throw ConfigError("static_budget_eval: bad variant " + variant);
        acc.mean_ee += pe.ee;
        acc.mean_mos += pe.sum_mos / static_cast<double>(e.config().n_users);
        acc.mean_power += pe.total_power;
    }
    acc.mean_ee /= realizations;
    acc.mean_mos /= realizations;
    acc.mean_power /= realizations;
    return acc;
}

double tail_mean_ee(const rl::TrainLog& log) {
    const std::size_t n = log.rows.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 4);
    double s = 0.0;
    for (std::size_t i = start; i < n; ++i) s += log.rows[i].mean_ee;
    return s / static_cast<double>(n - start);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    std::vector<ResultRow> rows;
    std::vector<double> grid = spec.grid.empty() ? std::vector<double>{0.0} : spec.grid;

    for (const auto& variant : spec.variants) {
        for (double g : grid) {
            env::SceneConfig scene = spec.scene;
            double p_tx = spec.eval_power;
            if (spec.sweep == Sweep::transmit_power) p_tx = g;
            if (spec.sweep == Sweep::n_elements)
                scene.n_elements = static_cast<std::size_t>(g);
            if (variant == "no_ris") scene.n_elements = 0;
            if (variant == "fixed_order") scene.dynamic_decoding = false;

            for (std::uint64_t seed : spec.seeds) {
                ResultRow row{variant, g, seed, 0, 0, 0};
                if (variant == "noma_ph" || variant == "noma_zf" || variant == "oma" ||
                    variant == "no_ris") {
                    env::Env e(scene);
                    const auto st =
                        static_budget_eval(e, spec.realizations, seed, p_tx, variant);
                    row.mean_ee = st.mean_ee;
                    row.mean_mos = st.mean_mos;
                    row.mean_power = st.mean_power;
                } else if (variant == "random_deploy" ||
                           variant == "barycenter_deploy") {
                    env::Env e(scene);
                    const auto st = static_deploy_eval(e, spec.realizations, seed, p_tx,
                                                       variant == "barycenter_deploy");
                    row.mean_ee = st.mean_ee;
                    row.mean_mos = st.mean_mos;
                    row.mean_power = st.mean_power;
                } else if (variant == "dynamic_order" || variant == "fixed_order") {
                    env::Env e(scene);
                    const auto st =
                        random_phase_rollout(e, spec.realizations, spec.steps, seed);
                    row.mean_ee = st.mean_ee;
                    row.mean_mos = st.mean_mos;
                    row.mean_power = st.mean_power;
                } else if (variant == "learned" || variant == "d3qn" ||
                           variant == "ddqn" || variant == "dqn" ||
                           variant == "q_table") {
                    rl::AgentConfig agent = spec.agent;
                    if (variant == "d3qn") agent.kind = rl::AgentKind::d3qn;
                    if (variant == "ddqn") agent.kind = rl::AgentKind::ddqn;
                    if (variant == "dqn") {
                        agent.kind = rl::AgentKind::dqn;
                        agent.eps.decaying = false;
                    }
                    if (variant == "q_table") agent.kind = rl::AgentKind::q_table;
                    env::Env e(scene);
                    const auto log =
                        rl::train(e, agent, spec.episodes, spec.steps, seed);
                    rl::write_log_csv(log, spec.out_dir + "/log_" + variant + "_seed" +
                                               std::to_string(seed) + ".csv");
                    if (variant == "learned" && !log.final_params.weights.empty()) {
                        const auto st = learned_deploy_eval(e, log.final_params,
                                                            spec.realizations,
                                                            spec.steps, seed, p_tx);
                        row.mean_ee = st.mean_ee;
                        row.mean_mos = st.mean_mos;
                        row.mean_power = st.mean_power;
                    } else if (!log.final_params.weights.empty()) {
                        const auto st = policy_rollout(e, log.final_params,
                                                       spec.realizations, spec.steps,
                                                       mix(seed, 777));
                        row.mean_ee = st.mean_ee;
                        row.mean_mos = st.mean_mos;
                        row.mean_power = st.mean_power;
                    } else {
                        row.mean_ee = tail_mean_ee(log);
                    }
                } else {
                    throw ConfigError("run_experiment: unknown variant '" + variant +
                                      "'");
                }
                rows.push_back(row);
            }
        }
    }
    write_results_csv(rows, spec.out_dir + "/results.csv");
    return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "variant,grid_value,seed,mean_ee,mean_mos,mean_power\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%llu,%.12g,%.12g,%.12g\n",
                      r.variant.c_str(), r.grid_value,
                      static_cast<unsigned long long>(r.seed), r.mean_ee, r.mean_mos,
                      r.mean_power);
        out << buf;
    }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<ResultRow> rows;
    std::string line;
    std::getline(in, line); // header
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 6 fields");
        ResultRow r;
        r.variant = f[0];
        r.grid_value = std::stod(f[1]);
        r.seed = std::stoull(f[2]);
        r.mean_ee = std::stod(f[3]);
        r.mean_mos = std::stod(f[4]);
        r.mean_power = std::stod(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ResultRow> summarize(const std::vector<ResultRow>& rows) {
    std::vector<ResultRow> out;
    std::vector<int> counts;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ResultRow& o) {
            return o.variant == r.variant && o.grid_value == r.grid_value;
        });
        if (it == out.end()) {
            out.push_back({r.variant, r.grid_value, 0, r.mean_ee, r.mean_mos,
                           r.mean_power});
            counts.push_back(1);
        } else {
            it->mean_ee += r.mean_ee;
            it->mean_mos += r.mean_mos;
            it->mean_power += r.mean_power;
            ++counts[static_cast<std::size_t>(it - out.begin())];
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].mean_ee /= counts[i];
        out[i].mean_mos /= counts[i];
        out[i].mean_power /= counts[i];
    }
    return out;
}

ExperimentSpec make_preset(const std::string& name) {
    ExperimentSpec spec;
    spec.scene.facades = {{30.0, 70.0, 55.0, 59.0, 8.0, 8.0},
                          {30.0, 70.0, 41.0, 45.0, 8.0, 8.0}};
    spec.agent.hidden = {64, 64};
    spec.agent.eps.schedule.c = spec.episodes;
    if (name == "fig4") {
        spec.sweep = Sweep::transmit_power;
        for (double dbm : {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0})
            spec.grid.push_back(dbm_to_watts(dbm));
        spec.variants = {"noma_ph", "noma_zf", "oma"};
        spec.seeds = {1, 2, 3};
    } else if (name == "fig5") {
        spec.variants = {"learned", "barycenter_deploy", "random_deploy", "no_ris"};
        spec.seeds = {1, 2, 3};
        spec.episodes = 200;
        spec.steps = 40;
        spec.agent.eps.schedule.c = spec.episodes;
        spec.eval_power = spec.scene.power.p_max;
    } else if (name == "fig6") {
        spec.sweep = Sweep::n_elements;
        spec.grid = {2, 4, 8, 12, 16, 24};
        spec.variants = {"noma_ph"};
        spec.seeds = {1, 2, 3};
        spec.realizations = 30;
        spec.eval_power = dbm_to_watts(8.0);
    } else if (name == "fig7") {
        spec.variants = {"d3qn", "dqn", "q_table"};
        spec.seeds = {1};
        spec.episodes = 200;
        spec.steps = 40;
        spec.agent.eps.schedule.c = spec.episodes;
    } else {
        throw ConfigError("make_preset: unknown preset '" + name + "'");
    }
    return spec;
}

ExperimentSpec spec_from(const config::KvFile& kv) {
    ExperimentSpec spec;
    spec.scene = config::scene_from(kv);
    spec.agent = config::agent_from(kv);
    if (auto v = kv.get("experiment", "sweep")) {
        if (*v == "none")
            spec.sweep = Sweep::none;
        else if (*v == "transmit_power")
            spec.sweep = Sweep::transmit_power;
        else if (*v == "n_elements")
            spec.sweep = Sweep::n_elements;
        else
            throw ConfigError("config: unknown sweep '" + *v + "'");
    }
    if (auto v = kv.get("experiment", "grid")) spec.grid = config::parse_list(*v);
    if (auto v = kv.get("experiment", "grid_dbm")) {
        spec.grid.clear();
        for (double d : config::parse_list(*v)) spec.grid.push_back(dbm_to_watts(d));
    }
    if (auto v = kv.get("experiment", "seeds")) {
        spec.seeds.clear();
        for (double d : config::parse_list(*v))
            spec.seeds.push_back(static_cast<std::uint64_t>(d));
    }
    if (auto v = kv.get("experiment", "variants")) {
        std::istringstream in(*v);
        std::string tok;
        spec.variants.clear();
        while (std::getline(in, tok, ',')) {
            const auto b = tok.find_first_not_of(" \t");
            const auto e = tok.find_last_not_of(" \t");
            if (b != std::string::npos)
                spec.variants.push_back(tok.substr(b, e - b + 1));
        }
    }
    if (auto v = kv.get("experiment", "episodes"))
        spec.episodes = static_cast<int>(std::stod(*v));
    if (auto v = kv.get("experiment", "steps"))
        spec.steps = static_cast<int>(std::stod(*v));
    if (auto v = kv.get("experiment", "realizations"))
        spec.realizations = static_cast<int>(std::stod(*v));
    if (auto v = kv.get("experiment", "eval_power"))
        spec.eval_power = config::parse_power_watts(*v);
    return spec;
}

}  // namespace rislab::harness
