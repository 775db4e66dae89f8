#include "rislab/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rislab::env {

namespace {
constexpr double kPhaseStep = std::numbers::pi / 10.0;
constexpr double kFloorTol = 1e-9;
}

std::vector<Action> enumerate_actions(std::size_t n, std::size_t k) {
    if (k < 1) throw ConfigError("enumerate_actions: K must be >= 1");
    std::vector<Action> acts;
    acts.reserve(action_count(n, k));
    for (std::size_t e = 0; e < n; ++e)
        for (double d : {-kPhaseStep, 0.0, kPhaseStep})
            acts.push_back({Action::Kind::phase, e, d, 0, 0});
    const int moves[5][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0}};
    for (std::size_t m = 0; m < 5; ++m)
        acts.push_back({Action::Kind::move, m, 0.0, moves[m][0], moves[m][1]});
    for (std::size_t u = 0; u < k; ++u)
        for (double d : {-1.0, 0.0, 1.0})
            acts.push_back({Action::Kind::power, u, d, 0, 0});
    return acts;
}

Env::Env(SceneConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.n_users < 2 || cfg_.n_users % 2 != 0)
        throw ConfigError("Env: K must be even and >= 2");
    if (cfg_.n_users / 2 > cfg_.m_antennas)
        throw ConfigError("Env: need M >= L clusters");
    actions_ = enumerate_actions(cfg_.n_elements, cfg_.n_users);
}

EnvState Env::reset(std::uint64_t seed) {
    if (cfg_.facades.empty()) throw ConfigError("Env::reset: empty facade set");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EnvState s;
    const auto& rect = cfg_.facades[rng() % cfg_.facades.size()];
    s.ris_pos = {rect.x0 + unit(rng) * (rect.x1 - rect.x0),
                 rect.y0 + unit(rng) * (rect.y1 - rect.y0),
                 rect.z0 + unit(rng) * (rect.z1 - rect.z0)};
    // Users before any N-dependent draws, so sweeps over the element count
    // see the same geometry for a given seed.
    s.user_pos.resize(cfg_.n_users);
    for (auto& p : s.user_pos)
        p = {unit(rng) * cfg_.region_side, unit(rng) * cfg_.region_side, 0.0};
    s.theta.resize(cfg_.n_elements);
    for (auto& th : s.theta) th = unit(rng) * 2.0 * std::numbers::pi;

    const double sigma2 = cfg_.noise_power();
    const double gamma_floor =
        precoding::rate_to_sinr_target(cfg_.rate_floor, cfg_.bandwidth);
    s.user_ctrl.assign(cfg_.n_users,
                       cfg_.mode == PrecodingMode::ph_noma ? 1.0 : gamma_floor * sigma2);
    s.user_power.assign(cfg_.n_users, 0.0);

    // Block fading: one small-scale draw per episode.
    const auto n = static_cast<Eigen::Index>(cfg_.n_elements);
    const auto m = static_cast<Eigen::Index>(cfg_.m_antennas);
    if (n > 0)
        h_bs_ris_ = channel::sample_rician(n, m, cfg_.rician_k,
                                           channel::los_matrix(n, m), rng);
    else
        h_bs_ris_ = CMat::Zero(0, m);
    h_direct_.clear();
    h_ris_user_.clear();
    for (std::size_t k = 0; k < cfg_.n_users; ++k) {
        h_direct_.push_back(channel::sample_rayleigh(1, m, rng).row(0));
        h_ris_user_.push_back(n > 0 ? CRowVec(channel::sample_rayleigh(1, n, rng).row(0))
                                    : CRowVec(0));
    }

    state_ = std::move(s);
    recompute_derived();
    violations_ = 0;
    return state_;
}

void Env::recompute_derived() {
    const CMat h = composite_channels(state_);
    std::vector<double> gains(cfg_.n_users);
    for (std::size_t k = 0; k < cfg_.n_users; ++k)
        gains[k] = h.col(static_cast<Eigen::Index>(k)).squaredNorm();
    clusters_ = noma::form_clusters(gains);
    frozen_order_ = clusters_.pairs;

    budget_ = evaluate(state_);
    state_.user_power = budget_.power;
    ee_ = metrics::energy_efficiency(
        [&] {
            double sum = 0.0;
            for (std::size_t k = 0; k < cfg_.n_users; ++k)
                sum += metrics::mos(budget_.rate[k], cfg_.mos);
            return sum;
        }(),
        metrics::total_power(budget_.transmit_power_sum, cfg_.n_users, cfg_.n_elements,
                             cfg_.power));
}

void Env::move_ris(const Position3& target) {
    Position3 best{};
    double best_d = -1.0;
    for (const auto& r : cfg_.facades) {
        Position3 p{std::clamp(target.x, r.x0, r.x1), std::clamp(target.y, r.y0, r.y1),
                    std::clamp(target.z, r.z0, r.z1)};
        const double d = distance(p, target);
        if (best_d < 0.0 || d < best_d) {
            best_d = d;
            best = p;
        }
    }
    state_.ris_pos = best;
    recompute_derived();
}

CMat Env::composite_channels(const EnvState& s) const {
    const auto m = static_cast<Eigen::Index>(cfg_.m_antennas);
    CMat h(m, static_cast<Eigen::Index>(cfg_.n_users));
    const double blockage = db_to_linear(-cfg_.direct_blockage_db);
    const bool has_ris = cfg_.n_elements > 0;
    double amp_bs_ris = 0.0;
    if (has_ris) {
        const double d_bs_ris = distance(cfg_.bs_pos, s.ris_pos);
        amp_bs_ris = std::sqrt(channel::path_loss(d_bs_ris, cfg_.pl_bs_ris));
    }
    channel::PhaseConfig phase{s.theta, 1.0};
    for (std::size_t k = 0; k < cfg_.n_users; ++k) {
        const double d_bu = distance(cfg_.bs_pos, s.user_pos[k]);
        const double amp_d =
            std::sqrt(channel::path_loss(d_bu, cfg_.pl_bs_mu) * blockage);
        CRowVec g = amp_d * h_direct_[k];
        if (has_ris) {
            const double d_su = distance(s.ris_pos, s.user_pos[k]);
            const double amp_su = std::sqrt(channel::path_loss(d_su, cfg_.pl_ris_mu));
            g += channel::composite_channel(CRowVec::Zero(m),
                                            amp_su * h_ris_user_[k], phase,
                                            amp_bs_ris * h_bs_ris_);
        }
        h.col(static_cast<Eigen::Index>(k)) = g.adjoint();
    }
    return h;
}

noma::LinkBudget Env::evaluate(const EnvState& s) const {
    const CMat h = composite_channels(s);
    const double sigma2 = cfg_.noise_power();
    const std::size_t k_users = cfg_.n_users;
    const std::size_t l_clusters = clusters_.pairs.size();

    std::vector<double> gains(k_users);
    for (std::size_t k = 0; k < k_users; ++k)
        gains[k] = h.col(static_cast<Eigen::Index>(k)).squaredNorm();

    // Decoding order per cluster at the current state (dynamic
    // recomputation), or the episode-start order when frozen.
    std::vector<noma::ClusterPair> order(l_clusters);
    for (std::size_t l = 0; l < l_clusters; ++l) {
        if (cfg_.dynamic_decoding) {
            const auto& pr = clusters_.pairs[l];
            order[l] = noma::decoding_order(pr.strong, gains[pr.strong], pr.weak,
                                            gains[pr.weak]);
        } else {
            order[l] = frozen_order_[l];
        }
    }

    noma::LinkBudget out;
    out.sinr.assign(k_users, 0.0);
    out.rate.assign(k_users, 0.0);
    out.power.assign(k_users, 0.0);

    if (cfg_.mode == PrecodingMode::ph_noma) {
        for (std::size_t l = 0; l < l_clusters; ++l) {
            auto eval_order = [&](const noma::ClusterPair& ord) {
                const auto a = static_cast<Eigen::Index>(ord.strong);
                const auto b = static_cast<Eigen::Index>(ord.weak);
                CMat h_hat(h.rows(), static_cast<Eigen::Index>(k_users - 2));
                Eigen::Index col = 0;
                for (std::size_t j = 0; j < k_users; ++j)
                    if (j != ord.strong && j != ord.weak)
                        h_hat.col(col++) = h.col(static_cast<Eigen::Index>(j));
                const CMat p = precoding::orthogonal_projection(h_hat, cfg_.cond_cap);
                precoding::SinrTargets tg{
                    precoding::rate_to_sinr_target(
                        cfg_.rate_floor * s.user_ctrl[ord.strong], cfg_.bandwidth),
                    precoding::rate_to_sinr_target(
                        cfg_.rate_floor * s.user_ctrl[ord.weak], cfg_.bandwidth)};
                const auto beams = precoding::ph_noma_precoder(h.col(a), h.col(b), p,
                                                               tg, sigma2, sigma2);
                const CVec f_a = p * h.col(a);
                const CVec f_b = p * h.col(b);
                const auto [ga, gb] = noma::sinr_ph(f_a, f_b, beams, sigma2, sigma2);
                const double g_cross = noma::sinr_cross(f_a, beams, sigma2);
                return std::tuple{beams, ga, gb, g_cross};
            };

            auto ord = order[l];
            auto [beams, ga, gb, g_cross] = eval_order(ord);
            bool feasible = noma::sic_feasible(
                noma::achievable_rate(g_cross, cfg_.bandwidth),
                noma::achievable_rate(gb, cfg_.bandwidth));
            if (!feasible && cfg_.dynamic_decoding) {
                const noma::ClusterPair flipped{ord.weak, ord.strong};
                auto [b2, ga2, gb2, gc2] = eval_order(flipped);
                if (noma::sic_feasible(noma::achievable_rate(gc2, cfg_.bandwidth),
                                       noma::achievable_rate(gb2, cfg_.bandwidth))) {
                    ord = flipped;
                    beams = b2;
                    ga = ga2;
                    gb = gb2;
                    g_cross = gc2;
                    feasible = true;
                }
            }
            if (!feasible) ++out.sic_infeasible;

            out.sinr[ord.strong] = ga;
            out.sinr[ord.weak] = gb;
            out.rate[ord.strong] = noma::achievable_rate(ga, cfg_.bandwidth);
            // The weak user's message must be decodable at both receivers.
            out.rate[ord.weak] = std::min(
                noma::achievable_rate(gb, cfg_.bandwidth),
                noma::achievable_rate(g_cross, cfg_.bandwidth));
            out.power[ord.strong] = beams.w_a.squaredNorm();
            out.power[ord.weak] = beams.w_b.squaredNorm();
            out.transmit_power_sum += out.power[ord.strong] + out.power[ord.weak];
        }
    } else {
        // ZF: one beam per cluster from the strong users' channel stack.
        CMat h_strong(h.rows(), static_cast<Eigen::Index>(l_clusters));
        for (std::size_t l = 0; l < l_clusters; ++l)
            h_strong.col(static_cast<Eigen::Index>(l)) =
                h.col(static_cast<Eigen::Index>(order[l].strong));
        const CMat w = precoding::pseudo_inverse(h_strong, cfg_.cond_cap);

        std::vector<double> p_cluster(l_clusters);
        for (std::size_t l = 0; l < l_clusters; ++l)
            p_cluster[l] = s.user_ctrl[order[l].strong] + s.user_ctrl[order[l].weak];

        for (std::size_t l = 0; l < l_clusters; ++l) {
            const auto& ord = order[l];
            const double p_l = p_cluster[l];
            const double alpha_a = s.user_ctrl[ord.strong] / p_l;
            const double alpha_b = s.user_ctrl[ord.weak] / p_l;
            const CVec g_b = h.col(static_cast<Eigen::Index>(ord.weak));
            noma::ZfClusterInput in;
            in.cross_gain =
                std::norm(Complex(g_b.adjoint() * w.col(static_cast<Eigen::Index>(l))));
            for (std::size_t j = 0; j < l_clusters; ++j)
                if (j != l)
                    in.inter_powers.push_back(
                        p_cluster[j] *
                        std::norm(Complex(g_b.adjoint() *
                                          w.col(static_cast<Eigen::Index>(j)))));
            const auto [ga, gb] = noma::sinr_zf(in, p_l, alpha_a, alpha_b, sigma2);
            // Strong user decoding the weak user's message (ZF keeps its own
            // inter-cluster interference at zero, |g_a^H w_l| = 1).
            const double g_cross = alpha_b * p_l / (alpha_a * p_l + sigma2);
            if (!noma::sic_feasible(noma::achievable_rate(g_cross, cfg_.bandwidth),
                                    noma::achievable_rate(gb, cfg_.bandwidth)))
                ++out.sic_infeasible;
            out.sinr[ord.strong] = ga;
            out.sinr[ord.weak] = gb;
            out.rate[ord.strong] = noma::achievable_rate(ga, cfg_.bandwidth);
            out.rate[ord.weak] =
                std::min(noma::achievable_rate(gb, cfg_.bandwidth),
                         noma::achievable_rate(g_cross, cfg_.bandwidth));
            const double w_norm2 = w.col(static_cast<Eigen::Index>(l)).squaredNorm();
            out.power[ord.strong] = alpha_a * p_l * w_norm2;
            out.power[ord.weak] = alpha_b * p_l * w_norm2;
            out.transmit_power_sum += p_l * w_norm2;
        }
    }
    return out;
}

bool Env::violates_constraints(const noma::LinkBudget& before,
                               const noma::LinkBudget& after) const {
    if (after.transmit_power_sum > cfg_.power.p_max) return true;
    if (cfg_.mode == PrecodingMode::zf) {
        std::size_t before_bad = 0, after_bad = 0;
        for (std::size_t k = 0; k < cfg_.n_users; ++k) {
            if (before.rate[k] < cfg_.rate_floor) ++before_bad;
            if (after.rate[k] < cfg_.rate_floor) ++after_bad;
        }
        if (after_bad > before_bad) return true;
    }
    return false;
}

StepResult Env::step(std::size_t action_index) {
    if (action_index >= actions_.size())
        throw std::out_of_range("Env::step: action index out of range");
    const Action& act = actions_[action_index];

    EnvState cand = state_;
    switch (act.kind) {
        case Action::Kind::phase:
            cand.theta[act.subject] =
                channel::wrap_phase(cand.theta[act.subject] + act.delta);
            break;
        case Action::Kind::move: {
            cand.ris_pos.x += act.dx;
            cand.ris_pos.y += act.dy;
            const bool inside = std::any_of(
                cfg_.facades.begin(), cfg_.facades.end(),
                [&](const FacadeRect& r) { return r.contains(cand.ris_pos); });
            if (!inside) {
                ++violations_;
                return {0.0, true, false, budget_};
            }
            break;
        }
        case Action::Kind::power: {
            if (act.delta != 0.0) {
                const double factor = db_to_linear(act.delta * cfg_.target_step_db);
                cand.user_ctrl[act.subject] *= factor;
                if (cfg_.mode == PrecodingMode::ph_noma &&
                    cand.user_ctrl[act.subject] < 1.0 - kFloorTol) {
                    ++violations_;
                    return {0.0, true, false, budget_};
                }
            }
            break;
        }
    }

    noma::LinkBudget cand_budget;
    try {
        cand_budget = evaluate(cand);
    } catch (const SingularityError&) {
        ++violations_;
        return {0.0, false, true, budget_};
    } catch (const DegenerateGeometryError&) {
        ++violations_;
        return {0.0, false, true, budget_};
    }

    if (violates_constraints(budget_, cand_budget)) {
        ++violations_;
        return {0.0, true, false, budget_};
    }

    double sum_mos = 0.0;
    for (std::size_t k = 0; k < cfg_.n_users; ++k)
        sum_mos += metrics::mos(cand_budget.rate[k], cfg_.mos);
    const double ee_new = metrics::energy_efficiency(
        sum_mos, metrics::total_power(cand_budget.transmit_power_sum, cfg_.n_users,
                                      cfg_.n_elements, cfg_.power));

    cand.user_power = cand_budget.power;
    state_ = std::move(cand);
    const double reward = metrics::step_reward(ee_new, ee_);
    ee_ = ee_new;
    budget_ = std::move(cand_budget);
    return {reward, false, false, budget_};
}

RVec Env::encode_state() const {
    const std::size_t n = cfg_.n_elements;
    const std::size_t k = cfg_.n_users;
    RVec v(static_cast<Eigen::Index>(n + 2 * k + 3));
    Eigen::Index i = 0;
    for (std::size_t e = 0; e < n; ++e)
        v(i++) = state_.theta[e] / std::numbers::pi - 1.0;
    const double half = cfg_.region_side / 2.0;
    v(i++) = (state_.ris_pos.x - cfg_.bs_pos.x) / half;
    v(i++) = (state_.ris_pos.y - cfg_.bs_pos.y) / half;
    v(i++) = state_.ris_pos.z / half;
    for (std::size_t u = 0; u < k; ++u) {
        v(i++) = (state_.user_pos[u].x - cfg_.bs_pos.x) / half;
        v(i++) = (state_.user_pos[u].y - cfg_.bs_pos.y) / half;
    }
    return v;
}

}  // namespace rislab::env
