#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rislab/channel.hpp"
#include "rislab/metrics.hpp"
#include "rislab/noma.hpp"
#include "rislab/precoding.hpp"
#include "rislab/types.hpp"

namespace rislab::env {

enum class PrecodingMode { zf, ph_noma };

// Axis-aligned box on a building face; RIS positions must stay inside one.
struct FacadeRect {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0, z0 = 0, z1 = 0;

    bool contains(const Position3& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1 && p.z >= z0 &&
               p.z <= z1;
    }
};

struct SceneConfig {
    double region_side = 100.0;
    Position3 bs_pos{50.0, 50.0, 10.0}; // region center by default
    std::vector<FacadeRect> facades;
    std::size_t n_elements = 8;  // N
    std::size_t n_users = 4;     // K, even
    std::size_t m_antennas = 4;  // M
    double bandwidth = 1e6;                  // B_l, Hz
    double noise_density_dbm_hz = -169.0;    // Table defaults
    channel::PathLossParams pl_bs_mu{1e-3, 1.0, 3.5};
    channel::PathLossParams pl_bs_ris{1e-3, 1.0, 2.2};
    channel::PathLossParams pl_ris_mu{1e-3, 1.0, 2.8};
    double rician_k = 10.0;           // linear K factor for the BS-RIS link
    double direct_blockage_db = 70.0; // obstructed direct link (RIS use case)
    metrics::PowerModel power;
    metrics::MosParams mos = metrics::calibrate_mos(1e5, 1e7);
    PrecodingMode mode = PrecodingMode::ph_noma;
    double target_step_db = 1.0; // p~, dB per power/target action
    double rate_floor = 2e5;     // R_min per user, bits/s
    double cond_cap = 1e12;
    bool dynamic_decoding = true;

    double noise_power() const {
        return dbm_to_watts(noise_density_dbm_hz) * bandwidth;
    }
};

struct EnvState {
    std::vector<double> theta;          // N phases in [0, 2pi)
    Position3 ris_pos;                  // inside a facade
    std::vector<Position3> user_pos;    // z = 0
    std::vector<double> user_power;     // realized per-user transmit power, W
    std::vector<double> user_ctrl;      // controlled per-user quantity (see Env)
};

struct Action {
    enum class Kind { phase, move, power } kind = Kind::phase;
    std::size_t subject = 0; // element index / move index / user index
    double delta = 0.0;      // phase delta or power factor exponent sign
    int dx = 0, dy = 0;      // move deltas (z never changes)
};

// Deterministic ordering: 3N phase deltas, 5 moves, 3K power deltas.
std::vector<Action> enumerate_actions(std::size_t n, std::size_t k);
inline std::size_t action_count(std::size_t n, std::size_t k) {
    return 3 * n + 3 * k + 5;
}

struct StepResult {
    double reward = 0.0;
    bool rejected = false; // constraint-violating delta, state unchanged
    bool degraded = false; // precoder singularity, state unchanged
    noma::LinkBudget budget;
};

// One-timeslot physical-layer MDP. Small-scale fading is block fading:
// drawn once at reset, held through the episode. Path loss follows the
// RIS position every step.
class Env {
  public:
    explicit Env(SceneConfig cfg);

    EnvState reset(std::uint64_t seed);

    // Deployment-time override: place the RIS at the nearest facade point to
    // `target` and refresh the derived quantities, keeping the fading draws.
    void move_ris(const Position3& target);
    StepResult step(std::size_t action_index);

    RVec encode_state() const;            // length N + 2K + 3
    std::size_t num_actions() const { return actions_.size(); }
    const std::vector<Action>& actions() const { return actions_; }
    const EnvState& state() const { return state_; }
    const SceneConfig& config() const { return cfg_; }
    const noma::ClusterPlan& clusters() const { return clusters_; }
    double current_ee() const { return ee_; }
    const noma::LinkBudget& current_budget() const { return budget_; }
    std::size_t violation_count() const { return violations_; }

    // Physical-layer evaluation of an arbitrary state under this episode's
    // fading draw. Also used by the harness baselines.
    noma::LinkBudget evaluate(const EnvState& s) const;

    // Composite per-user channels (columns) at a state, path loss included.
    CMat composite_channels(const EnvState& s) const;

  private:
    void refresh(const EnvState& s, noma::LinkBudget& out) const;
    bool violates_constraints(const noma::LinkBudget& before,
                              const noma::LinkBudget& after) const;

    SceneConfig cfg_;
    std::vector<Action> actions_;
    void recompute_derived();

    EnvState state_;
    noma::ClusterPlan clusters_;
    std::vector<noma::ClusterPair> frozen_order_;
    noma::LinkBudget budget_;
    double ee_ = 0.0;
    std::size_t violations_ = 0;

    // Episode fading draw.
    CMat h_bs_ris_;              // N x M
    std::vector<CRowVec> h_direct_;   // 1 x M per user
    std::vector<CRowVec> h_ris_user_; // 1 x N per user
};

}  // namespace rislab::env
