#pragma once

#include <random>
#include <vector>

#include "rislab/types.hpp"

namespace rislab::channel {

struct PathLossParams {
    double c0 = 1e-3;   // linear gain at reference distance
    double d0 = 1.0;    // reference distance, m
    double alpha = 2.0; // path-loss exponent
};

// eta(d) = c0 * (d/d0)^(-alpha), linear power gain.
double path_loss(double d, const PathLossParams& p);

struct PhaseConfig {
    std::vector<double> theta; // radians, wrapped to [0, 2pi)
    double beta = 1.0;

    std::size_t size() const { return theta.size(); }
};

// Wraps an angle into [0, 2pi).
double wrap_phase(double theta);

// N x N diagonal matrix with entries beta * exp(j theta_n).
CMat phase_matrix(const PhaseConfig& cfg);

// Independent CN(0,1) entries (unit second moment).
CMat sample_rayleigh(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

// sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * scatter, scatter ~ CN(0,1).
CMat sample_rician(Eigen::Index rows, Eigen::Index cols, double k_factor,
                   const CMat& los, std::mt19937_64& rng);

// Canonical LoS steering outer product with unit-modulus entries.
CMat los_matrix(Eigen::Index rows, Eigen::Index cols);

// h_direct + h_ris_user * Theta * H_bs_ris, all row-vector convention (1 x M).
CRowVec composite_channel(const CRowVec& h_direct, const CRowVec& h_ris_user,
                          const PhaseConfig& cfg, const CMat& h_bs_ris);

}  // namespace rislab::channel
