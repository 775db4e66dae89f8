#pragma once

#include <cstddef>
#include <vector>

#include "rislab/precoding.hpp"
#include "rislab/types.hpp"

namespace rislab::noma {

struct ClusterPair {
    std::size_t strong = 0; // user index of the strong member
    std::size_t weak = 0;
};

struct ClusterPlan {
    std::vector<ClusterPair> pairs;
};

// Pair strongest with weakest, 2nd strongest with 2nd weakest, ...
// Larger-gain member is strong; ties broken by lower user index.
ClusterPlan form_clusters(const std::vector<double>& channel_gains);

// Orders the two members by descending effective gain, index tie-break.
// Returned pair is (decoded-last a.k.a. strong, decoded-first).
ClusterPair decoding_order(std::size_t user_i, double gain_i, std::size_t user_j,
                           double gain_j);

// SIC order condition: the strong user must decode the weak
// user's message at least as fast as the weak user itself does.
bool sic_feasible(double rate_b_at_a, double rate_b_at_b);

struct ZfClusterInput {
    double cross_gain = 0.0;                // |h_b^H w_l|^2 of the own cluster
    std::vector<double> inter_powers;       // P_j |h_b^H w_j|^2, j != l
};

// ZF-mode SINRs. gamma_a = alpha_a P_l / sigma2 (interference-free);
// gamma_b sees the strong user's share plus inter-cluster leakage.
std::pair<double, double> sinr_zf(const ZfClusterInput& in, double p_l, double alpha_a,
                                  double alpha_b, double sigma2);

// PH-mode SINRs from the projected channels and the two beams.
std::pair<double, double> sinr_ph(const CVec& f_a, const CVec& f_b,
                                  const precoding::PhNomaBeams& beams, double sigma2_a,
                                  double sigma2_b);

// SINR of the strong user decoding the weak user's message (own signal
// is interference at that stage).
double sinr_cross(const CVec& f_a, const precoding::PhNomaBeams& beams, double sigma2_a);

// B * log2(1 + gamma), bits/s.
double achievable_rate(double gamma, double bandwidth);

struct LinkBudget {
    std::vector<double> sinr;           // per user, linear
    std::vector<double> rate;           // per user, bits/s
    std::vector<double> power;          // per user realized transmit power, W
    double transmit_power_sum = 0.0;    // sum of beam-norm squares, W
    std::size_t sic_infeasible = 0;     // clusters where neither order passed
};

}  // namespace rislab::noma
