#pragma once

#include <utility>

#include "rislab/types.hpp"

namespace rislab::precoding {

struct ZfPrecoder {
    CMat w; // M x L, one beam column per cluster; H^H * w = I_L
};

struct SinrTargets {
    double gamma_min_a = 1.0; // linear SINR target, strong user
    double gamma_min_b = 1.0; // linear SINR target, weak user
};

struct PhNomaBeams {
    CVec w_a;
    CVec w_b;
    double nu_a = 0.0;
    double nu_b = 0.0;
    double u = 0.0; // cos^2(phi) of the projected channels
};

// H * (H^H H)^-1 for M x L full-column-rank H, so that H^H * result = I_L.
CMat pseudo_inverse(const CMat& h, double cond_cap = 1e12);

// Columns of h are the combined strong-user channels (M x L stack).
ZfPrecoder zf_precoder(const CMat& h, double cond_cap = 1e12);

// P = I_M - Hhat (Hhat^H Hhat)^-1 Hhat^H. Zero columns give the identity.
CMat orthogonal_projection(const CMat& h_hat, double cond_cap = 1e12);

// u = |h_b^H h_a|^2 / (||h_a||^2 ||h_b||^2), in [0, 1].
double channel_correlation(const CVec& h_a, const CVec& h_b);

// Closed-form minimum-power beams meeting both SINR targets under the
// projected two-user channel; noise variances default to 1.
PhNomaBeams ph_noma_precoder(const CVec& h_a, const CVec& h_b, const CMat& p_perp,
                             const SinrTargets& targets, double sigma2_a = 1.0,
                             double sigma2_b = 1.0);

// Closed-form (P_la, P_lb) from targets, projected norms and correlation u.
std::pair<double, double> transmit_powers(const SinrTargets& targets,
                                          double norm_pa, double norm_pb, double u,
                                          double sigma2_a = 1.0, double sigma2_b = 1.0);

// Rate target (bits/s) over bandwidth b to linear SINR target.
inline double rate_to_sinr_target(double rate, double b) {
    return std::pow(2.0, rate / b) - 1.0;
}

}  // namespace rislab::precoding
