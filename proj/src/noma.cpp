#include "rislab/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rislab::noma {

ClusterPlan form_clusters(const std::vector<double>& gains) {
    const std::size_t k = gains.size();
    if (k < 2 || k % 2 != 0)
        throw ConfigError("form_clusters: K must be even and >= 2");
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (gains[i] != gains[j]) return gains[i] > gains[j];
        return i < j;
    });
    ClusterPlan plan;
    for (std::size_t l = 0; l < k / 2; ++l)
        plan.pairs.push_back({order[l], order[k - 1 - l]});
    return plan;
}

ClusterPair decoding_order(std::size_t user_i, double gain_i, std::size_t user_j,
                           double gain_j) {
    if (gain_i > gain_j || (gain_i == gain_j && user_i < user_j))
        return {user_i, user_j};
    return {user_j, user_i};
}

bool sic_feasible(double rate_b_at_a, double rate_b_at_b) {
    return rate_b_at_a >= rate_b_at_b;
}

std::pair<double, double> sinr_zf(const ZfClusterInput& in, double p_l, double alpha_a,
                                  double alpha_b, double sigma2) {
    if (sigma2 <= 0.0) throw std::domain_error("sinr_zf: non-positive noise power");
    const double gamma_a = alpha_a * p_l / sigma2;
    double inter = 0.0;
    for (double p : in.inter_powers) inter += p;
    // Intra-cluster term uses the strong user's share alpha_a.
    const double gamma_b = in.cross_gain * alpha_b * p_l /
                           (in.cross_gain * alpha_a * p_l + inter + sigma2);
    return {gamma_a, gamma_b};
}

std::pair<double, double> sinr_ph(const CVec& f_a, const CVec& f_b,
                                  const precoding::PhNomaBeams& beams, double sigma2_a,
                                  double sigma2_b) {
    const double sig_a = std::norm(Complex(f_a.adjoint() * beams.w_a));
    const double sig_b = std::norm(Complex(f_b.adjoint() * beams.w_b));
    const double intf_b = std::norm(Complex(f_b.adjoint() * beams.w_a));
    return {sig_a / sigma2_a, sig_b / (intf_b + sigma2_b)};
}

double sinr_cross(const CVec& f_a, const precoding::PhNomaBeams& beams, double sigma2_a) {
    const double sig = std::norm(Complex(f_a.adjoint() * beams.w_b));
    const double intf = std::norm(Complex(f_a.adjoint() * beams.w_a));
    return sig / (intf + sigma2_a);
}

double achievable_rate(double gamma, double bandwidth) {
    if (gamma < 0.0 || bandwidth <= 0.0)
        throw std::domain_error("achievable_rate: invalid arguments");
    return bandwidth * std::log2(1.0 + gamma);
}

}  // namespace rislab::noma
