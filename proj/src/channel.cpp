#include "rislab/channel.hpp"

#include <cmath>
#include <numbers>

namespace rislab::channel {

double path_loss(double d, const PathLossParams& p) {
    if (d <= 0.0) throw std::domain_error("path_loss: non-positive distance");
    return p.c0 * std::pow(d / p.d0, -p.alpha);
}

double wrap_phase(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

CMat phase_matrix(const PhaseConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(cfg.theta.size());
    CMat m = CMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double th = wrap_phase(cfg.theta[static_cast<std::size_t>(i)]);
        m(i, i) = cfg.beta * Complex(std::cos(th), std::sin(th));
    }
    return m;
}

CMat sample_rayleigh(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    if (rows < 1 || cols < 1) throw DimensionError("sample_rayleigh: empty shape");
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            m(r, c) = Complex(re, im);
        }
    return m;
}

CMat sample_rician(Eigen::Index rows, Eigen::Index cols, double k_factor,
                   const CMat& los, std::mt19937_64& rng) {
    if (k_factor < 0.0) throw std::domain_error("sample_rician: negative K factor");
    if (los.rows() != rows || los.cols() != cols)
        throw DimensionError("sample_rician: los dimension mismatch");
    const CMat scatter = sample_rayleigh(rows, cols, rng);
    const double a = std::sqrt(k_factor / (k_factor + 1.0));
    const double b = std::sqrt(1.0 / (k_factor + 1.0));
    return a * los + b * scatter;
}

CMat los_matrix(Eigen::Index rows, Eigen::Index cols) {
    // Deterministic rank-one steering structure, unit-modulus entries.
    CVec ar(rows), ac(cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        ar(r) = std::polar(1.0, std::numbers::pi * 0.37 * static_cast<double>(r));
    for (Eigen::Index c = 0; c < cols; ++c)
        ac(c) = std::polar(1.0, std::numbers::pi * 0.21 * static_cast<double>(c));
    return ar * ac.transpose();
}

CRowVec composite_channel(const CRowVec& h_direct, const CRowVec& h_ris_user,
                          const PhaseConfig& cfg, const CMat& h_bs_ris) {
    const auto n = static_cast<Eigen::Index>(cfg.theta.size());
    if (h_ris_user.cols() != n || h_bs_ris.rows() != n ||
        h_bs_ris.cols() != h_direct.cols())
        throw DimensionError("composite_channel: dimension mismatch");
    return h_direct + h_ris_user * phase_matrix(cfg) * h_bs_ris;
}

}  // namespace rislab::channel
