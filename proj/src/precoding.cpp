#include "rislab/precoding.hpp"

#include <Eigen/SVD>

namespace rislab::precoding {

namespace {

void check_conditioning(const CMat& h, double cond_cap, const char* who) {
    Eigen::JacobiSVD<CMat> svd(h);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0 || s(0) / smin > cond_cap)
        throw SingularityError(std::string(who) + ": rank-deficient or ill-conditioned "
                               "channel stack (cols=" + std::to_string(h.cols()) + ")");
}

} // namespace

CMat pseudo_inverse(const CMat& h, double cond_cap) {
    if (h.rows() < h.cols())
        throw DimensionError("pseudo_inverse: expects M >= L");
    check_conditioning(h, cond_cap, "pseudo_inverse");
    const CMat gram = h.adjoint() * h;
    return h * gram.inverse();
}

ZfPrecoder zf_precoder(const CMat& h, double cond_cap) {
    return ZfPrecoder{pseudo_inverse(h, cond_cap)};
}

CMat orthogonal_projection(const CMat& h_hat, double cond_cap) {
    const auto m = h_hat.rows();
    if (h_hat.cols() == 0) return CMat::Identity(m, m);
    check_conditioning(h_hat, cond_cap, "orthogonal_projection");
    const CMat gram = h_hat.adjoint() * h_hat;
    return CMat::Identity(m, m) - h_hat * gram.inverse() * h_hat.adjoint();
}

double channel_correlation(const CVec& h_a, const CVec& h_b) {
    const double na2 = h_a.squaredNorm();
    const double nb2 = h_b.squaredNorm();
    if (na2 == 0.0 || nb2 == 0.0)
        throw std::domain_error("channel_correlation: zero channel vector");
    const Complex inner = h_b.adjoint() * h_a;
    double u = std::norm(inner) / (na2 * nb2);
    return std::min(u, 1.0);
}

PhNomaBeams ph_noma_precoder(const CVec& h_a, const CVec& h_b, const CMat& p_perp,
                             const SinrTargets& targets, double sigma2_a,
                             double sigma2_b) {
    if (targets.gamma_min_a < 0.0 || targets.gamma_min_b < 0.0)
        throw std::domain_error("ph_noma_precoder: negative SINR target");
    const CVec fa = p_perp * h_a;
    const CVec fb = p_perp * h_b;
    const double na = fa.norm();
    const double nb = fb.norm();
    if (na < 1e-12 || nb < 1e-12)
        throw DegenerateGeometryError(
            "ph_noma_precoder: projected channel vanishes inside nulled subspace");

    const CVec ea = fa / na;
    const CVec eb = fb / nb;
    const Complex rho = eb.adjoint() * ea; // e_b^H e_a
    const double u = std::min(std::norm(rho), 1.0);
    const double sin2 = 1.0 - u;

    const double ga = targets.gamma_min_a;
    const double gb = targets.gamma_min_b;
    const double denom = 1.0 + gb * sin2;

    PhNomaBeams beams;
    beams.u = u;
    beams.nu_a = std::sqrt(ga * sigma2_a / (na * na)) / denom;
    const double nu_b2 = gb * sigma2_b / (nb * nb) +
                         (ga * sigma2_a / (na * na)) * gb * u / (denom * denom);
    beams.nu_b = std::sqrt(nu_b2);
    beams.w_a = beams.nu_a * ((1.0 + gb) * ea - gb * rho * eb);
    beams.w_b = beams.nu_b * eb;
    return beams;
}

std::pair<double, double> transmit_powers(const SinrTargets& targets, double norm_pa,
                                          double norm_pb, double u, double sigma2_a,
                                          double sigma2_b) {
    const double ga = targets.gamma_min_a;
    const double gb = targets.gamma_min_b;
    const double sin2 = 1.0 - u;
    const double denom = 1.0 + gb * sin2;
    const double p_a = (ga * sigma2_a / (norm_pa * norm_pa)) *
                       ((denom * (1.0 + gb) - gb * u) / (denom * denom));
    const double p_b = gb * sigma2_b / (norm_pb * norm_pb) +
                       (ga * sigma2_a / (norm_pa * norm_pa)) * gb * u / (denom * denom);
    return {p_a, p_b};
}

}  // namespace rislab::precoding
