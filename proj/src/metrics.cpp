#include "rislab/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rislab::metrics {

MosParams calibrate_mos(double r_min, double r_max, double q_min, double q_max) {
    if (r_min <= 0.0 || r_max <= r_min || q_max <= q_min)
        throw std::domain_error("calibrate_mos: invalid calibration range");
    MosParams p;
    p.q_min = q_min;
    p.q_max = q_max;
    p.lambda = (q_max - q_min) / std::log10(r_max / r_min);
    p.tau = std::pow(10.0, q_min / p.lambda) / r_min;
    return p;
}

double mos(double rate, const MosParams& p) {
    if (rate <= 0.0) return p.q_min;
    const double q = p.lambda * std::log10(p.tau * rate);
    return std::clamp(q, p.q_min, p.q_max);
}

double total_power(double beam_power_sum, std::size_t k, std::size_t n,
                   const PowerModel& pm) {
    if (beam_power_sum < 0.0)
        throw std::domain_error("total_power: negative transmit power");
    return beam_power_sum + static_cast<double>(k) * pm.p_mu + pm.p_bs +
           static_cast<double>(n) * pm.p_n;
}

double energy_efficiency(double sum_mos, double power) {
    if (power <= 0.0) throw std::domain_error("energy_efficiency: non-positive power");
    return sum_mos / power;
}

double step_reward(double ee_now, double ee_prev) { return ee_now - ee_prev; }

}  // namespace rislab::metrics
