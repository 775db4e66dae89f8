#pragma once

#include <cstddef>

#include "rislab/types.hpp"

namespace rislab::metrics {

struct MosParams {
    double lambda = 1.0;
    double tau = 1.0;
    double q_min = 1.0;
    double q_max = 4.5;
};

// Calibrate so mos(r_min)=q_min and mos(r_max)=q_max.
MosParams calibrate_mos(double r_min, double r_max, double q_min = 1.0,
                        double q_max = 4.5);

// clamp(lambda * log10(tau * rate), q_min, q_max); rate <= 0 floors at q_min.
double mos(double rate, const MosParams& p);

struct PowerModel {
    double p_mu = 0.01;    // per-device hardware power, W
    double p_bs = 7.943;   // BS hardware power, W
    double p_n = 0.25;     // per-varactor power, W
    double p_max = 0.1;    // BS transmit cap, W
};

// sum ||w||^2 + K*p_mu + p_bs + N*p_n
double total_power(double beam_power_sum, std::size_t k, std::size_t n,
                   const PowerModel& pm);

// sum_mos / total_power, MOS per Joule-second.
double energy_efficiency(double sum_mos, double total_power);

// Per-slot energy-efficiency difference.
double step_reward(double ee_now, double ee_prev);

}  // namespace rislab::metrics
