#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rislab/types.hpp"

namespace rislab::traffic {

enum class NeuronKind { tanh_unit, lstm_unit };

struct EsnConfig {
    Eigen::Index reservoir_size = 200; // N_x
    double leakage = 0.3;              // alpha in (0, 1]
    double spectral_radius = 0.9;      // target for the recurrent matrix
    double input_scaling = 0.5;
    double ridge = 1e-6;               // readout regularization
    NeuronKind kind = NeuronKind::tanh_unit;
    Eigen::Index n_inputs = 1;         // N_u
    int washout = 100;
};

struct ReservoirState {
    RVec x; // neuron outputs
    RVec c; // cell state, lstm kind only
};

// Fixed random weights; only the readout is ever trained.
struct EsnModel {
    EsnConfig cfg;
    RMat w_in;  // N_x x (1 + N_u)
    RMat w;     // N_x x N_x, sparse, rescaled to the target spectral radius
    // lstm kind: per-neuron gate affine maps of the shared preactivation.
    RVec gate_in_w, gate_in_b;
    RVec gate_forget_w, gate_forget_b;
    RVec gate_out_w, gate_out_b;
    RMat w_out; // N_y x (1 + N_u + N_x), empty until trained
    double io_scale = 1.0; // demand normalization fitted at training
    bool trained = false;

    ReservoirState initial_state() const;
};

EsnModel init_reservoir(const EsnConfig& cfg, std::uint64_t seed);

ReservoirState update_reservoir(const ReservoirState& state, const RVec& input,
                                const EsnModel& model);

// Ridge regression on columns [1; u; x]; throws when lambda = 0 and the
// system is underdetermined.
RMat train_readout(const RMat& features, const RMat& targets, double ridge);

struct TrafficTrace {
    std::vector<long> interval;  // strictly increasing
    std::vector<double> demand;  // bits per interval, >= 0
    double interval_seconds = 3600.0;
    int user_id = 0;

    std::size_t size() const { return demand.size(); }
};

enum class TraceKind { diurnal, bursty };

// diurnal: 24- and 168-period sinusoids with lognormal noise; bursty adds
// Poisson spikes.
TrafficTrace generate_trace(TraceKind kind, std::size_t length, std::uint64_t seed);

// CSV schema: user_id,interval,demand_bits
TrafficTrace load_trace(const std::string& path);
void save_trace(const TrafficTrace& trace, const std::string& path);

// Drives the reservoir over the trace and fits the one-step-ahead readout.
EsnModel train_model(const EsnConfig& cfg, const TrafficTrace& trace,
                     std::uint64_t seed);

// One-step-ahead predictions for trace positions [washout+1, size).
std::vector<double> one_step_predictions(const EsnModel& model,
                                         const TrafficTrace& trace);

// Warm up on the trace then roll forward autoregressively; clamped at >= 0.
std::vector<double> predict(const EsnModel& model, const TrafficTrace& trace,
                            std::size_t horizon);

double nrmse(const std::vector<double>& predicted, const std::vector<double>& actual);

void save_model(const EsnModel& model, const std::string& path);
EsnModel load_model(const std::string& path);

}  // namespace rislab::traffic
