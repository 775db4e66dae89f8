#pragma once

#include <random>
#include <string>
#include <vector>

#include "rislab/types.hpp"

namespace rislab::nn {

// Dense feedforward Q-network: affine layers with rectified-linear hidden
// activations and a linear output layer.
struct QNetworkParams {
    std::vector<RMat> weights; // layer i: (out x in)
    std::vector<RVec> biases;

    std::size_t num_layers() const { return weights.size(); }
    Eigen::Index input_size() const { return weights.front().cols(); }
    Eigen::Index output_size() const { return weights.back().rows(); }
};

// Normal(0, sqrt(2/fan_in)) weights, zero biases.
QNetworkParams init_params(const std::vector<Eigen::Index>& layer_sizes,
                           std::mt19937_64& rng);

RVec forward(const QNetworkParams& params, const RVec& x);

// Batched forward; columns of x are samples.
RMat forward_batch(const QNetworkParams& params, const RMat& x);

struct TrainSample {
    RVec x;
    Eigen::Index action = 0;
    double target = 0.0;
};

struct Gradient {
    std::vector<RMat> weights;
    std::vector<RVec> biases;
};

// Batch-mean squared error on the taken actions' outputs, with the full
// backpropagated gradient.
std::pair<double, Gradient> loss_and_gradient(const QNetworkParams& params,
                                              const std::vector<TrainSample>& batch);

// theta <- theta - alpha * g
void apply_update(QNetworkParams& params, const Gradient& g, double alpha);

// Flat binary checkpoint: dimensions header + row-major values.
void save_checkpoint(const QNetworkParams& params, const std::string& path);
QNetworkParams load_checkpoint(const std::string& path);

}  // namespace rislab::nn
