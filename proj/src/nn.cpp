#include "rislab/nn.hpp"

#include <cstdint>
#include <fstream>

namespace rislab::nn {

QNetworkParams init_params(const std::vector<Eigen::Index>& layer_sizes,
                           std::mt19937_64& rng) {
    if (layer_sizes.size() < 2)
        throw ConfigError("init_params: need at least input and output sizes");
    QNetworkParams p;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        const Eigen::Index fan_in = layer_sizes[i];
        const Eigen::Index fan_out = layer_sizes[i + 1];
        std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
        RMat w(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r)
            for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = gauss(rng);
        p.weights.push_back(std::move(w));
        p.biases.push_back(RVec::Zero(fan_out));
    }
    return p;
}

RVec forward(const QNetworkParams& params, const RVec& x) {
    if (x.size() != params.input_size())
        throw DimensionError("forward: input size mismatch");
    RVec a = x;
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        a = params.weights[i] * a + params.biases[i];
        if (i + 1 < params.num_layers()) a = a.cwiseMax(0.0);
    }
    return a;
}

RMat forward_batch(const QNetworkParams& params, const RMat& x) {
    if (x.rows() != params.input_size())
        throw DimensionError("forward_batch: input size mismatch");
    RMat a = x;
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        a = (params.weights[i] * a).colwise() + params.biases[i];
        if (i + 1 < params.num_layers()) a = a.cwiseMax(0.0);
    }
    return a;
}

std::pair<double, Gradient> loss_and_gradient(const QNetworkParams& params,
                                              const std::vector<TrainSample>& batch) {
    if (batch.empty()) throw std::domain_error("loss_and_gradient: empty batch");
    const std::size_t layers = params.num_layers();
    const auto n = static_cast<Eigen::Index>(batch.size());

    RMat x(params.input_size(), n);
    for (Eigen::Index j = 0; j < n; ++j) x.col(j) = batch[static_cast<std::size_t>(j)].x;

    // Forward pass, keeping pre-activation outputs per layer.
    std::vector<RMat> activations; // activations[i] = input to layer i
    activations.reserve(layers + 1);
    activations.push_back(x);
    RMat a = x;
    for (std::size_t i = 0; i < layers; ++i) {
        a = (params.weights[i] * a).colwise() + params.biases[i];
        if (i + 1 < layers) a = a.cwiseMax(0.0);
        activations.push_back(a);
    }

    // Loss restricted to the taken action's output, batch-averaged.
    const RMat& q = activations.back();
    double loss = 0.0;
    RMat delta = RMat::Zero(q.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& s = batch[static_cast<std::size_t>(j)];
        const double err = q(s.action, j) - s.target;
        loss += err * err;
        delta(s.action, j) = 2.0 * err / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);

    Gradient g;
    g.weights.resize(layers);
    g.biases.resize(layers);
    for (std::size_t i = layers; i-- > 0;) {
        g.weights[i] = delta * activations[i].transpose();
        g.biases[i] = delta.rowwise().sum();
        if (i > 0) {
            RMat back = params.weights[i].transpose() * delta;
            // ReLU mask from the stored post-activation of the previous layer.
            delta = back.cwiseProduct(
                (activations[i].array() > 0.0).cast<double>().matrix());
        }
    }
    return {loss, std::move(g)};
}

void apply_update(QNetworkParams& params, const Gradient& g, double alpha) {
    if (g.weights.size() != params.num_layers())
        throw DimensionError("apply_update: layer count mismatch");
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        params.weights[i] -= alpha * g.weights[i];
        params.biases[i] -= alpha * g.biases[i];
    }
}

void save_checkpoint(const QNetworkParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    const auto layers = static_cast<std::uint64_t>(params.num_layers());
    out.write(reinterpret_cast<const char*>(&layers), sizeof(layers));
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        const auto rows = static_cast<std::uint64_t>(params.weights[i].rows());
        const auto cols = static_cast<std::uint64_t>(params.weights[i].cols());
        out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        for (Eigen::Index r = 0; r < params.weights[i].rows(); ++r)
            for (Eigen::Index c = 0; c < params.weights[i].cols(); ++c) {
                const double v = params.weights[i](r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
        for (Eigen::Index r = 0; r < params.biases[i].size(); ++r) {
            const double v = params.biases[i](r);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    }
}

QNetworkParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::uint64_t layers = 0;
    in.read(reinterpret_cast<char*>(&layers), sizeof(layers));
    QNetworkParams p;
    for (std::uint64_t i = 0; i < layers; ++i) {
        std::uint64_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        RMat w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                double v = 0.0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                w(r, c) = v;
            }
        RVec b(static_cast<Eigen::Index>(rows));
        for (Eigen::Index r = 0; r < b.size(); ++r) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            b(r) = v;
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path);
    return p;
}

}  // namespace rislab::nn
