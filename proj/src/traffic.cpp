#include "rislab/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rislab::traffic {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Dominant-eigenvalue magnitude by power iteration.
double spectral_radius_of(const RMat& w) {
    RVec v = RVec::Ones(w.rows()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        RVec next = w * v;
        const double norm = next.norm();
        if (norm < 1e-300) return 0.0;
        lambda = norm;
        v = next / norm;
    }
    return lambda;
}

void write_mat(std::ofstream& out, const RMat& m) {
    const auto rows = static_cast<std::uint64_t>(m.rows());
    const auto cols = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

RMat read_mat(std::ifstream& in) {
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    RMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            m(r, c) = v;
        }
    return m;
}

} // namespace

ReservoirState EsnModel::initial_state() const {
    ReservoirState s;
    s.x = RVec::Zero(cfg.reservoir_size);
    if (cfg.kind == NeuronKind::lstm_unit) s.c = RVec::Zero(cfg.reservoir_size);
    return s;
}

EsnModel init_reservoir(const EsnConfig& cfg, std::uint64_t seed) {
    if (cfg.reservoir_size < 1 || cfg.leakage <= 0.0 || cfg.leakage > 1.0 ||
        cfg.spectral_radius <= 0.0 || cfg.spectral_radius >= 1.0)
        throw ConfigError("init_reservoir: invalid configuration");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> prob(0.0, 1.0);

    EsnModel m;
    m.cfg = cfg;
    const Eigen::Index nx = cfg.reservoir_size;
    m.w_in = RMat(nx, 1 + cfg.n_inputs);
    for (Eigen::Index r = 0; r < nx; ++r)
        for (Eigen::Index c = 0; c < m.w_in.cols(); ++c)
            m.w_in(r, c) = cfg.input_scaling * unit(rng);

    // 10% density recurrent matrix, rescaled to the target spectral radius.
    m.w = RMat::Zero(nx, nx);
    for (Eigen::Index r = 0; r < nx; ++r)
        for (Eigen::Index c = 0; c < nx; ++c)
            if (prob(rng) < 0.10) m.w(r, c) = 0.5 * unit(rng);
    const double rho = spectral_radius_of(m.w);
    if (rho > 0.0) m.w *= cfg.spectral_radius / rho;

    if (cfg.kind == NeuronKind::lstm_unit) {
        m.gate_in_w = RVec(nx);
        m.gate_in_b = RVec(nx);
        m.gate_forget_w = RVec(nx);
        m.gate_forget_b = RVec(nx);
        m.gate_out_w = RVec(nx);
        m.gate_out_b = RVec(nx);
        std::uniform_real_distribution<double> small(-1.2, 1.2);
        std::uniform_real_distribution<double> forget_bias(0.5, 2.5);
        std::uniform_real_distribution<double> out_bias(1.0, 3.0);
        for (Eigen::Index i = 0; i < nx; ++i) {
            m.gate_forget_w(i) = small(rng);
            m.gate_forget_b(i) = forget_bias(rng);
            m.gate_in_w(i) = -m.gate_forget_w(i);  // coupled input/forget pair
            m.gate_in_b(i) = -m.gate_forget_b(i);
            m.gate_out_w(i) = small(rng);
            m.gate_out_b(i) = out_bias(rng);
        }
    }
    return m;
}

ReservoirState update_reservoir(const ReservoirState& state, const RVec& input,
                                const EsnModel& model) {
    const auto& cfg = model.cfg;
    if (input.size() != cfg.n_inputs)
        throw DimensionError("update_reservoir: input size mismatch");
    RVec biased(1 + cfg.n_inputs);
    biased(0) = 1.0;
    biased.tail(cfg.n_inputs) = input;
    const RVec z = model.w_in * biased + model.w * state.x;

    ReservoirState next;
    if (cfg.kind == NeuronKind::tanh_unit) {
        const RVec xt = z.array().tanh();
        next.x = (1.0 - cfg.leakage) * state.x + cfg.leakage * xt;
    } else {
        const RVec f = (model.gate_forget_w.cwiseProduct(z) + model.gate_forget_b)
                           .unaryExpr([](double v) { return sigmoid(v); });
        const RVec i = (model.gate_in_w.cwiseProduct(z) + model.gate_in_b)
                           .unaryExpr([](double v) { return sigmoid(v); });
        const RVec o = (model.gate_out_w.cwiseProduct(z) + model.gate_out_b)
                           .unaryExpr([](double v) { return sigmoid(v); });
        next.c = f.cwiseProduct(state.c) +
                 i.cwiseProduct(RVec(z.array().tanh()));
        const RVec xt = o.cwiseProduct(RVec(next.c.array().tanh()));
        next.x = (1.0 - cfg.leakage) * state.x + cfg.leakage * xt;
    }
    return next;
}

RMat train_readout(const RMat& features, const RMat& targets, double ridge) {
    if (features.cols() != targets.cols())
        throw DimensionError("train_readout: sample count mismatch");
    if (ridge <= 0.0 && features.cols() < features.rows())
        throw std::runtime_error(
            "train_readout: underdetermined system with zero regularization");
    const RMat gram =
        features * features.transpose() +
        ridge * RMat::Identity(features.rows(), features.rows());
    return targets * features.transpose() * gram.ldlt().solve(
               RMat::Identity(features.rows(), features.rows()));
}

TrafficTrace generate_trace(TraceKind kind, std::size_t length, std::uint64_t seed) {
    if (length < 1) throw ConfigError("generate_trace: length must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> log_noise(0.0, 0.05);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::exponential_distribution<double> spike(1.0);

    const double base = 1e6; // bits per interval
    const double p1 = phase(rng), p2 = phase(rng);

    TrafficTrace trace;
    trace.interval.reserve(length);
    trace.demand.reserve(length);
    for (std::size_t n = 0; n < length; ++n) {
        const double t = static_cast<double>(n);
        double d = base *
                   (1.0 + 0.4 * std::sin(2.0 * std::numbers::pi * t / 24.0 + p1) +
                    0.2 * std::sin(2.0 * std::numbers::pi * t / 168.0 + p2)) *
                   std::exp(log_noise(rng));
        if (kind == TraceKind::bursty && prob(rng) < 0.02) d += 2.0 * base * spike(rng);
        trace.interval.push_back(static_cast<long>(n));
        trace.demand.push_back(std::max(d, 0.0));
    }
    return trace;
}

TrafficTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trace: cannot open " + path);
    TrafficTrace trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("user_id", 0) == 0) continue;
        std::istringstream row(line);
        std::string uid, interval, demand;
        if (!std::getline(row, uid, ',') || !std::getline(row, interval, ',') ||
            !std::getline(row, demand))
            throw std::runtime_error("load_trace: malformed row at line " +
                                     std::to_string(line_no));
        try {
            trace.user_id = std::stoi(uid);
            const long n = std::stol(interval);
            const double d = std::stod(demand);
            if (!trace.interval.empty() && n <= trace.interval.back())
                throw std::runtime_error("non-increasing interval index");
            if (d < 0.0) throw std::runtime_error("negative demand");
            trace.interval.push_back(n);
            trace.demand.push_back(d);
        } catch (const std::exception& e) {
            throw std::runtime_error("load_trace: malformed row at line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    if (trace.demand.empty()) throw std::runtime_error("load_trace: empty trace");
    return trace;
}

void save_trace(const TrafficTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trace: cannot open " + path);
    out << "user_id,interval,demand_bits\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%ld,%.12g\n", trace.user_id,
                      trace.interval[i], trace.demand[i]);
        out << buf;
    }
}

EsnModel train_model(const EsnConfig& cfg, const TrafficTrace& trace,
                     std::uint64_t seed) {
    EsnModel model = init_reservoir(cfg, seed);
    const auto t_len = static_cast<long>(trace.size());
    const long first = cfg.washout;
    if (t_len - first - 1 < model.cfg.reservoir_size + cfg.n_inputs + 1)
        throw ConfigError("train_model: trace too short after washout");

    double mean = 0.0;
    for (double d : trace.demand) mean += d;
    mean /= static_cast<double>(trace.size());
    model.io_scale = mean > 0.0 ? mean : 1.0;

    const Eigen::Index rows = 1 + cfg.n_inputs + cfg.reservoir_size;
    RMat features(rows, t_len - first - 1);
    RMat targets(1, t_len - first - 1);
    ReservoirState state = model.initial_state();
    for (long n = 0; n < t_len - 1; ++n) {
        RVec u(1);
        u(0) = trace.demand[static_cast<std::size_t>(n)] / model.io_scale;
        state = update_reservoir(state, u, model);
        if (n >= first) {
            RVec col(rows);
            col(0) = 1.0;
            col(1) = u(0);
            col.tail(cfg.reservoir_size) = state.x;
            features.col(n - first) = col;
            targets(0, n - first) =
                trace.demand[static_cast<std::size_t>(n + 1)] / model.io_scale;
        }
    }
    model.w_out = train_readout(features, targets, cfg.ridge);
    model.trained = true;
    return model;
}

namespace {

double readout(const EsnModel& model, double u_scaled, const ReservoirState& state) {
    RVec col(1 + model.cfg.n_inputs + model.cfg.reservoir_size);
    col(0) = 1.0;
    col(1) = u_scaled;
    col.tail(model.cfg.reservoir_size) = state.x;
    return (model.w_out * col)(0);
}

} // namespace

std::vector<double> one_step_predictions(const EsnModel& model,
                                         const TrafficTrace& trace) {
    if (!model.trained) throw std::runtime_error("one_step_predictions: untrained model");
    std::vector<double> preds;
    ReservoirState state = model.initial_state();
    for (std::size_t n = 0; n + 1 < trace.size(); ++n) {
        RVec u(1);
        u(0) = trace.demand[n] / model.io_scale;
        state = update_reservoir(state, u, model);
        if (static_cast<long>(n) >= model.cfg.washout)
            preds.push_back(std::max(readout(model, u(0), state) * model.io_scale, 0.0));
    }
    return preds;
}

std::vector<double> predict(const EsnModel& model, const TrafficTrace& trace,
                            std::size_t horizon) {
    if (!model.trained) throw std::runtime_error("predict: untrained model");
    ReservoirState state = model.initial_state();
    double u_scaled = 0.0;
    for (std::size_t n = 0; n < trace.size(); ++n) {
        RVec u(1);
        u(0) = trace.demand[n] / model.io_scale;
        u_scaled = u(0);
        state = update_reservoir(state, u, model);
    }
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double y = std::max(readout(model, u_scaled, state), 0.0);
        out.push_back(y * model.io_scale);
        RVec u(1);
        u(0) = y;
        u_scaled = y;
        state = update_reservoir(state, u, model);
    }
    return out;
}

double nrmse(const std::vector<double>& predicted, const std::vector<double>& actual) {
    if (predicted.size() != actual.size() || predicted.empty())
        throw DimensionError("nrmse: length mismatch");
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double mse = 0.0, var = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        mse += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
        var += (actual[i] - mean) * (actual[i] - mean);
    }
    mse /= static_cast<double>(actual.size());
    var /= static_cast<double>(actual.size());
    if (var <= 0.0) return std::sqrt(mse);
    return std::sqrt(mse / var);
}

void save_model(const EsnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    const std::uint64_t kind = model.cfg.kind == NeuronKind::lstm_unit ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&kind), sizeof(kind));
    out.write(reinterpret_cast<const char*>(&model.cfg.leakage), sizeof(double));
    out.write(reinterpret_cast<const char*>(&model.io_scale), sizeof(double));
    write_mat(out, model.w_in);
    write_mat(out, model.w);
    write_mat(out, model.w_out);
    if (kind == 1) {
        write_mat(out, model.gate_in_w);
        write_mat(out, model.gate_in_b);
        write_mat(out, model.gate_forget_w);
        write_mat(out, model.gate_forget_b);
        write_mat(out, model.gate_out_w);
        write_mat(out, model.gate_out_b);
    }
}

EsnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::uint64_t kind = 0;
    in.read(reinterpret_cast<char*>(&kind), sizeof(kind));
    EsnModel m;
    m.cfg.kind = kind == 1 ? NeuronKind::lstm_unit : NeuronKind::tanh_unit;
    in.read(reinterpret_cast<char*>(&m.cfg.leakage), sizeof(double));
    in.read(reinterpret_cast<char*>(&m.io_scale), sizeof(double));
    m.w_in = read_mat(in);
    m.w = read_mat(in);
    m.w_out = read_mat(in);
    if (kind == 1) {
        m.gate_in_w = read_mat(in);
        m.gate_in_b = read_mat(in);
        m.gate_forget_w = read_mat(in);
        m.gate_forget_b = read_mat(in);
        m.gate_out_w = read_mat(in);
        m.gate_out_b = read_mat(in);
    }
    m.cfg.reservoir_size = m.w.rows();
    m.cfg.n_inputs = m.w_in.cols() - 1;
    m.trained = m.w_out.size() > 0;
    if (!in) throw std::runtime_error("load_model: truncated file " + path);
    return m;
}

}  // namespace rislab::traffic
