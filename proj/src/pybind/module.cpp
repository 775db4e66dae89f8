#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rislab/channel.hpp"
#include "rislab/env.hpp"
#include "rislab/harness.hpp"
#include "rislab/metrics.hpp"
#include "rislab/precoding.hpp"
#include "rislab/rl.hpp"
#include "rislab/traffic.hpp"

namespace py = pybind11;
using namespace rislab;

namespace {

env::SceneConfig default_scene() { return harness::make_preset("fig5").scene; }

}  // namespace

PYBIND11_MODULE(_rislab, m) {
    m.doc() = "RIS-assisted downlink simulation lab";

    m.def("path_loss",
          [](double d, double c0, double d0, double exponent) {
              return channel::path_loss(d, {c0, d0, exponent});
          },
          py::arg("d"), py::arg("c0") = 1e-3, py::arg("d0") = 1.0,
          py::arg("exponent") = 3.5);
    m.def("rate_to_sinr_target", &precoding::rate_to_sinr_target, py::arg("rate"),
          py::arg("bandwidth"));
    m.def("pseudo_inverse", &precoding::pseudo_inverse, py::arg("h"),
          py::arg("cond_cap") = 1e12);
    m.def("orthogonal_projection", &precoding::orthogonal_projection, py::arg("h_hat"),
          py::arg("cond_cap") = 1e12);
    m.def("channel_correlation", &precoding::channel_correlation, py::arg("h_a"),
          py::arg("h_b"));
    m.def("ph_beams",
          [](const CVec& h_a, const CVec& h_b, const CMat& p_perp, double gamma_a,
             double gamma_b, double sigma2) {
              const auto b = precoding::ph_noma_precoder(h_a, h_b, p_perp,
                                                         {gamma_a, gamma_b}, sigma2,
                                                         sigma2);
              return py::make_tuple(b.w_a, b.w_b, b.u);
          },
          py::arg("h_a"), py::arg("h_b"), py::arg("p_perp"), py::arg("gamma_a"),
          py::arg("gamma_b"), py::arg("sigma2") = 1.0);

    m.def("mos",
          [](double rate, double r_min, double r_max) {
              return metrics::mos(rate, metrics::calibrate_mos(r_min, r_max));
          },
          py::arg("rate"), py::arg("r_min") = 1e5, py::arg("r_max") = 1e7);
    m.def("total_power",
          [](double beam_sum, std::size_t k, std::size_t n) {
              return metrics::total_power(beam_sum, k, n, metrics::PowerModel{});
          },
          py::arg("beam_power_sum"), py::arg("k"), py::arg("n"));
    m.def("energy_efficiency", &metrics::energy_efficiency, py::arg("sum_mos"),
          py::arg("total_power"));

    m.def("epsilon_at",
          [](double a, double b, int c, int m2) {
              return rl::EpsilonSchedule{a, b, c}.at(m2);
          },
          py::arg("a"), py::arg("b"), py::arg("c"), py::arg("m"));

    py::class_<env::Env>(m, "Env")
        .def(py::init([]() { return env::Env(default_scene()); }))
        .def("reset", [](env::Env& e, std::uint64_t seed) { e.reset(seed); },
             py::arg("seed"))
        .def("step",
             [](env::Env& e, std::size_t a) {
                 const auto r = e.step(a);
                 return py::make_tuple(r.reward, r.rejected, r.degraded);
             },
             py::arg("action"))
        .def("encode_state", &env::Env::encode_state)
        .def("num_actions", &env::Env::num_actions)
        .def("current_ee", &env::Env::current_ee);

    m.def("traffic_nrmse",
          [](std::size_t length, std::uint64_t seed, const std::string& kind) {
              const auto trace = traffic::generate_trace(
                  kind == "bursty" ? traffic::TraceKind::bursty
                                   : traffic::TraceKind::diurnal,
                  length, seed);
              traffic::EsnConfig cfg;
              cfg.kind = traffic::NeuronKind::lstm_unit;
              const auto model = traffic::train_model(cfg, trace, seed);
              const auto pred = traffic::one_step_predictions(model, trace);
              std::vector<double> actual(
                  trace.demand.end() - static_cast<long>(pred.size()),
                  trace.demand.end());
              return traffic::nrmse(pred, actual);
          },
          py::arg("length") = 1200, py::arg("seed") = 7, py::arg("kind") = "diurnal");
}
