#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rislab/harness.hpp"

using namespace rislab;
using namespace rislab::harness;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("results CSV round trip") {
    const std::vector<ResultRow> rows{
        {"noma_ph", 0.1, 1, 0.723456789012, 2.5, 12.103},
        {"oma", 0.2, 2, 0.5, 1.0, 9.0},
    };
    const std::string path = "/tmp/rislab_test_results.csv";
    write_results_csv(rows, path);
    const auto back = read_results_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].variant == "noma_ph");
    CHECK(back[0].mean_ee == doctest::Approx(rows[0].mean_ee).epsilon(1e-12));
    CHECK(back[1].seed == 2);
    std::remove(path.c_str());
}

TEST_CASE("summary averages rows per variant and grid point") {
    std::vector<ResultRow> rows{
        {"a", 1.0, 1, 2.0, 0, 0},
        {"a", 1.0, 2, 4.0, 0, 0},
        {"b", 1.0, 1, 1.0, 0, 0},
    };
    const auto s = summarize(rows);
    REQUIRE(s.size() == 2);
    CHECK(s[0].variant == "a");
    CHECK(s[0].mean_ee == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s[0].seed == 0);
    CHECK(s[1].mean_ee == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("presets are well formed") {
    const auto f4 = make_preset("fig4");
    CHECK(f4.sweep == Sweep::transmit_power);
    CHECK(f4.grid.size() == 8);
    CHECK(f4.variants == std::vector<std::string>{"noma_ph", "noma_zf", "oma"});
    const auto f6 = make_preset("fig6");
    CHECK(f6.sweep == Sweep::n_elements);
    CHECK(f6.grid == std::vector<double>{2, 4, 8, 12, 16, 24});
    const auto f5 = make_preset("fig5");
    CHECK(f5.variants.front() == "learned");
    CHECK_THROWS(make_preset("fig99"));
}

TEST_CASE("budget evaluators produce finite physical numbers") {
    auto spec = make_preset("fig4");
    env::Env e(spec.scene);
    const auto s = e.reset(21);
    for (auto* f : {&eval_ph_at_power, &eval_zf_at_power, &eval_oma_at_power}) {
        const auto pe = (*f)(e, s, 0.01);
        CHECK(std::isfinite(pe.ee));
        CHECK(pe.ee > 0.0);
        CHECK(pe.sum_mos >= e.config().n_users * 1.0);
        CHECK(pe.sum_mos <= e.config().n_users * 4.5);
        CHECK(pe.total_power > 0.0);
    }
}

TEST_CASE("more budget never hurts the PH allocator") {
    auto spec = make_preset("fig4");
    env::Env e(spec.scene);
    const auto s = e.reset(23);
    double prev = 0.0;
    for (double p : {1e-3, 1e-2, 1e-1, 1.0}) {
        const double m = eval_ph_at_power(e, s, p).sum_mos;
        CHECK(m >= prev - 1e-9);
        prev = m;
    }
}

TEST_CASE("experiment reruns are byte identical") {
    auto spec = make_preset("fig4");
    spec.seeds = {5};
    spec.realizations = 3;
    spec.grid = {dbm_to_watts(10.0), dbm_to_watts(20.0)};
    spec.out_dir = "/tmp/rislab_test_exp_a";
    std::filesystem::create_directories(spec.out_dir);
    run_experiment(spec);
    const std::string a = slurp(spec.out_dir + "/results.csv");
    spec.out_dir = "/tmp/rislab_test_exp_b";
    std::filesystem::create_directories(spec.out_dir);
    run_experiment(spec);
    const std::string b = slurp(spec.out_dir + "/results.csv");
    CHECK(a.size() > 0);
    CHECK(a == b);
}

TEST_CASE("config files build experiment specs") {
    const auto kv = config::parse_string(
        "[scene]\n"
        "n_users = 4\n"
        "[experiment]\n"
        "sweep = transmit_power\n"
        "grid_dbm = 0, 10\n"
        "seeds = 1, 2\n"
        "variants = noma_ph, oma\n"
        "realizations = 2\n");
    const auto spec = spec_from(kv);
    CHECK(spec.sweep == Sweep::transmit_power);
    REQUIRE(spec.grid.size() == 2);
    CHECK(spec.grid[1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(spec.variants == std::vector<std::string>{"noma_ph", "oma"});
}
