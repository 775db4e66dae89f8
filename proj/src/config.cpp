#include "rislab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rislab::config {

namespace {

std::string trim(const std::string& s) {
    auto b = s.begin(), e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return {b, e};
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)).size() > 0)
        throw ConfigError("config: trailing characters in number '" + s + "'");
    return v;
}

}  // namespace

std::optional<std::string> KvFile::get(const std::string& section,
                                       const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    std::optional<std::string> out;
    for (const auto& [k, v] : it->second)
        if (k == key) out = v; // last one wins
    return out;
}

std::vector<std::string> KvFile::get_all(const std::string& section,
                                         const std::string& key) const {
    std::vector<std::string> out;
    auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& [k, v] : it->second)
        if (k == key) out.push_back(v);
    return out;
}

KvFile parse_string(const std::string& text) {
    KvFile kv;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        kv.add(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

KvFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

double parse_power_watts(const std::string& value) {
    const std::string v = trim(value);
    auto ends_with = [&](const std::string& suf) {
        return v.size() > suf.size() &&
               std::equal(suf.rbegin(), suf.rend(), v.rbegin(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    };
    if (ends_with("dbm")) return dbm_to_watts(to_double(v.substr(0, v.size() - 3)));
    if (ends_with("dbw")) return dbw_to_watts(to_double(v.substr(0, v.size() - 3)));
    if (ends_with("w") && !ends_with("dbw"))
        return to_double(v.substr(0, v.size() - 1));
    return to_double(v);
}

double parse_db_linear(const std::string& value) {
    const std::string v = trim(value);
    if (v.size() > 2) {
        std::string suf = v.substr(v.size() - 2);
        for (auto& c : suf) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (suf == "db") return db_to_linear(to_double(v.substr(0, v.size() - 2)));
    }
    return to_double(v);
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(to_double(tok));
    }
    return out;
}

env::SceneConfig scene_from(const KvFile& kv) {
    env::SceneConfig sc;
    auto num = [&](const char* key, double& dst) {
        if (auto v = kv.get("scene", key)) dst = to_double(*v);
    };
    auto idx = [&](const char* key, std::size_t& dst) {
        if (auto v = kv.get("scene", key)) {
            const double d = to_double(*v);
            if (d < 0 || d != std::floor(d))
                throw ConfigError(std::string("config: ") + key +
                                  " must be a non-negative integer");
            dst = static_cast<std::size_t>(d);
        }
    };
    num("region_side", sc.region_side);
    num("bs_x", sc.bs_pos.x);
    num("bs_y", sc.bs_pos.y);
    num("bs_z", sc.bs_pos.z);
    idx("n_elements", sc.n_elements);
    idx("n_users", sc.n_users);
    idx("m_antennas", sc.m_antennas);
    num("bandwidth", sc.bandwidth);
    num("noise_density_dbm_hz", sc.noise_density_dbm_hz);
    num("rician_k", sc.rician_k);
    num("direct_blockage_db", sc.direct_blockage_db);
    num("rate_floor", sc.rate_floor);
    num("target_step_db", sc.target_step_db);
    num("exponent_bs_mu", sc.pl_bs_mu.alpha);
    num("exponent_bs_ris", sc.pl_bs_ris.alpha);
    num("exponent_ris_mu", sc.pl_ris_mu.alpha);
    if (auto v = kv.get("scene", "c0")) {
        const double c0 = parse_db_linear(*v);
        sc.pl_bs_mu.c0 = sc.pl_bs_ris.c0 = sc.pl_ris_mu.c0 = c0;
    }
    if (auto v = kv.get("scene", "p_max")) sc.power.p_max = parse_power_watts(*v);
    if (auto v = kv.get("scene", "p_bs")) sc.power.p_bs = parse_power_watts(*v);
    if (auto v = kv.get("scene", "p_mu")) sc.power.p_mu = parse_power_watts(*v);
    if (auto v = kv.get("scene", "p_n")) sc.power.p_n = parse_power_watts(*v);
    if (auto v = kv.get("scene", "mode")) {
        if (*v == "zf")
            sc.mode = env::PrecodingMode::zf;
        else if (*v == "ph_noma")
            sc.mode = env::PrecodingMode::ph_noma;
        else
            throw ConfigError("config: unknown mode '" + *v + "'");
    }
    if (auto v = kv.get("scene", "dynamic_decoding"))
        sc.dynamic_decoding = (*v == "true" || *v == "1");
    double r_lo = 1e5, r_hi = 1e7;
    num("mos_rate_min", r_lo);
    num("mos_rate_max", r_hi);
    sc.mos = metrics::calibrate_mos(r_lo, r_hi);
    for (const auto& f : kv.get_all("scene", "facade")) {
        const auto v = parse_list(f);
        if (v.size() != 6)
            throw ConfigError("config: facade needs x0,x1,y0,y1,z0,z1");
        sc.facades.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return sc;
}

rl::AgentConfig agent_from(const KvFile& kv) {
    rl::AgentConfig ac;
    auto num = [&](const char* key, double& dst) {
        if (auto v = kv.get("agent", key)) dst = to_double(*v);
    };
    auto integer = [&](const char* key, int& dst) {
        if (auto v = kv.get("agent", key)) dst = static_cast<int>(to_double(*v));
    };
    if (auto v = kv.get("agent", "kind")) {
        if (*v == "q_table")
            ac.kind = rl::AgentKind::q_table;
        else if (*v == "dqn")
            ac.kind = rl::AgentKind::dqn;
        else if (*v == "ddqn")
            ac.kind = rl::AgentKind::ddqn;
        else if (*v == "d3qn")
            ac.kind = rl::AgentKind::d3qn;
        else
            throw ConfigError("config: unknown agent kind '" + *v + "'");
    }
    num("learning_rate", ac.learning_rate);
    num("discount", ac.discount);
    integer("target_sync", ac.target_sync);
    integer("batch_size", ac.batch_size);
    integer("warmup", ac.warmup);
    if (auto v = kv.get("agent", "buffer_capacity"))
        ac.buffer_capacity = static_cast<std::size_t>(to_double(*v));
    if (auto v = kv.get("agent", "hidden")) {
        ac.hidden.clear();
        for (double d : parse_list(*v))
            ac.hidden.push_back(static_cast<Eigen::Index>(d));
    }
    if (auto v = kv.get("agent", "epsilon")) {
        ac.eps.decaying = false;
        ac.eps.fixed_eps = to_double(*v);
    }
    num("eps_a", ac.eps.schedule.a);
    num("eps_b", ac.eps.schedule.b);
    integer("eps_c", ac.eps.schedule.c);
    return ac;
}

}  // namespace rislab::config
