#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rislab/env.hpp"
#include "rislab/rl.hpp"

namespace rislab::config {

// Flat key-value text with [section] headers; repeated keys are kept.
class KvFile {
  public:
    void add(const std::string& section, const std::string& key,
             const std::string& value) {
        sections_[section].emplace_back(key, value);
    }
    std::optional<std::string> get(const std::string& section,
                                   const std::string& key) const;
    std::vector<std::string> get_all(const std::string& section,
                                     const std::string& key) const;

  private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

KvFile parse_string(const std::string& text);
KvFile parse_file(const std::string& path);

// "20 dBm" / "9 dBW" / plain watts.
double parse_power_watts(const std::string& value);
// "-30 dB" to linear; plain values pass through.
double parse_db_linear(const std::string& value);

std::vector<double> parse_list(const std::string& value);

env::SceneConfig scene_from(const KvFile& kv);
rl::AgentConfig agent_from(const KvFile& kv);

}  // namespace rislab::config
