#pragma once

#include <map>
#include <string>
#include <vector>

#include "pshlab/core.hpp"

namespace pshlab {

/// Flat key-value experiment configuration with [section] headers. No
/// expression evaluation beyond the catalog grammar; values are strings,
/// typed on access.
class ExperimentConfig {
public:
    static ExperimentConfig parse_string(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    bool has(const std::string& sec, const std::string& key) const;
    std::string get(const std::string& sec, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& sec, const std::string& key) const;
    double get_num(const std::string& sec, const std::string& key, double fallback) const;
    double require_num(const std::string& sec, const std::string& key) const;
    int get_int(const std::string& sec, const std::string& key, int fallback) const;
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
    std::vector<double> get_num_list(const std::string& sec, const std::string& key) const;

    const std::string& raw_text() const { return raw_; }
    std::uint64_t hash() const { return fnv1a(raw_); }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string raw_;
};

}  // namespace pshlab
