#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pshlab {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
}  // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    ExperimentConfig cfg;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InvalidArgument("config line " + std::to_string(line_no) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
        cfg.sections_[section][key] = val;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool ExperimentConfig::has(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& sec, const std::string& key,
                                  const std::string& fallback) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

std::string ExperimentConfig::require(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) throw InvalidArgument("config: missing [" + sec + "] " + key);
    return get(sec, key, "");
}

double ExperimentConfig::get_num(const std::string& sec, const std::string& key,
                                 double fallback) const {
    if (!has(sec, key)) return fallback;
    return require_num(sec, key);
}

double ExperimentConfig::require_num(const std::string& sec, const std::string& key) const {
    const std::string v = require(sec, key);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw InvalidArgument("config: [" + sec + "] " + key + " is not a number: " + v);
    return x;
}

int ExperimentConfig::get_int(const std::string& sec, const std::string& key, int fallback) const {
    return static_cast<int>(get_num(sec, key, fallback));
}

bool ExperimentConfig::get_bool(const std::string& sec, const std::string& key,
                                bool fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string v = get(sec, key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidArgument("config: [" + sec + "] " + key + " is not a boolean: " + v);
}

std::vector<double> ExperimentConfig::get_num_list(const std::string& sec,
                                                   const std::string& key) const {
    std::vector<double> out;
    if (!has(sec, key)) return out;
    std::istringstream ss(get(sec, key, ""));
    std::string tok;
    while (ss >> tok) {
        char* end = nullptr;
        const double x = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw InvalidArgument("config: [" + sec + "] " + key + " has a non-numeric entry: " + tok);
        out.push_back(x);
    }
    return out;
}

}  // namespace pshlab
