#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nrssb/common.hpp"

namespace nrssb::bench {

/// Flat key = value configuration ('#' starts a comment). Flag overrides are
/// applied on top; every run writes its resolved config next to its outputs.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig from_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw config_error("cannot open config file: " + path);
        KvConfig cfg;
        std::string line;
        size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
            cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    std::string require(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw config_error("missing config key: " + key);
        return it->second;
    }

    double num(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse_num(key, it->second);
    }
    long integer(const std::string& key, long fallback) const {
        return static_cast<long>(num(key, static_cast<double>(fallback)));
    }
    bool flag(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw config_error("config key " + key + ": expected true/false");
    }

    std::vector<double> num_list(const std::string& key, const std::vector<double>& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) out.push_back(parse_num(key, tok));
        }
        if (out.empty()) throw config_error("config key " + key + ": empty list");
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw data_error("cannot write config: " + path);
        for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double parse_num(const std::string& key, const std::string& value) {
        try {
            size_t pos = 0;
            const double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw config_error("config key " + key + ": not a number: " + value);
        }
    }

    std::map<std::string, std::string> values_;
};

} // namespace nrssb::bench
