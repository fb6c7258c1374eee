#pragma once

// Plain-text `key = value` configuration files. `#` starts a comment; blank lines are ignored.

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ela/csv.hpp"
#include "ela/error.hpp"

namespace ela {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in) {
        KeyValueConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto body = csv::trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            const auto key = std::string(csv::trim(body.substr(0, eq)));
            const auto value = std::string(csv::trim(body.substr(eq + 1)));
            if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (!cfg.values_.emplace(key, value).second)
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path);
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& def) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? def : it->second;
    }

    double get_double(const std::string& key, double def) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        double v = 0.0;
        if (!csv::parse_double(it->second, v)) throw ConfigError("config key '" + key + "': not a number");
        return v;
    }

    template <typename Int>
    Int get_int(const std::string& key, Int def) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        Int v{};
        if (!csv::parse_int(it->second, v)) throw ConfigError("config key '" + key + "': not an integer");
        return v;
    }

    bool get_bool(const std::string& key, bool def) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        const auto& v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key '" + key + "': not a boolean");
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> def) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        std::vector<double> out;
        for (auto f : csv::split(it->second)) {
            double v = 0.0;
            if (!csv::parse_double(f, v)) throw ConfigError("config key '" + key + "': bad number '" + std::string(f) + "'");
            out.push_back(v);
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> def) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        std::vector<std::string> out;
        for (auto f : csv::split(it->second))
            if (!f.empty()) out.emplace_back(f);
        return out;
    }

    /// Keys present in the file that no getter has asked for.
    std::vector<std::string> unused_keys() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

}  // namespace ela
