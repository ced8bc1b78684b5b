#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mimic/types.hpp"

namespace mimic {

// Flat key-value config: one `key = value` per line, `#` comments, values
// may be a single token or a space-separated numeric list.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("config: cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str(), path);
    }

    static Config from_string(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.entries_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ParseError("config: missing key " + key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : parse_double(key, it->second);
    }

    int get_int(const std::string& key, int fallback) const {
        return static_cast<int>(get_double(key, static_cast<double>(fallback)));
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ParseError("config: key " + key + " is not a boolean: " + v);
    }

    Vec3 get_vec3(const std::string& key, const Vec3& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const auto nums = parse_list(key, it->second);
        if (nums.size() != 3) throw ParseError("config: key " + key + " needs 3 values");
        return Vec3(nums[0], nums[1], nums[2]);
    }

    Vec4 get_vec4(const std::string& key, const Vec4& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const auto nums = parse_list(key, it->second);
        if (nums.size() != 4) throw ParseError("config: key " + key + " needs 4 values");
        return Vec4(nums[0], nums[1], nums[2], nums[3]);
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static double parse_double(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        double d;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ParseError("config: key " + key + " is not numeric: " + v);
        }
        if (pos != v.size())
            throw ParseError("config: key " + key + " has trailing characters: " + v);
        return d;
    }

    static std::vector<double> parse_list(const std::string& key, const std::string& v) {
        std::istringstream in(v);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(parse_double(key, tok));
        return out;
    }

    std::map<std::string, std::string> entries_;
};

}  // namespace mimic
