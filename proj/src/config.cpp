#include "liouville/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "liouville/util.hpp"

namespace liouville {

ConfigMap ConfigMap::parse(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            size_t x = s.find_first_not_of(" \t");
            size_t y = s.find_last_not_of(" \t");
            s = (x == std::string::npos) ? "" : s.substr(x, y - x + 1);
        };
        strip(key);
        strip(val);
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = val;
    }
    return cfg;
}

ConfigMap ConfigMap::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void ConfigMap::set(const std::string& key, double value) { kv_[key] = num_str(value); }
void ConfigMap::set(const std::string& key, int value) { kv_[key] = std::to_string(value); }

std::string ConfigMap::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
}

std::string ConfigMap::get_str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double ConfigMap::get_num(const std::string& key) const {
    std::string s = get_str(key);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("config key " + key + ": not a number: " + s);
    return v;
}

double ConfigMap::get_num(const std::string& key, double fallback) const {
    return has(key) ? get_num(key) : fallback;
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    double v = get_num(key);
    return static_cast<int>(v);
}

double ConfigMap::get_pos(const std::string& key, double fallback) const {
    double v = get_num(key, fallback);
    if (!(v > 0)) throw std::invalid_argument("config key " + key + ": must be positive");
    return v;
}

void ConfigMap::validate_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : kv_)
        if (!allowed.count(k)) throw std::invalid_argument("unknown config key: " + k);
}

std::string ConfigMap::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";
    return out.str();
}

}  // namespace liouville
