#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace liouville {

// Flat key=value configuration. Lines starting with '#' are comments.
class ConfigMap {
  public:
    ConfigMap() = default;

    static ConfigMap parse(const std::string& text);
    static ConfigMap load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, int value);

    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key) const;
    double get_num(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    // Positive-valued tolerance/size parameters.
    double get_pos(const std::string& key, double fallback) const;

    // Throws std::invalid_argument naming the first key not in `allowed`.
    void validate_keys(const std::set<std::string>& allowed) const;

    std::string serialize() const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace liouville
