#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pmp/error.hpp"

namespace pmp {

// Flat dotted-key configuration. Precedence: built-in defaults < config file
// < explicit overrides. Every default that mirrors a published constant
// (reward geometry, grid dimensions, retention quotas, step time) is pinned
// here and checked by tests.
class RunConfig {
public:
    RunConfig();

    void load_file(const std::string& path);       // file layer
    void set(const std::string& key, const std::string& value);  // override layer

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma separated

    // effective key/value view (defaults merged with file and overrides)
    std::map<std::string, std::string> effective() const;
    std::string canonical_text() const;
    uint64_t hash() const;  // FNV-1a over the canonical text

    static const std::map<std::string, std::string>& defaults();

private:
    std::map<std::string, std::string> file_;
    std::map<std::string, std::string> overrides_;
};

}  // namespace pmp
