#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "declab/extension.hpp"

namespace declab {

// INI-style key = value file. Keys before the first [section] belong to section "".
// List values are comma separated; integer items may be ranges lo..hi or lo..hi:step.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const { return data_.count(section) != 0; }
    std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& section, const std::string& key, int64_t fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;

    std::vector<std::string> list(const std::string& section, const std::string& key,
                                  const std::vector<std::string>& fallback) const;
    std::vector<int64_t> int_list(const std::string& section, const std::string& key,
                                  const std::vector<int64_t>& fallback) const;
    std::vector<Rational> rational_list(const std::string& section, const std::string& key,
                                        const std::vector<Rational>& fallback) const;

    // Config error naming the first key outside `allowed`.
    void require_keys(const std::string& section, const std::vector<std::string>& allowed) const;
    std::vector<std::string> sections() const;

    // Sorted "section.key=value" lines; the digest input.
    std::string canonical() const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

int64_t parse_int(const std::string& s);
Rational parse_rational(const std::string& s);

}  // namespace declab
