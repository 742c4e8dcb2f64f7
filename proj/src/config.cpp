#include "declab/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "declab/common.hpp"

namespace declab {

namespace pt = boost::property_tree;

int64_t parse_int(const std::string& s) {
    std::string t = boost::trim_copy(s);
    int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) fail(ErrorKind::Config, "not an integer: '" + s + "'");
    return v;
}

Rational parse_rational(const std::string& s) {
    std::string t = boost::trim_copy(s);
    auto slash = t.find('/');
    if (slash == std::string::npos) return Rational(parse_int(t));
    int64_t d = parse_int(t.substr(slash + 1));
    if (d == 0) fail(ErrorKind::Config, "zero denominator in '" + s + "'");
    return Rational(parse_int(t.substr(0, slash)), d);
}

Config Config::parse(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Config, std::string("config parse error: ") + e.what());
    }
    Config c;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            c.data_[""][name] = boost::trim_copy(node.data());
            continue;
        }
        auto& sec = c.data_[name];
        for (const auto& [k, v] : node) sec[k] = boost::trim_copy(v.data());
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key);
}

std::string Config::get(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? data_.at(section).at(key) : fallback;
}

int64_t Config::get_int(const std::string& section, const std::string& key, int64_t fallback) const {
    return has(section, key) ? parse_int(data_.at(section).at(key)) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& s = data_.at(section).at(key);
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Config, section + "." + key + ": not a number: '" + s + "'");
}

std::vector<std::string> Config::list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<std::string> parts, out;
    const std::string& s = data_.at(section).at(key);
    if (boost::trim_copy(s).empty()) return out;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) {
        boost::trim(p);
        if (p.empty()) fail(ErrorKind::Config, section + "." + key + ": empty list entry");
        out.push_back(p);
    }
    return out;
}

std::vector<int64_t> Config::int_list(const std::string& section, const std::string& key,
                                      const std::vector<int64_t>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<int64_t> out;
    for (const auto& item : list(section, key, {})) {
        auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_int(item));
            continue;
        }
        std::string rest = item.substr(dots + 2);
        int64_t step = 1;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            step = parse_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        int64_t lo = parse_int(item.substr(0, dots)), hi = parse_int(rest);
        if (step <= 0 || hi < lo || (hi - lo) / step > 1'000'000)
            fail(ErrorKind::Config, section + "." + key + ": bad range '" + item + "'");
        for (int64_t v = lo; v <= hi; v += step) out.push_back(v);
    }
    return out;
}

std::vector<Rational> Config::rational_list(const std::string& section, const std::string& key,
                                            const std::vector<Rational>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<Rational> out;
    for (const auto& item : list(section, key, {})) out.push_back(parse_rational(item));
    return out;
}

void Config::require_keys(const std::string& section, const std::vector<std::string>& allowed) const {
    auto s = data_.find(section);
    if (s == data_.end()) return;
    for (const auto& [k, v] : s->second)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            fail(ErrorKind::Config, "unknown key '" + k + "' in section [" + section + "]");
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : data_) out.push_back(k);
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [sec, kv] : data_)
        for (const auto& [k, v] : kv) out += sec + "." + k + "=" + v + "\n";
    return out;
}

}  // namespace declab
