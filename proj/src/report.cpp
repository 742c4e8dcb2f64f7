#include "declab/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <sstream>

#include "declab/common.hpp"

namespace declab {

Value big(const BigInt& v) { return BigValue{v.str()}; }

const char* status_name(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Flag: return "flag";
    }
    return "fail";
}

Item& Item::set(const std::string& name, Value v) {
    for (auto& [k, old] : fields)
        if (k == name) {
            old = std::move(v);
            return *this;
        }
    fields.emplace_back(name, std::move(v));
    return *this;
}

const Value* Item::get(const std::string& name) const {
    for (const auto& [k, v] : fields)
        if (k == name) return &v;
    return nullptr;
}

void RunRecord::finalize() {
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
    pass = fail = flag = 0;
    for (const auto& it : items) {
        if (it.status == Status::Pass) ++pass;
        else if (it.status == Status::Fail) ++fail;
        else ++flag;
    }
}

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    fail(ErrorKind::Config, "unknown report format '" + s + "' (json, csv)");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

namespace {

std::string format_mantissa(long double m) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17Lg", m);
    return buf;
}

std::string value_json(const Value& v) {
    struct V {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return json_string(s); }
        std::string operator()(const ExtScalar& x) const {
            return "{\"mantissa\": " + format_mantissa(x.mantissa()) + ", \"exponent\": " + std::to_string(x.exponent()) + "}";
        }
        std::string operator()(const BigValue& b) const { return b.decimal; }
    };
    return std::visit(V{}, v);
}

std::string item_json(const Item& it) {
    std::string s = "{\"key\": " + json_string(it.key) + ", \"kind\": " + json_string(it.kind) +
                    ", \"status\": " + json_string(status_name(it.status)) + ", \"fields\": {";
    for (size_t i = 0; i < it.fields.size(); ++i) {
        if (i) s += ", ";
        s += json_string(it.fields[i].first) + ": " + value_json(it.fields[i].second);
    }
    s += "}";
    if (!it.error.empty()) s += ", \"error\": " + json_string(it.error);
    return s + "}";
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Column names and cell texts for one field; ExtScalars take two columns.
std::vector<std::pair<std::string, std::string>> csv_cells(const std::string& name, const Value& v) {
    if (const auto* x = std::get_if<ExtScalar>(&v))
        return {{name + ".mantissa", format_mantissa(x->mantissa())}, {name + ".exponent", std::to_string(x->exponent())}};
    if (const auto* s = std::get_if<std::string>(&v)) return {{name, *s}};
    std::string t = value_json(v);
    if (t.size() >= 2 && t.front() == '"') t = t.substr(1, t.size() - 2);
    return {{name, t}};
}

std::string emit_json(const RunRecord& rec) {
    std::string s = "{";
    if (!rec.suite.empty()) s += "\"suite\": " + json_string(rec.suite) + ", ";
    if (!rec.config_digest.empty()) s += "\"config_digest\": " + json_string(rec.config_digest) + ", ";
    if (!rec.timestamp.empty()) s += "\"timestamp\": " + json_string(rec.timestamp) + ", ";
    s += "\"items\": [";
    for (size_t i = 0; i < rec.items.size(); ++i) s += (i ? ",\n  " : "\n  ") + item_json(rec.items[i]);
    if (!rec.items.empty()) s += "\n";
    s += "], \"pass\": " + std::to_string(rec.pass) + ", \"fail\": " + std::to_string(rec.fail) +
         ", \"flag\": " + std::to_string(rec.flag) + "}";
    return s;
}

std::string emit_csv(const RunRecord& rec) {
    std::vector<std::string> cols = {"key", "kind", "status", "error"};
    std::map<std::string, size_t> index;
    std::vector<std::map<std::string, std::string>> rows;
    for (const auto& it : rec.items) {
        std::map<std::string, std::string> row = {
            {"key", it.key}, {"kind", it.kind}, {"status", status_name(it.status)}, {"error", it.error}};
        for (const auto& [name, v] : it.fields)
            for (auto& [col, text] : csv_cells(name, v)) {
                if (!index.count(col) && std::find(cols.begin(), cols.end(), col) == cols.end()) {
                    index[col] = cols.size();
                    cols.push_back(col);
                }
                row[col] = text;
            }
        rows.push_back(std::move(row));
    }
    std::string s;
    for (size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + csv_cell(cols[i]);
    s += "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < cols.size(); ++i) {
            auto f = row.find(cols[i]);
            s += (i ? "," : "") + (f == row.end() ? std::string() : csv_cell(f->second));
        }
        s += "\n";
    }
    return s;
}

}  // namespace

std::string emit_report(const RunRecord& rec, Format fmt) { return fmt == Format::Json ? emit_json(rec) : emit_csv(rec); }

std::string ratio_report_json(const RatioReport& r) {
    std::string s = "{\"functional\": " + json_string(r.functional) + ", \"params\": {";
    for (size_t i = 0; i < r.params.size(); ++i)
        s += (i ? ", " : "") + json_string(r.params[i].first) + ": " + json_string(r.params[i].second);
    s += "}, \"lhs\": " + format_double(r.lhs) + ", \"rhs\": " + format_double(r.rhs) + ", \"ratio\": " +
         format_double(r.ratio) + ", \"quad_error\": " + format_double(r.quad_error) +
         ", \"witness_ref\": " + json_string(r.witness_ref) + ", \"details\": {";
    for (size_t i = 0; i < r.details.size(); ++i)
        s += (i ? ", " : "") + json_string(r.details[i].first) + ": " + format_double(r.details[i].second);
    s += "}, \"flags\": [";
    for (size_t i = 0; i < r.flags.size(); ++i) s += (i ? ", " : "") + json_string(r.flags[i]);
    return s + "]}";
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::Config, "sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void add_ratio_fields(Item& item, const RatioReport& r) {
    item.set("functional", r.functional);
    for (const auto& [k, v] : r.params) item.set("param." + k, v);
    item.set("lhs", r.lhs).set("rhs", r.rhs).set("ratio", r.ratio).set("quad_error", r.quad_error);
    item.set("witness_ref", r.witness_ref);
    for (const auto& [k, v] : r.details) item.set("detail." + k, v);
    if (!r.flags.empty()) {
        std::string f;
        for (const auto& x : r.flags) f += (f.empty() ? "" : "|") + x;
        item.set("flags", f);
    }
}

}  // namespace declab
