#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "declab/arith.hpp"
#include "declab/extscalar.hpp"
#include "declab/functionals.hpp"

namespace declab {

// Big integers travel as exact decimal strings tagged so they serialise unquoted.
struct BigValue {
    std::string decimal;
};
using Value = std::variant<bool, int64_t, double, std::string, ExtScalar, BigValue>;
Value big(const BigInt& v);

enum class Status { Pass, Fail, Flag };
const char* status_name(Status s);

struct Item {
    std::string key;  // aggregation order
    std::string kind;
    Status status = Status::Pass;
    std::vector<std::pair<std::string, Value>> fields;
    std::string error;  // non-empty when the item could not be evaluated

    Item& set(const std::string& name, Value v);
    const Value* get(const std::string& name) const;
};

struct RunRecord {
    std::string suite;
    std::string config_digest;
    std::string timestamp;  // never part of the digest; omitted from reports when empty
    std::vector<Item> items;
    int pass = 0, fail = 0, flag = 0;

    // Sorts items by key and recounts the tallies.
    void finalize();
};

enum class Format { Json, Csv };
Format parse_format(const std::string& s);
std::string emit_report(const RunRecord& rec, Format fmt);

// Shared JSON fragments.
std::string format_double(double v);  // 17 significant digits
std::string json_string(const std::string& s);
std::string ratio_report_json(const RatioReport& r);

std::string sha256_hex(const std::string& bytes);

// Flattens a ratio report into item fields.
void add_ratio_fields(Item& item, const RatioReport& r);

}  // namespace declab
