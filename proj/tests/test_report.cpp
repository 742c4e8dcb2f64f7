#include <doctest.h>

#include "declab/common.hpp"
#include "declab/config.hpp"
#include "declab/report.hpp"
#include "declab/suites.hpp"

using namespace declab;

namespace {

Config arith_only(const std::string& extra = "") {
    return Config::parse("[arithmetic-identities]\ncount_j = 1..12\nmoment_x = 10, 20\ntorus_n = 4\ntorus_instances = 2\n"
                         "lifting_x = 20\nlifting_p = 2\nlifting_a = 1\nlifting_b = 1\n" + extra);
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Domain;
}

}  // namespace

TEST_CASE("empty record") {
    RunRecord rec;
    rec.finalize();
    CHECK(emit_report(rec, Format::Json) == R"({"items": [], "pass": 0, "fail": 0, "flag": 0})");
    CHECK(emit_report(rec, Format::Csv) == "key,kind,status,error\n");
}

TEST_CASE("one item csv") {
    RunRecord rec;
    Item it;
    it.key = "k";
    it.kind = "demo";
    it.set("x", 0.1).set("n", int64_t{3}).set("note", std::string("a,b")).set("big", big(BigInt(7)));
    it.set("L", ExtScalar::from_parts(1.5, 500));
    rec.items.push_back(it);
    rec.finalize();
    std::string csv = emit_report(rec, Format::Csv);
    CHECK(csv == "key,kind,status,error,x,n,note,big,L.mantissa,L.exponent\nk,demo,pass,,0.10000000000000001,3,\"a,b\",7,1.5,500\n");
}

TEST_CASE("json values and ordering") {
    RunRecord rec;
    for (const char* k : {"b", "a"}) {
        Item it;
        it.key = k;
        it.kind = "t";
        it.status = std::string(k) == "a" ? Status::Flag : Status::Fail;
        it.set("v", 1.0 / 3).set("ok", true).set("L", ExtScalar::from_parts(2, -3));
        rec.items.push_back(it);
    }
    rec.finalize();
    CHECK(rec.items[0].key == "a");
    CHECK(rec.fail == 1);
    CHECK(rec.flag == 1);
    std::string j = emit_report(rec, Format::Json);
    CHECK(j.find(R"("v": 0.33333333333333331, "ok": true, "L": {"mantissa": 2, "exponent": -3})") != std::string::npos);
    CHECK(j.find("\"a\"") < j.find("\"b\""));
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "\"inf\"");
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config parsing") {
    auto c = Config::parse("seed = 5\n[s]\nxs = 1..4, 10..20:5\nrs = 1/4, 3\nname = hello\n");
    CHECK(c.get_int("", "seed", 0) == 5);
    CHECK(c.int_list("s", "xs", {}) == std::vector<int64_t>{1, 2, 3, 4, 10, 15, 20});
    CHECK(c.rational_list("s", "rs", {}) == std::vector<Rational>{Rational(1, 4), Rational(3)});
    CHECK(c.get("s", "name", "") == "hello");
    CHECK(c.int_list("s", "missing", {9}) == std::vector<int64_t>{9});
    CHECK(kind_of([&] { c.require_keys("s", {"xs"}); }) == ErrorKind::Config);
    CHECK(kind_of([] { Config::parse("[s]\nxs = 4..1\n").int_list("s", "xs", {}); }) == ErrorKind::Config);
    CHECK(kind_of([] { Config::parse("[s\n"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_rational("1/0"); }) == ErrorKind::Config);
    // digest input ignores key order and whitespace
    CHECK(Config::parse("[s]\na=1\nb = 2\n").canonical() == Config::parse("[s]\nb=2\na = 1\n").canonical());
}

TEST_CASE("unknown suite lists valid ones") {
    try {
        make_suite("bogus", Config::parse(""));
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("arithmetic-identities") != std::string::npos);
    }
}

TEST_CASE("invalid parameters stop before any work") {
    CHECK(kind_of([] { make_suite("arithmetic-identities", arith_only("lifting_p = 4\n")); }) == ErrorKind::Config);
    CHECK(kind_of([] { make_suite("arithmetic-identities", Config::parse("[arithmetic-identities]\ncount_j = 13\n")); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { make_suite("congruencing-ratios", Config::parse("[congruencing-ratios]\nab = 3:1\n")); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { make_suite("functional-ratios", Config::parse("[functional-ratios]\nfunctionals = nope\n")); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { make_suite("all", Config::parse("[extra]\nx = 1\n")); }) == ErrorKind::Config);
    CHECK(kind_of([] { make_suite("recursion-pipeline", Config::parse("[recursion-pipeline]\ntheorem_exponents = 100\n")); }) ==
          ErrorKind::Config);
}

TEST_CASE("arithmetic identities pass for X <= 12") {
    auto spec = make_suite("arithmetic-identities", arith_only());
    auto rec = run_suite(spec);
    CHECK(rec.items.size() == spec.jobs.size());
    CHECK(rec.pass == static_cast<int>(rec.items.size()));
    CHECK(rec.fail == 0);
}

TEST_CASE("empty grid") {
    auto spec = make_suite("arithmetic-identities",
                           Config::parse("[arithmetic-identities]\ncount_j =\nmoment_x =\ntorus_n =\nlifting_x =\n"));
    auto rec = run_suite(spec);
    CHECK(rec.items.empty());
    CHECK(rec.fail == 0);
}

TEST_CASE("item errors are collected") {
    SuiteSpec spec = make_suite("arithmetic-identities",
                                Config::parse("[arithmetic-identities]\ncount_j = 3\nmoment_x =\ntorus_n =\nlifting_x =\n"));
    spec.jobs.push_back({"zz", [] () -> std::vector<Item> { fail(ErrorKind::Precondition, "bad shape"); }});
    auto rec = run_suite(spec);
    REQUIRE(rec.items.size() == 2);
    CHECK(rec.items[1].status == Status::Fail);
    CHECK(rec.items[1].error == "precondition: bad shape");
    CHECK(rec.pass == 1);
}

TEST_CASE("reports are byte identical across runs") {
    auto cfg = Config::parse("seed = 3\n[recursion-pipeline]\neps = 1/64\nlambda = 1/4\nn = 1..3\ntheorem_exponents = 461\n"
                             "[functional-ratios]\ninstances = 2\nfunctionals = linear, l2l2\n");
    auto a = run_suite(make_suite("all", cfg));
    auto b = run_suite(make_suite("all", cfg));
    CHECK(emit_report(a, Format::Json) == emit_report(b, Format::Json));
    CHECK(emit_report(a, Format::Csv) == emit_report(b, Format::Csv));
    // timestamps never enter the digest
    b.timestamp = "2026-01-01T00:00:00Z";
    CHECK(a.config_digest == b.config_digest);
    auto c = run_suite(make_suite("all", cfg, 4));
    CHECK(c.config_digest != a.config_digest);
}
