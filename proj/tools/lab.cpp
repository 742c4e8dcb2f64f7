#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

#include "declab/arith.hpp"
#include "declab/common.hpp"
#include "declab/config.hpp"
#include "declab/functionals.hpp"
#include "declab/recursion.hpp"
#include "declab/report.hpp"
#include "declab/suites.hpp"

using namespace declab;

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

DyadicInterval parse_interval(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) fail(ErrorKind::Config, "interval must be lo,hi: '" + s + "'");
    Rational lo = parse_rational(s.substr(0, comma)), hi = parse_rational(s.substr(comma + 1));
    return DyadicInterval(lo, hi - lo);
}

SymbolFunction parse_symbol(const std::string& s, const Rational& delta) {
    if (s == "one") return SymbolFunction::constant_one();
    if (s.rfind("random:", 0) == 0) return SymbolFunction::unimodular_random(static_cast<uint64_t>(parse_int(s.substr(7))), delta);
    if (s.rfind("bump:", 0) == 0) return SymbolFunction::single_bump(parse_interval(s.substr(5)));
    fail(ErrorKind::Config, "symbol must be one, random:SEED or bump:LO,HI; got '" + s + "'");
}

struct RatioArgs {
    std::string functional, g = "one", delta = "1/4", nu = "1/4", I = "0,1/4", I2 = "3/4,1", J1, J2;
    double p = 6, s = 2, eps = 0.1, side = 0;
    int a = 1, b = 1, budget = 40;
    int64_t R = 4, seed = 1;
    bool estimate = false;
};

int run_ratio(const RatioArgs& r) {
    EvalOptions opt;
    opt.estimate_error = r.estimate;
    Rational delta = parse_rational(r.delta), nu = parse_rational(r.nu);
    SymbolFunction g = parse_symbol(r.g, delta);
    ScaleParams sp;
    sp.delta = delta;
    sp.nu = nu;
    sp.a = r.a;
    sp.b = r.b;
    sp.s = r.s;
    sp.p = r.p;
    DyadicInterval I = parse_interval(r.I), I2 = parse_interval(r.I2);
    double inv = 1 / to_double(delta);
    Square B{{0, 0}, r.side > 0 ? r.side : inv * inv};
    auto emit = [](const RatioReport& rep) { std::cout << ratio_report_json(rep) << "\n"; };
    const std::string& f = r.functional;
    if (f == "linear") emit(linear_ratio(g, delta, r.p, B, opt));
    else if (f == "bilinear_M") emit(bilinear_M_ratio(g, I, I2, sp, B, opt));
    else if (f == "bilinear_Mprime") emit(bilinear_Mprime_ratio(g, I, I2, sp, B, opt));
    else if (f == "holder_split") emit(holder_split_check(g, I, I2, B, opt));
    else if (f == "script_M") emit(script_M_ratio(g, I, I2, sp, B, opt));
    else if (f == "script_M_refinement") emit(script_M_refinement(g, I, I2, sp, B, opt));
    else if (f == "bold_Ms") emit(bold_Ms_ratio(g, I, I2, sp, B, opt));
    else if (f == "l2l2") emit(check_l2l2(g, I, Square{{0, 0}, r.side > 0 ? r.side : 8.0 * static_cast<double>(r.R)}, r.R, opt));
    else if (f == "bernstein") emit(check_bernstein(g, I, Square{{0, 0}, r.side > 0 ? r.side : 1 / I.len()}, r.p, opt));
    else if (f == "ball_inflation") {
        double s = std::pow(to_double(nu), -2.0 * r.b);
        emit(ball_inflation_ratio(g, I, I2, nu, r.b, Square{{0, 0}, r.side > 0 ? r.side : s}, opt));
    } else if (f == "ball_inflation_s") {
        double s = std::pow(to_double(nu), -2.0 * r.b);
        emit(ball_inflation_s_ratio(g, I, I2, nu, r.b, r.s, Square{{0, 0}, r.side > 0 ? r.side : s}, r.eps, opt));
    } else if (f == "bilinear_reduction") emit(check_bilinear_reduction(g, delta, nu, B, opt));
    else if (f == "search") emit(search_lower_bound(delta, r.p, r.budget, static_cast<uint64_t>(r.seed), opt).report);
    else if (f == "abup") {
        if (r.J1.empty() != r.J2.empty()) fail(ErrorKind::Config, "give both --j1 and --j2, or neither");
        if (r.J1.empty()) {
            for (const auto& rep : abup_pairings(g, I, I2, sp, B, opt)) emit(rep);
        } else {
            emit(check_abup_vanishing(g, I, I2, parse_interval(r.J1), parse_interval(r.J2), sp, B, opt));
        }
    } else {
        fail(ErrorKind::Config, "unknown functional '" + f + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoupling and Vinogradov mean value lab"};
    app.require_subcommand(1);

    std::string suite, config_path, out_path, format = "json";
    int64_t seed = -1;
    bool timestamp = false;
    auto* run = app.add_subcommand("run", "Run a verification suite");
    run->add_option("suite", suite, "functional-ratios | arithmetic-identities | congruencing-ratios | recursion-pipeline | all")->required();
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_path, "Write the report here instead of stdout");
    run->add_option("--format", format, "json or csv");
    run->add_flag("--timestamp", timestamp, "Include a UTC timestamp (breaks byte-identical reruns)");

    auto* count = app.add_subcommand("count", "Exact counts");
    count->require_subcommand(1);
    int64_t X = 1, p = 2, xi = -1, eta = -1;
    int a = 1, b = 1;
    auto* cj = count->add_subcommand("j", "Solutions of the degree-2 Vinogradov system");
    cj->add_option("--x", X)->required();
    auto* ci = count->add_subcommand("i1", "Congruenced bilinear count; maximised over classes unless --xi/--eta given");
    ci->add_option("--x", X)->required();
    ci->add_option("--p", p)->required();
    ci->add_option("--a", a)->required();
    ci->add_option("--b", b)->required();
    ci->add_option("--xi", xi);
    ci->add_option("--eta", eta);

    auto* bound = app.add_subcommand("bound", "Explicit bounds");
    bound->require_subcommand(1);
    std::string lid;
    auto* bt = bound->add_subcommand("theorem", "Bound on ln D(delta) from L = ln(1/delta)");
    bt->add_option("--log-inv-delta", lid, "L as mantissa,exponent")->required();

    RatioArgs ra;
    auto* ratio = app.add_subcommand("ratio", "Evaluate one functional");
    ratio->add_option("functional", ra.functional,
                      "linear | bilinear_M | bilinear_Mprime | holder_split | script_M | script_M_refinement | bold_Ms | "
                      "l2l2 | bernstein | ball_inflation | ball_inflation_s | bilinear_reduction | search | abup")
        ->required();
    ratio->add_option("--g", ra.g, "one | random:SEED | bump:LO,HI");
    ratio->add_option("--delta", ra.delta);
    ratio->add_option("--nu", ra.nu);
    ratio->add_option("--p", ra.p);
    ratio->add_option("--s", ra.s);
    ratio->add_option("--a", ra.a);
    ratio->add_option("--b", ra.b);
    ratio->add_option("--eps", ra.eps);
    ratio->add_option("--i", ra.I, "First interval lo,hi");
    ratio->add_option("--i2", ra.I2, "Second interval lo,hi");
    ratio->add_option("--j1", ra.J1);
    ratio->add_option("--j2", ra.J2);
    ratio->add_option("--side", ra.side, "Square side (default from delta or nu)");
    ratio->add_option("--R", ra.R);
    ratio->add_option("--budget", ra.budget);
    ratio->add_option("--seed", ra.seed);
    ratio->add_flag("--estimate-error", ra.estimate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            Format fmt = parse_format(format);
            SuiteSpec spec = make_suite(suite, Config::load(config_path), seed);
            RunRecord rec = run_suite(spec);
            if (timestamp) rec.timestamp = utc_now();
            std::string bytes = emit_report(rec, fmt);
            if (fmt == Format::Json) bytes += "\n";
            if (out_path.empty()) {
                std::cout << bytes;
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) fail(ErrorKind::Config, "cannot write " + out_path);
                out << bytes;
            }
            std::cerr << rec.suite << ": " << rec.pass << " pass, " << rec.fail << " fail, " << rec.flag << " flag\n";
            return rec.fail > 0 ? 1 : 0;
        }
        if (*cj) {
            std::cout << "{\"X\": " << X << ", \"count\": " << count_J(X).str() << "}\n";
            return 0;
        }
        if (*ci) {
            if ((xi < 0) != (eta < 0)) fail(ErrorKind::Config, "give both --xi and --eta, or neither");
            if (xi >= 0) {
                BigInt c = count_I1_class(ArithParams{X, p, a, b, xi, eta});
                std::cout << "{\"X\": " << X << ", \"p\": " << p << ", \"a\": " << a << ", \"b\": " << b << ", \"xi\": " << xi
                          << ", \"eta\": " << eta << ", \"count\": " << c.str() << "}\n";
            } else {
                auto m = count_I1_max(X, p, a, b);
                std::cout << "{\"X\": " << X << ", \"p\": " << p << ", \"a\": " << a << ", \"b\": " << b << ", \"xi\": " << m.xi
                          << ", \"eta\": " << m.eta << ", \"count\": " << m.count.str() << "}\n";
            }
            return 0;
        }
        if (*bt) {
            auto comma = lid.find(',');
            if (comma == std::string::npos) fail(ErrorKind::Config, "--log-inv-delta expects mantissa,exponent");
            long double m = std::stold(lid.substr(0, comma));
            ExtScalar L = ExtScalar::from_parts(m, parse_int(lid.substr(comma + 1)));
            auto t = theorem_bound(L);
            Item it;
            it.key = "theorem";
            it.kind = "theorem_bound";
            it.set("L", t.L).set("A", t.A).set("ln_bound", t.ln_bound).set("target", t.target);
            it.set("eps", static_cast<double>(t.eps)).set("within_target", t.within_target);
            it.set("gate_eps", t.gate_eps).set("gate_small", t.gate_small).set("gate_eta", t.gate_eta);
            bool ok = t.within_target && t.gate_eps && t.gate_small && t.gate_eta;
            it.status = ok ? Status::Pass : Status::Fail;
            RunRecord rec;
            rec.items.push_back(it);
            rec.finalize();
            std::cout << emit_report(rec, Format::Json) << "\n";
            return ok ? 0 : 1;
        }
        if (*ratio) return run_ratio(ra);
    } catch (const Error& e) {
        std::cerr << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
