#include "declab/suites.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "declab/common.hpp"
#include "declab/functionals.hpp"
#include "declab/parallel.hpp"
#include "declab/recursion.hpp"

namespace declab {

const std::vector<std::string>& valid_suites() {
    static const std::vector<std::string> v = {"functional-ratios", "arithmetic-identities", "congruencing-ratios",
                                               "recursion-pipeline", "all"};
    return v;
}

uint64_t instance_seed(uint64_t base, int64_t k) { return base * 1000 + static_cast<uint64_t>(k); }

std::string SuiteSpec::digest() const {
    return sha256_hex("suite=" + suite + "\nseed=" + std::to_string(seed) + "\n" + config.canonical());
}

namespace {

std::string pad(int64_t v, int width = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(v));
    return buf;
}

std::string rat(const Rational& r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Re-raises a module precondition as a config error so bad grids stop before any work.
template <class F>
void validate(const std::string& where, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        fail(ErrorKind::Config, where + ": " + e.what());
    }
}

Item make_item(const std::string& key, const std::string& kind) {
    Item it;
    it.key = key;
    it.kind = kind;
    return it;
}

void require_in(const std::string& where, int64_t v, int64_t lo, int64_t hi) {
    if (v < lo || v > hi)
        fail(ErrorKind::Config, where + " = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
}

// ---------------------------------------------------------------- arithmetic

void plan_arithmetic(SuiteSpec& s) {
    const std::string sec = "arithmetic-identities";
    const Config& c = s.config;
    c.require_keys(sec, {"count_j", "moment_x", "torus_n", "torus_instances", "lifting_x", "lifting_p", "lifting_a",
                         "lifting_b"});
    const ArithCaps caps = s.caps;
    for (int64_t X : c.int_list(sec, "count_j", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12})) {
        require_in(sec + ".count_j", X, 1, caps.brute_max_x);
        s.jobs.push_back({"arith/count_j/X=" + pad(X), [X, caps] {
                              Item it = make_item("arith/count_j/X=" + pad(X), "count_j");
                              BigInt fast = count_J(X, caps), brute = count_J_bruteforce(X, caps);
                              it.set("X", X).set("count", big(fast)).set("bruteforce", big(brute));
                              it.status = fast == brute ? Status::Pass : Status::Fail;
                              return std::vector<Item>{it};
                          }});
    }
    for (int64_t X : c.int_list(sec, "moment_x", {10, 20, 30, 40, 50})) {
        require_in(sec + ".moment_x", X, 1, std::min<int64_t>(caps.max_n, 100000));
        s.jobs.push_back({"arith/moment/X=" + pad(X), [X, caps] {
                              Item it = make_item("arith/moment/X=" + pad(X), "sixth_moment");
                              cplx m = weighted_sixth_moment(CoefficientVector::ones_on(X, 1, X), caps);
                              BigInt J = count_J(X, caps);
                              double Jd = J.convert_to<double>();
                              it.set("X", X).set("moment", m.real()).set("moment_imag", m.imag()).set("count", big(J));
                              bool ok = std::fabs(m.real() - Jd) <= 0.25 && std::fabs(m.imag()) <= 0.25;
                              it.status = ok ? Status::Pass : Status::Fail;
                              return std::vector<Item>{it};
                          }});
    }
    const int64_t inst = c.get_int(sec, "torus_instances", 20);
    require_in(sec + ".torus_instances", inst, 0, 10000);
    const uint64_t seed = s.seed;
    for (int64_t N : c.int_list(sec, "torus_n", {2, 4, 8, 16})) {
        require_in(sec + ".torus_n", N, 0, caps.max_n);
        for (int64_t k = 0; k < inst; ++k) {
            std::string key = "arith/torus/N=" + pad(N) + "/i=" + pad(k);
            s.jobs.push_back({key, [key, N, k, seed, caps] {
                                  Item it = make_item(key, "torus_grid");
                                  auto cv = CoefficientVector::random(N, instance_seed(seed, k));
                                  cplx m = weighted_sixth_moment(cv, caps);
                                  double t = torus_grid_integral(cv, caps);
                                  double rel = std::fabs(t - m.real()) / std::max(std::fabs(m.real()), 1e-300);
                                  it.set("N", N).set("seed", static_cast<int64_t>(instance_seed(seed, k)));
                                  it.set("moment", m.real()).set("grid", t).set("relative_gap", rel);
                                  it.status = rel <= 1e-8 ? Status::Pass : Status::Fail;
                                  return std::vector<Item>{it};
                              }});
        }
    }
    auto lx = c.int_list(sec, "lifting_x", {40});
    auto lp = c.int_list(sec, "lifting_p", {2, 3});
    auto la = c.int_list(sec, "lifting_a", {0, 1, 2});
    auto lb = c.int_list(sec, "lifting_b", {1, 2});
    for (int64_t X : lx)
        for (int64_t p : lp)
            for (int64_t a : la)
                for (int64_t b : lb) {
                    validate(sec + ".lifting", [&] {
                        if (!is_prime(p)) fail(ErrorKind::Domain, "p=" + std::to_string(p) + " is not prime");
                        if (a < 0 || b < 0 || a > 6 || b > 6) fail(ErrorKind::Domain, "a, b must lie in [0, 6]");
                        if (X < 1 || X > caps.max_x) fail(ErrorKind::Cap, "X=" + std::to_string(X) + " outside [1, cap]");
                    });
                    for (int64_t xi = 0; xi < ipow(p, static_cast<int>(a)); ++xi)
                        for (int64_t eta = 0; eta < ipow(p, static_cast<int>(b)); ++eta) {
                            if (!lifting_admissible(p, static_cast<int>(a), static_cast<int>(b), xi, eta)) continue;
                            std::string key = "arith/lifting/X=" + pad(X) + "/p=" + pad(p, 3) + "/a=" + pad(a, 2) +
                                              "/b=" + pad(b, 2) + "/xi=" + pad(xi, 4) + "/eta=" + pad(eta, 4);
                            ArithParams q{X, p, static_cast<int>(a), static_cast<int>(b), xi, eta};
                            s.jobs.push_back({key, [key, q, caps] {
                                                  Item it = make_item(key, "lifting_identity");
                                                  auto r = lifting_identity_check(q, caps);
                                                  it.set("X", q.X).set("p", q.p).set("a", int64_t{q.a}).set("b", int64_t{q.b});
                                                  it.set("xi", q.xi).set("eta", q.eta);
                                                  it.set("lhs", big(r.lhs)).set("rhs", big(r.rhs));
                                                  it.status = r.equal ? Status::Pass : Status::Fail;
                                                  return std::vector<Item>{it};
                                              }});
                        }
                }
}

// ---------------------------------------------------------------- congruencing

void plan_congruencing(SuiteSpec& s) {
    const std::string sec = "congruencing-ratios";
    const Config& c = s.config;
    c.require_keys(sec, {"x", "p", "ab", "restriction_n"});
    const ArithCaps caps = s.caps;
    std::vector<std::pair<int, int>> ab;
    for (const auto& e : c.list(sec, "ab", {"1:1", "2:1"})) {
        auto colon = e.find(':');
        if (colon == std::string::npos) fail(ErrorKind::Config, sec + ".ab: expected a:b, got '" + e + "'");
        ab.emplace_back(static_cast<int>(parse_int(e.substr(0, colon))), static_cast<int>(parse_int(e.substr(colon + 1))));
    }
    for (int64_t X : c.int_list(sec, "x", {50, 100, 200}))
        for (int64_t p : c.int_list(sec, "p", {2, 3}))
            for (auto [a, b] : ab) {
                validate(sec, [&] {
                    if (!is_prime(p)) fail(ErrorKind::Domain, "p=" + std::to_string(p) + " is not prime");
                    if (X < 1 || X > caps.max_x) fail(ErrorKind::Cap, "X=" + std::to_string(X) + " outside [1, cap]");
                    if (a < 1 || a > 2 * b) fail(ErrorKind::Precondition, "need 1 <= a <= 2b");
                    if (ipow(p, 2 * b) > X) fail(ErrorKind::Precondition, "need p^(2b) <= X");
                });
                std::string key = "cong/step/X=" + pad(X) + "/p=" + pad(p, 3) + "/a=" + pad(a, 2) + "/b=" + pad(b, 2);
                s.jobs.push_back({key, [key, X, p, a, b, caps] {
                                      Item it = make_item(key, "congruencing_step_ratio");
                                      auto r = congruencing_step_ratio(X, p, a, b, caps);
                                      it.set("X", X).set("p", p).set("a", int64_t{a}).set("b", int64_t{b});
                                      it.set("ratio", r.ratio).set("numerator", big(r.numerator)).set("denominator", big(r.denominator));
                                      it.set("xi_num", r.xi_num).set("eta_num", r.eta_num).set("xi_den", r.xi_den).set("eta_den", r.eta_den);
                                      it.status = r.flagged ? Status::Flag : Status::Pass;
                                      return std::vector<Item>{it};
                                  }});
            }
    for (int64_t N : c.int_list(sec, "restriction_n", {8, 16, 32})) {
        require_in(sec + ".restriction_n", N, 3, caps.max_n);
        std::string key = "cong/restriction/N=" + pad(N);
        s.jobs.push_back({key, [key, N, caps] {
                              Item it = make_item(key, "discrete_restriction_ratio");
                              auto r = discrete_restriction_ratio(N, caps);
                              it.set("N", N).set("moment", r.moment).set("ratio", r.ratio).set("reference", r.reference);
                              it.status = r.flagged ? Status::Flag : Status::Pass;
                              return std::vector<Item>{it};
                          }});
    }
}

// ---------------------------------------------------------------- recursion

void plan_recursion(SuiteSpec& s) {
    const std::string sec = "recursion-pipeline";
    const Config& c = s.config;
    c.require_keys(sec, {"eps", "lambda", "n", "theorem_mantissa", "theorem_exponents"});
    for (const Rational& e : c.rational_list(sec, "eps", {Rational(1, 100), Rational(1, 99), Rational(1, 64)})) {
        if (!(e > 0 && e <= Rational(1, 2))) fail(ErrorKind::Config, sec + ".eps = " + rat(e) + " outside (0, 1/2]");
        long double eps = static_cast<long double>(e.numerator()) / static_cast<long double>(e.denominator());
        std::string key = "rec/expstep3/eps=" + pad(e.denominator(), 5) + "_" + pad(e.numerator(), 3);
        s.jobs.push_back({key, [key, eps, e] {
                              Item it = make_item(key, "expstep3_fixed_point");
                              auto f = expstep3_fixed_point(eps);
                              it.set("eps", rat(e)).set("closed_form", f.closed_form).set("iterated", f.iterated);
                              it.set("ceiling", f.ceiling).set("squarings", static_cast<int64_t>(f.squarings));
                              it.set("min_N", int64_t{expstep1_min_N(eps)});
                              bool ok = close_rel(f.closed_form, f.iterated, 1e-9L) && f.ordered;
                              it.status = ok ? Status::Pass : Status::Fail;
                              return std::vector<Item>{it};
                          }});
    }
    std::vector<Rational> grid;
    for (int k = 1; k <= 10; ++k) grid.emplace_back(k, 20);
    auto lambdas = c.rational_list(sec, "lambda", grid);
    std::vector<int64_t> all_n;
    for (int n = 1; n <= 40; ++n) all_n.push_back(n);
    auto Ns = c.int_list(sec, "n", all_n);
    for (const Rational& l : lambdas) {
        if (!(l > 0)) fail(ErrorKind::Config, sec + ".lambda must be positive");
        for (int64_t N : Ns) {
            require_in(sec + ".n", N, 1, 60);
            long double lam = static_cast<long double>(l.numerator()) / static_cast<long double>(l.denominator());
            std::string key = "rec/bootstrap/lambda=" + pad(l.denominator(), 5) + "_" + pad(l.numerator(), 5) + "/N=" + pad(N, 3);
            s.jobs.push_back({key, [key, lam, l, N] {
                                  Item it = make_item(key, "bootstrap_check");
                                  auto r = bootstrap_check(lam, static_cast<int>(N));
                                  it.set("lambda", rat(l)).set("N", N).set("min_N", int64_t{r.min_N});
                                  it.set("lhs", static_cast<double>(r.lhs)).set("rhs", static_cast<double>(r.rhs));
                                  it.set("contracted", static_cast<double>(r.contracted));
                                  long double scale = std::max(1.0L, std::fabs(r.lhs));
                                  it.status = std::fabs(r.lhs - r.rhs) <= 1e-12L * scale ? Status::Pass : Status::Fail;
                                  return std::vector<Item>{it};
                              }});
        }
    }
    double mant = c.get_double(sec, "theorem_mantissa", 1.5);
    if (!(mant >= 1 && mant < 10)) fail(ErrorKind::Config, sec + ".theorem_mantissa must lie in [1, 10)");
    for (int64_t e : c.int_list(sec, "theorem_exponents", {461, 468, 475, 482, 489, 496, 503, 510, 517, 524, 531, 538,
                                                           545, 552, 559, 566, 573, 580, 587, 600})) {
        ExtScalar L = ExtScalar::from_parts(mant, e);
        validate(sec + ".theorem_exponents", [&] {
            if (L <= theorem_threshold())
                fail(ErrorKind::Precondition, "L = " + L.str() + " is not above 200^200");
        });
        std::string key = "rec/theorem/L=" + pad(e, 8);
        s.jobs.push_back({key, [key, L] {
                              Item it = make_item(key, "theorem_bound");
                              auto t = theorem_bound(L);
                              it.set("L", L).set("A", t.A).set("ln_bound", t.ln_bound).set("target", t.target);
                              it.set("eps", static_cast<double>(t.eps)).set("eta_aux", static_cast<double>(t.eta_aux));
                              it.set("gate_eps", t.gate_eps).set("gate_small", t.gate_small).set("gate_eta", t.gate_eta);
                              bool ok = t.within_target && t.gate_eps && t.gate_small && t.gate_eta;
                              it.status = ok ? Status::Pass : Status::Fail;
                              return std::vector<Item>{it};
                          }});
    }
}

// ---------------------------------------------------------------- functionals

const std::vector<std::string>& functional_names() {
    static const std::vector<std::string> v = {"linear",           "search",          "bilinear_M",
                                               "holder_split",     "script_M",        "script_M_refinement",
                                               "bold_Ms",          "l2l2",            "bernstein",
                                               "ball_inflation",   "ball_inflation_s", "bilinear_reduction",
                                               "abup"};
    return v;
}

struct FunctionalSettings {
    EvalOptions opt;
    double ball_constant = 1000;  // calibrated on seeds disjoint from the standard corpus
    int search_budget = 40;
    double abup_threshold = 1e-3;
};

// Cells finer than the intervals under test, so blocks see genuinely different data.
SymbolFunction corpus_g(uint64_t seed, const Rational& delta) { return SymbolFunction::unimodular_random(seed, delta); }

Item ratio_item(const std::string& key, const std::string& kind, uint64_t seed, const RatioReport& r, bool ok) {
    Item it = make_item(key, kind);
    it.set("seed", static_cast<int64_t>(seed));
    add_ratio_fields(it, r);
    it.status = ok ? Status::Pass : Status::Fail;
    return it;
}

std::vector<Item> run_functional(const std::string& name, const std::string& key, uint64_t seed,
                                 const FunctionalSettings& fs) {
    const auto& opt = fs.opt;
    const Square B16{{0, 0}, 16}, B64{{0, 0}, 64};
    const auto q1 = interval(0, 1, 1, 4), q4 = interval(3, 4, 1, 1);
    ScaleParams quarter;
    ScaleParams eighth;
    eighth.delta = eighth.nu = Rational(1, 8);
    if (name == "linear") {
        auto r = linear_ratio(corpus_g(seed, Rational(1, 16)), Rational(1, 4), 6, B16, opt);
        return {ratio_item(key, name, seed, r, r.ratio <= r.detail("trivial_bound"))};
    }
    if (name == "search") {
        auto s = search_lower_bound(Rational(1, 4), 6, fs.search_budget, seed, opt);
        return {ratio_item(key, name, seed, s.report, s.report.ratio <= s.report.detail("trivial_bound"))};
    }
    if (name == "bilinear_M") {
        auto g = corpus_g(seed, Rational(1, 32));
        auto I = interval(0, 1, 1, 8), Ip = interval(7, 8, 1, 1);
        auto m = bilinear_M_ratio(g, I, Ip, eighth, B64, opt);
        auto mp = bilinear_Mprime_ratio(g, I, Ip, eighth, B64, opt);
        Item it = ratio_item(key, name, seed, m, mp.ratio <= mp.detail("equivalence_bound") * m.ratio);
        it.set("mprime_ratio", mp.ratio).set("mprime_lhs", mp.lhs).set("lhs_quotient", mp.detail("lhs_quotient"));
        return {it};
    }
    if (name == "holder_split") {
        auto r = holder_split_check(corpus_g(seed, Rational(1, 16)), q1, q4, B16, opt);
        return {ratio_item(key, name, seed, r, r.ratio <= 1 + 1e-12)};
    }
    if (name == "script_M") {
        auto r = script_M_ratio(corpus_g(seed, Rational(1, 16)), q1, q4, quarter, B16, opt);
        return {ratio_item(key, name, seed, r, std::isfinite(r.ratio))};
    }
    if (name == "script_M_refinement") {
        ScaleParams sp;
        sp.delta = Rational(1, 16);
        sp.b = 2;
        auto r = script_M_refinement(corpus_g(seed, Rational(1, 16)), q1, interval(3, 4, 13, 16), sp,
                                     Square{{0, 0}, 256}, opt);
        return {ratio_item(key, name, seed, r, r.ratio <= 10)};
    }
    if (name == "bold_Ms") {
        auto r = bold_Ms_ratio(corpus_g(seed, Rational(1, 16)), q1, q4, quarter, B16, opt);
        double d = r.detail("direct_ratio");
        return {ratio_item(key, name, seed, r, d >= 0.5 && d <= 2)};
    }
    if (name == "l2l2") {
        auto r = check_l2l2(corpus_g(seed, Rational(1, 16)), unit_interval(), Square{{0, 0}, 32}, 4, opt);
        return {ratio_item(key, name, seed, r, r.ratio <= 10)};
    }
    if (name == "bernstein") {
        auto r = check_bernstein(corpus_g(seed, Rational(1, 16)), unit_interval(), Square{{0, 0}, 1}, 2, opt);
        return {ratio_item(key, name, seed, r, r.ratio >= 1 && r.ratio <= 1 / r.rhs)};
    }
    if (name == "ball_inflation") {
        auto r = ball_inflation_ratio(corpus_g(seed, Rational(1, 16)), q1, q4, Rational(1, 4), 1, B16, opt);
        Item it = ratio_item(key, name, seed, r, r.ratio <= fs.ball_constant);
        it.set("constant", fs.ball_constant);
        return {it};
    }
    if (name == "ball_inflation_s") {
        auto r = ball_inflation_s_ratio(corpus_g(seed, Rational(1, 16)), q1, q4, Rational(1, 4), 1, 2.5, B16, 0.1, opt);
        Item it = ratio_item(key, name, seed, r, r.ratio <= fs.ball_constant);
        it.set("constant", fs.ball_constant);
        return {it};
    }
    if (name == "bilinear_reduction") {
        auto r = check_bilinear_reduction(corpus_g(seed, Rational(1, 32)), Rational(1, 8), Rational(1, 8), B64, opt);
        return {ratio_item(key, name, seed, r, r.ratio <= 1)};
    }
    if (name == "abup") {
        ScaleParams sp;
        sp.nu = Rational(1, 8);
        sp.delta = Rational(1, 64);
        auto reps = abup_pairings(corpus_g(seed, Rational(1, 64)), interval(0, 1, 1, 8), interval(7, 8, 1, 1), sp,
                                  Square{{0, 0}, 4096}, opt);
        std::vector<Item> out;
        for (size_t i = 0; i < reps.size(); ++i) {
            bool far = reps[i].has_flag("far_pair");
            out.push_back(ratio_item(key + "/pair=" + pad(static_cast<int64_t>(i), 3), name, seed, reps[i],
                                     !far || reps[i].ratio <= fs.abup_threshold));
        }
        return out;
    }
    fail(ErrorKind::Config, "unknown functional '" + name + "'");
}

void plan_functionals(SuiteSpec& s) {
    const std::string sec = "functional-ratios";
    const Config& c = s.config;
    c.require_keys(sec, {"functionals", "instances", "nodes_per_unit_frequency", "spacing", "K", "estimate_error",
                         "ball_constant", "search_budget", "abup_threshold"});
    FunctionalSettings fs;
    fs.opt.q.nodes_per_unit_frequency = static_cast<int>(c.get_int(sec, "nodes_per_unit_frequency", 4));
    fs.opt.q.spacing = c.get_double(sec, "spacing", 0.25);
    fs.opt.q.K = c.get_double(sec, "K", 8);
    fs.opt.estimate_error = c.get_int(sec, "estimate_error", 0) != 0;
    fs.ball_constant = c.get_double(sec, "ball_constant", 1000);
    fs.search_budget = static_cast<int>(c.get_int(sec, "search_budget", 40));
    fs.abup_threshold = c.get_double(sec, "abup_threshold", 1e-3);
    validate(sec, [&] { fs.opt.q.validate(); });
    if (fs.search_budget < 1) fail(ErrorKind::Config, sec + ".search_budget must be >= 1");
    const int64_t inst = c.get_int(sec, "instances", 3);
    require_in(sec + ".instances", inst, 0, 10000);
    std::vector<std::string> defaults;
    for (const auto& n : functional_names())
        if (n != "abup" && n != "script_M_refinement") defaults.push_back(n);
    auto names = c.list(sec, "functionals", defaults);
    for (const auto& n : names)
        if (std::find(functional_names().begin(), functional_names().end(), n) == functional_names().end()) {
            std::string all;
            for (const auto& v : functional_names()) all += (all.empty() ? "" : ", ") + v;
            fail(ErrorKind::Config, "unknown functional '" + n + "' (valid: " + all + ")");
        }
    for (const auto& n : names)
        for (int64_t k = 0; k < inst; ++k) {
            uint64_t seed = instance_seed(s.seed, k);
            std::string key = "func/" + n + "/i=" + pad(k);
            s.jobs.push_back({key, [n, key, seed, fs] { return run_functional(n, key, seed, fs); }});
        }
}

}  // namespace

SuiteSpec make_suite(const std::string& suite, const Config& cfg, int64_t seed_override) {
    const auto& v = valid_suites();
    if (std::find(v.begin(), v.end(), suite) == v.end()) {
        std::string all;
        for (const auto& x : v) all += (all.empty() ? "" : ", ") + x;
        fail(ErrorKind::Config, "unknown suite '" + suite + "' (valid: " + all + ")");
    }
    SuiteSpec s;
    s.suite = suite;
    s.config = cfg;
    cfg.require_keys("", {"seed"});
    cfg.require_keys("caps", {"max_x", "max_n", "brute_max_x"});
    for (const auto& sec : cfg.sections())
        if (sec != "" && sec != "caps" && std::find(v.begin(), v.end(), sec) == v.end())
            fail(ErrorKind::Config, "unknown section [" + sec + "]");
    int64_t seed = seed_override >= 0 ? seed_override : cfg.get_int("", "seed", 1);
    if (seed < 0) fail(ErrorKind::Config, "seed must be nonnegative");
    s.seed = static_cast<uint64_t>(seed);
    s.caps.max_x = cfg.get_int("caps", "max_x", s.caps.max_x);
    s.caps.max_n = cfg.get_int("caps", "max_n", s.caps.max_n);
    s.caps.brute_max_x = cfg.get_int("caps", "brute_max_x", s.caps.brute_max_x);
    if (s.caps.max_x < 1 || s.caps.max_n < 0 || s.caps.brute_max_x < 1) fail(ErrorKind::Config, "caps must be positive");
    // absent sections run with their default grids
    auto want = [&](const std::string& name) { return suite == name || suite == "all"; };
    if (want("functional-ratios")) plan_functionals(s);
    if (want("arithmetic-identities")) plan_arithmetic(s);
    if (want("congruencing-ratios")) plan_congruencing(s);
    if (want("recursion-pipeline")) plan_recursion(s);
    return s;
}

RunRecord run_suite(const SuiteSpec& spec) {
    std::vector<std::vector<Item>> out(spec.jobs.size());
    parallel_for(spec.jobs.size(), [&](size_t i) {
        try {
            out[i] = spec.jobs[i].run();
        } catch (const Error& e) {
            Item it = make_item(spec.jobs[i].key, "error");
            it.status = Status::Fail;
            it.error = std::string(kind_name(e.kind())) + ": " + e.what();
            out[i] = {it};
        }
    });
    RunRecord rec;
    rec.suite = spec.suite;
    rec.config_digest = spec.digest();
    for (auto& v : out)
        for (auto& it : v) rec.items.push_back(std::move(it));
    rec.finalize();
    return rec;
}

}  // namespace declab
