#include "declab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "declab/common.hpp"
#include "declab/parallel.hpp"
#include "declab/rng.hpp"

namespace declab {

double RatioReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    fail(ErrorKind::Domain, "report " + functional + " has no detail '" + key + "'");
}

bool RatioReport::has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

double weight_mass_fraction() { return 2 * std::numbers::pi / 9702; }

namespace {

std::string rstr(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

std::string dstr(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string square_str(const Square& s) { return "(" + dstr(s.center[0]) + "," + dstr(s.center[1]) + ";" + dstr(s.side) + ")"; }

Rational rpow(const Rational& r, int k) {
    Rational out(1);
    for (int i = 0; i < k; ++i) out *= r;
    return out;
}

bool is_integer(const Rational& r) { return r.denominator() == 1; }

void require_reciprocal(const Rational& x, const char* name) {
    if (x <= 0 || x > 1 || !is_integer(Rational(1) / x))
        fail(ErrorKind::Domain, std::string(name) + " = " + rstr(x) + " must be the reciprocal of a positive integer");
}

void require_side(const Square& B, double side, const std::string& what) {
    if (std::fabs(B.side - side) > 1e-9 * side)
        fail(ErrorKind::Precondition, what + " must have side " + dstr(side) + ", got " + dstr(B.side));
}

// I is one of the pieces of P_ell([0,1])
void require_piece(const DyadicInterval& I, const Rational& ell, const std::string& name) {
    if (I.length != ell || !is_integer(I.left / ell))
        fail(ErrorKind::Precondition, name + " = " + I.str() + " is not an element of P_" + rstr(ell) + "([0,1])");
}

Rational gap(const DyadicInterval& I, const DyadicInterval& J) {
    Rational d = std::max(J.left - I.right(), I.left - J.right());
    return std::max(d, Rational(0));
}

void require_separation(const DyadicInterval& I, const DyadicInterval& J, const Rational& need, const std::string& label) {
    if (gap(I, J) < need)
        fail(ErrorKind::Precondition, I.str() + " and " + J.str() + " are " + rstr(gap(I, J)) + " apart; " + label +
                                          " needs separation >= " + rstr(need));
}

void require_s(double s) {
    if (!(s >= 2 && s <= 3)) fail(ErrorKind::Domain, "s = " + dstr(s) + " outside [2,3]");
}

double hpow(double a, double h) {
    // a^h for the half-exponents that occur; the integer cases stay exact
    if (h == 1) return a;
    if (h == 2) return a * a;
    if (h == 3) return a * a * a;
    if (h == 0) return 1;
    return std::pow(a, h);
}

// Integrals of products of powers of |E_k g| over a square, plain or against its weight.
// terms[t][k] is the exponent of field k in term t; the grid resolves the largest
// product bandwidth.
struct Integrator {
    Square D;
    bool weighted = false;
    std::vector<FieldSpec> fields;
    std::vector<double> bandwidth;  // per field
    std::vector<std::vector<double>> terms;

    std::vector<double> run(const QuadratureSpec& q) const {
        double freq = 0;
        for (const auto& t : terms) {
            double f = 0;
            for (size_t k = 0; k < t.size(); ++k) f += t[k] / 2 * bandwidth[k];
            freq = std::max(freq, f);
        }
        freq = std::max(freq, 1e-3);
        TensorGrid grid = weighted ? grid_weighted(D, freq, q) : grid_on_square(D, freq, q);
        const size_t nf = fields.size(), nt = terms.size();
        const Square Dc = D;
        const bool w = weighted;
        const auto& T = terms;
        return grid_reduce(grid, fields, q, nt, [&, nf, nt, Dc, w](const BlockView& v, std::vector<double>& acc) {
            std::vector<double> a(nf);
            for (Eigen::Index j = 0; j < v.n2; ++j)
                for (Eigen::Index i = 0; i < v.n1; ++i) {
                    double wt = v.w1[i] * v.w2[j];
                    if (w) wt *= weight_value(Dc, {v.x1[i], v.x2[j]});
                    for (size_t k = 0; k < nf; ++k) a[k] = std::norm(v.fields[k](i, j));
                    for (size_t t = 0; t < nt; ++t) {
                        double val = wt;
                        for (size_t k = 0; k < nf; ++k)
                            if (T[t][k] != 0) val *= hpow(a[k], T[t][k] / 2);
                        acc[t] += val;
                    }
                }
        });
    }

    // Adds a field and returns its index.
    size_t add(const SymbolFunction& g, const DyadicInterval& J) {
        fields.push_back({&g, J});
        bandwidth.push_back(field_bandwidth(J));
        for (auto& t : terms) t.push_back(0);
        return fields.size() - 1;
    }
    // Adds the single-field term |E_k|^p and returns its index.
    size_t power(size_t k, double p) {
        std::vector<double> t(fields.size(), 0.0);
        t[k] = p;
        terms.push_back(t);
        return terms.size() - 1;
    }
    size_t product(const std::vector<std::pair<size_t, double>>& factors) {
        std::vector<double> t(fields.size(), 0.0);
        for (auto [k, p] : factors) t[k] = p;
        terms.push_back(t);
        return terms.size() - 1;
    }
};

// int |E_J g|^p w_D for every J.
std::vector<double> weighted_powers(const SymbolFunction& g, const std::vector<DyadicInterval>& Js, const Square& D,
                                    double p, const QuadratureSpec& q) {
    Integrator in;
    in.D = D;
    in.weighted = true;
    for (const auto& J : Js) in.power(in.add(g, J), p);
    return in.run(q);
}

double rel_change(double a, double b) {
    double s = std::max(std::fabs(a), std::fabs(b));
    return s == 0 ? 0 : std::fabs(a - b) / s;
}

// Evaluates at the requested rule and, when asked, again with doubled nodes.
RatioReport certify(const EvalOptions& opt, const std::function<RatioReport(const QuadratureSpec&)>& f) {
    opt.q.validate();
    RatioReport r = f(opt.q);
    if (opt.estimate_error) {
        RatioReport r2 = f(opt.q.doubled());
        r.quad_error = std::max(r.quad_error, std::max(rel_change(r.lhs, r2.lhs), rel_change(r.rhs, r2.rhs)));
    }
    return r;
}

void finish(RatioReport& r, const std::string& what) {
    if (!(r.rhs > 0)) fail(ErrorKind::Domain, "degenerate input: right side of " + what + " vanishes");
    r.ratio = r.lhs / r.rhs;
}

std::string witness(const SymbolFunction& g, const std::vector<std::pair<std::string, std::string>>& parts) {
    std::string s = "g=" + g.label;
    for (const auto& [k, v] : parts) s += ";" + k + "=" + v;
    return s;
}

// Square side 1/x for a reciprocal-integer x.
double side_of(const Rational& x) { return to_double(Rational(1) / x); }

// Averages fn(Delta) over the partition of D into squares of the given side.
double delta_average(const Square& D, double side, const std::function<double(const Square&)>& fn) {
    auto parts = partition_square(D, side);
    std::vector<double> vals(parts.size());
    parallel_for(parts.size(), [&](size_t i) { vals[i] = fn(parts[i]); });
    double s = 0;
    for (double v : vals) s += v;
    return s / static_cast<double>(parts.size());
}

void check_bilinear_scales(const ScaleParams& sp) {
    require_reciprocal(sp.delta, "delta");
    require_reciprocal(sp.nu, "nu");
    if (sp.a < 1 || sp.b < 1) fail(ErrorKind::Domain, "a and b must be positive integers");
    for (int e : {sp.a, sp.b})
        if (!is_integer(rpow(sp.nu, e) / sp.delta))
            fail(ErrorKind::Precondition, "nu^" + std::to_string(e) + " / delta = " + rstr(rpow(sp.nu, e) / sp.delta) + " is not an integer");
}

std::vector<std::pair<std::string, std::string>> scale_params(const ScaleParams& sp) {
    return {{"delta", rstr(sp.delta)}, {"nu", rstr(sp.nu)}, {"a", std::to_string(sp.a)}, {"b", std::to_string(sp.b)}};
}

double sum_pow(const std::vector<double>& v, double e) {
    double s = 0;
    for (double x : v) s += std::pow(x, e);
    return s;
}

}  // namespace

RatioReport linear_ratio(const SymbolFunction& g, const Rational& delta, double p, const Square& B, const EvalOptions& opt) {
    require_reciprocal(delta, "delta");
    if (!(p >= 2 && p <= 6)) fail(ErrorKind::Domain, "p = " + dstr(p) + " outside [2,6]");
    const double inv = side_of(delta);
    require_side(B, inv * inv, "B");
    auto Js = partition_interval(unit_interval(), delta);
    return certify(opt, [&](const QuadratureSpec& q) {
        RatioReport r;
        r.functional = "linear";
        r.params = {{"delta", rstr(delta)}, {"p", dstr(p)}};
        Integrator in;
        in.D = B;
        in.power(in.add(g, unit_interval()), p);
        r.lhs = std::pow(in.run(q)[0], 1 / p);
        r.rhs = std::sqrt(sum_pow(weighted_powers(g, Js, B, p, q), 2 / p));
        finish(r, "linear_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"B", square_str(B)}});
        r.details = {{"trivial_bound", 2 * std::pow(2.0, 100 / 6.0) * std::sqrt(inv)}};
        return r;
    });
}

namespace {

struct BilinearParts {
    double lhs_plain = 0, lhs_weighted = 0, rhs = 0;
};

BilinearParts bilinear_parts(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                             const ScaleParams& sp, const Square& B, bool want_weighted, const QuadratureSpec& q) {
    BilinearParts out;
    Integrator in;
    in.D = B;
    size_t k1 = in.add(g, I), k2 = in.add(g, Ip);
    in.product({{k1, 2}, {k2, 4}});
    out.lhs_plain = in.run(q)[0];
    if (want_weighted) {
        in.weighted = true;
        out.lhs_weighted = in.run(q)[0];
    }
    double s1 = sum_pow(weighted_powers(g, partition_interval(I, sp.delta), B, 6, q), 1 / 3.0);
    double s2 = sum_pow(weighted_powers(g, partition_interval(Ip, sp.delta), B, 6, q), 1 / 3.0);
    out.rhs = s1 * s2 * s2;
    return out;
}

void check_M_shapes(const DyadicInterval& I, const DyadicInterval& Ip, const ScaleParams& sp, const Square& B) {
    check_bilinear_scales(sp);
    require_piece(I, rpow(sp.nu, sp.a), "I");
    require_piece(Ip, rpow(sp.nu, sp.b), "I'");
    require_separation(I, Ip, 3 * sp.nu, "M_{a,b}");
    double inv = side_of(sp.delta);
    require_side(B, inv * inv, "B");
}

}  // namespace

RatioReport bilinear_M_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                             const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    check_M_shapes(I, Ip, sp, B);
    return certify(opt, [&](const QuadratureSpec& q) {
        auto parts = bilinear_parts(g, I, Ip, sp, B, false, q);
        RatioReport r;
        r.functional = "bilinear_M";
        r.params = scale_params(sp);
        r.lhs = parts.lhs_plain;
        r.rhs = parts.rhs;
        finish(r, "bilinear_M_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"I'", Ip.str()}, {"B", square_str(B)}});
        r.details = {{"constant_estimate", std::pow(r.ratio, 1 / 6.0)}};
        return r;
    });
}

RatioReport bilinear_Mprime_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                                  const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    check_M_shapes(I, Ip, sp, B);
    return certify(opt, [&](const QuadratureSpec& q) {
        auto parts = bilinear_parts(g, I, Ip, sp, B, true, q);
        RatioReport r;
        r.functional = "bilinear_Mprime";
        r.params = scale_params(sp);
        r.lhs = parts.lhs_weighted;
        r.rhs = parts.rhs;
        finish(r, "bilinear_Mprime_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"I'", Ip.str()}, {"B", square_str(B)}});
        double quot = parts.lhs_plain > 0 ? parts.lhs_weighted / parts.lhs_plain : 0;
        if (!(parts.lhs_plain > 0)) r.flags.push_back("quotient_undefined");
        r.details = {{"constant_estimate", std::pow(r.ratio, 1 / 6.0)},
                     {"lhs_unweighted", parts.lhs_plain},
                     {"lhs_quotient", quot},
                     {"quotient_root6", std::pow(quot, 1 / 6.0)},
                     {"equivalence_bound", std::pow(12.0, 100 / 6.0)}};
        return r;
    });
}

RatioReport holder_split_check(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                               const Square& B, const EvalOptions& opt) {
    return certify(opt, [&](const QuadratureSpec& q) {
        Integrator in;
        in.D = B;
        size_t k1 = in.add(g, I1), k2 = in.add(g, I2);
        in.product({{k1, 2}, {k2, 4}});
        in.product({{k1, 4}, {k2, 2}});
        in.power(k2, 6);
        auto v = in.run(q);
        RatioReport r;
        r.functional = "holder_split";
        r.lhs = v[0];
        r.rhs = std::sqrt(v[1]) * std::sqrt(v[2]);
        finish(r, "holder_split_check");
        r.witness_ref = witness(g, {{"I1", I1.str()}, {"I2", I2.str()}, {"B", square_str(B)}});
        r.details = {{"equality_gap", 1 - r.ratio}};
        return r;
    });
}

namespace {

void check_script_shapes(const DyadicInterval& I, const DyadicInterval& Ip, const ScaleParams& sp, const Square& B) {
    check_bilinear_scales(sp);
    require_piece(I, rpow(sp.nu, sp.a), "I");
    require_piece(Ip, rpow(sp.nu, sp.b), "I'");
    require_separation(I, Ip, sp.nu, "script M_{a,b}");
    double inv = side_of(sp.delta);
    require_side(B, inv * inv, "B");
}

// (sum_J ||E_J g||^2_{L^6_#(w_B)}) over J in P_delta(I)
double l6_block_sum(const SymbolFunction& g, const DyadicInterval& I, const Rational& delta, const Square& B,
                    const QuadratureSpec& q) {
    auto v = weighted_powers(g, partition_interval(I, delta), B, 6, q);
    for (double& x : v) x /= B.area();
    return sum_pow(v, 1 / 3.0);
}

// avg over Delta of ||E_I||^2_{L^2_#(w_Delta)} ||E_I'||^4_{L^4_#(w_Delta)}
double local_24_average(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip, const Square& D,
                        double side, const QuadratureSpec& q) {
    return delta_average(D, side, [&](const Square& d) {
        Integrator in;
        in.D = d;
        in.weighted = true;
        size_t k1 = in.add(g, I), k2 = in.add(g, Ip);
        in.power(k1, 2);
        in.power(k2, 4);
        auto v = in.run(q);
        return (v[0] / d.area()) * (v[1] / d.area());
    });
}

}  // namespace

RatioReport script_M_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                           const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    check_script_shapes(I, Ip, sp, B);
    const double side = side_of(rpow(sp.nu, std::max(sp.a, sp.b)));
    return certify(opt, [&](const QuadratureSpec& q) {
        RatioReport r;
        r.functional = "script_M";
        r.params = scale_params(sp);
        r.lhs = local_24_average(g, I, Ip, B, side, q);
        double s1 = l6_block_sum(g, I, sp.delta, B, q), s2 = l6_block_sum(g, Ip, sp.delta, B, q);
        r.rhs = s1 * s2 * s2;
        finish(r, "script_M_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"I'", Ip.str()}, {"B", square_str(B)}});
        r.details = {{"constant_estimate", std::pow(r.ratio, 1 / 6.0)}, {"delta_side", side},
                     {"delta_count", std::pow(B.side / side, 2)}};
        return r;
    });
}

RatioReport script_M_refinement(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                                const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    check_script_shapes(I, Ip, sp, B);
    if (!(sp.a < sp.b)) fail(ErrorKind::Precondition, "refinement needs a < b");
    const double side = side_of(rpow(sp.nu, sp.b));
    auto Js = partition_interval(I, rpow(sp.nu, sp.b));
    return certify(opt, [&](const QuadratureSpec& q) {
        std::vector<double> per(Js.size() + 1, 0.0);
        auto parts = partition_square(B, side);
        std::vector<std::vector<double>> vals(parts.size());
        parallel_for(parts.size(), [&](size_t i) {
            const Square& d = parts[i];
            Integrator in;
            in.D = d;
            in.weighted = true;
            size_t kI = in.add(g, I), kp = in.add(g, Ip);
            in.power(kI, 2);
            in.power(kp, 4);
            for (const auto& J : Js) in.power(in.add(g, J), 2);
            auto v = in.run(q);
            double a = v[1] / d.area();
            vals[i].push_back(v[0] / d.area() * a);
            for (size_t j = 0; j < Js.size(); ++j) vals[i].push_back(v[2 + j] / d.area() * a);
        });
        for (const auto& v : vals)
            for (size_t k = 0; k < v.size(); ++k) per[k] += v[k];
        RatioReport r;
        r.functional = "script_M_refinement";
        r.params = scale_params(sp);
        r.lhs = per[0] / static_cast<double>(parts.size());
        for (size_t k = 1; k < per.size(); ++k) r.rhs += per[k] / static_cast<double>(parts.size());
        finish(r, "script_M_refinement");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"I'", Ip.str()}, {"B", square_str(B)}});
        return r;
    });
}

RatioReport bold_Ms_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                          const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    require_reciprocal(sp.delta, "delta");
    require_reciprocal(sp.nu, "nu");
    require_s(sp.s);
    if (sp.b < 1) fail(ErrorKind::Domain, "b must be a positive integer");
    const Rational nub = rpow(sp.nu, sp.b);
    if (!is_integer(nub / sp.delta)) fail(ErrorKind::Precondition, "nu^b / delta is not an integer");
    require_piece(I, sp.nu, "I");
    require_piece(Ip, sp.nu, "I'");
    require_separation(I, Ip, sp.nu, "bold M_b^(s)");
    double inv = side_of(sp.delta);
    require_side(B, inv * inv, "B");
    const double s = sp.s, side = side_of(nub);
    auto Js = partition_interval(I, nub), Jps = partition_interval(Ip, nub);
    return certify(opt, [&](const QuadratureSpec& q) {
        RatioReport r;
        r.functional = "bold_Ms";
        r.params = scale_params(sp);
        r.params.emplace_back("s", dstr(s));
        r.lhs = delta_average(B, side, [&](const Square& d) {
            Integrator in;
            in.D = d;
            in.weighted = true;
            for (const auto& J : Js) in.power(in.add(g, J), 2);
            for (const auto& J : Jps) in.power(in.add(g, J), 2);
            auto v = in.run(q);
            double a = 0, b = 0;
            for (size_t k = 0; k < Js.size(); ++k) a += v[k] / d.area();
            for (size_t k = 0; k < Jps.size(); ++k) b += v[Js.size() + k] / d.area();
            return std::pow(a, s / 2) * std::pow(b, (6 - s) / 2);
        });
        double c1 = 0, c2 = 0;
        for (double v : weighted_powers(g, partition_interval(I, sp.delta), B, 2, q)) c1 += v / B.area();
        for (double v : weighted_powers(g, partition_interval(Ip, sp.delta), B, 2, q)) c2 += v / B.area();
        r.rhs = std::pow(c1, s / 2) * std::pow(c2, (6 - s) / 2);
        finish(r, "bold_Ms_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"I'", Ip.str()}, {"B", square_str(B)}});

        Integrator direct;
        direct.D = B;
        size_t k1 = direct.add(g, I), k2 = direct.add(g, Ip);
        direct.product({{k1, s}, {k2, 6 - s}});
        double dval = direct.run(q)[0] / B.area();
        const double m = weight_mass_fraction();
        double unit = r.lhs / (m * m * m);
        const double theta = 3 / s - 0.5, phi = 3 / (6 - s) - 0.5;
        r.details = {{"constant_estimate", std::pow(r.ratio, 1 / 6.0)},
                     {"theta", theta},
                     {"phi", phi},
                     {"theta_s", theta * s},
                     {"phi_6ms", phi * (6 - s)},
                     {"direct", dval},
                     {"lhs_unit_mass", unit},
                     {"direct_ratio", dval > 0 ? unit / dval : 0}};
        return r;
    });
}

RatioReport check_l2l2(const SymbolFunction& g, const DyadicInterval& I, const Square& Delta, int64_t R,
                       const EvalOptions& opt) {
    if (R < 1) fail(ErrorKind::Domain, "R must be a positive integer");
    Rational n = I.length * R;
    if (!is_integer(n)) fail(ErrorKind::Precondition, "R|I| = " + rstr(n) + " is not an integer");
    auto Js = partition_interval(I, Rational(1, R));
    return certify(opt, [&](const QuadratureSpec& q) {
        Integrator in;
        in.D = Delta;
        in.weighted = true;
        in.power(in.add(g, I), 2);
        for (const auto& J : Js) in.power(in.add(g, J), 2);
        auto v = in.run(q);
        RatioReport r;
        r.functional = "l2l2";
        r.params = {{"R", std::to_string(R)}, {"side", dstr(Delta.side)}};
        r.lhs = v[0];
        for (size_t k = 1; k < v.size(); ++k) r.rhs += v[k];
        finish(r, "check_l2l2");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"Delta", square_str(Delta)}});
        r.details = {{"blocks", static_cast<double>(Js.size())}};
        return r;
    });
}

namespace {

// Grid maxima of |E_I g| polished by compass search, so the sup does not depend on the grid.
double refine_sup(const SymbolFunction& g, const DyadicInterval& I, const Square& D, const TensorGrid& grid,
                  const Eigen::MatrixXcd& f, const QuadratureSpec& q) {
    const Eigen::Index n1 = f.rows();
    std::vector<Eigen::Index> idx(static_cast<size_t>(f.size()));
    for (Eigen::Index k = 0; k < f.size(); ++k) idx[static_cast<size_t>(k)] = k;
    const size_t top = std::min<size_t>(8, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        double va = std::abs(f.data()[a]), vb = std::abs(f.data()[b]);
        return va != vb ? va > vb : a < b;
    });
    auto value = [&](const Point& x) { return std::abs(eval_extension(g, I, x, q)); };
    auto clamp = [&](Point x) {
        for (int k = 0; k < 2; ++k) x[static_cast<size_t>(k)] = std::clamp(x[static_cast<size_t>(k)], D.lo(k), D.hi(k));
        return x;
    };
    double best = 0;
    for (size_t t = 0; t < top; ++t) {
        Eigen::Index k = idx[t];
        Point x{grid.a1.x[static_cast<size_t>(k % n1)], grid.a2.x[static_cast<size_t>(k / n1)]};
        double v = value(x);
        double h = D.side / static_cast<double>(std::max<size_t>(grid.a1.size(), 2));
        while (h > 1e-10 * D.side) {
            bool moved = false;
            for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
                Point y = clamp({x[0] + dx * h, x[1] + dy * h});
                double w = value(y);
                if (w > v) {
                    x = y;
                    v = w;
                    moved = true;
                }
            }
            if (!moved) h /= 2;
        }
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

RatioReport check_bernstein(const SymbolFunction& g, const DyadicInterval& I, const Square& Delta, double p,
                            const EvalOptions& opt) {
    if (!(p >= 1) || std::isinf(p)) fail(ErrorKind::Domain, "p = " + dstr(p) + " outside [1, inf)");
    if (std::fabs(I.len() * Delta.side - 1) > 1e-12) fail(ErrorKind::Precondition, "Bernstein needs |I| = 1/side(Delta)");
    return certify(opt, [&](const QuadratureSpec& q) {
        TensorGrid grid = grid_on_square(Delta, std::max(field_bandwidth(I), 1e-3), q);
        Eigen::MatrixXcd f = eval_extension_tensor(g, I, grid.a1.x, grid.a2.x, q);
        RatioReport r;
        r.functional = "bernstein";
        r.params = {{"p", dstr(p)}, {"side", dstr(Delta.side)}};
        r.lhs = refine_sup(g, I, Delta, grid, f, q);
        Integrator in;
        in.D = Delta;
        in.weighted = true;
        in.power(in.add(g, I), p);
        r.rhs = std::pow(in.run(q)[0] / Delta.area(), 1 / p);
        finish(r, "check_bernstein");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I", I.str()}, {"Delta", square_str(Delta)}});
        r.details = {{"sample_points", static_cast<double>(grid.size())}};
        return r;
    });
}

RatioReport ball_inflation_ratio(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                 const Rational& nu, int b, const Square& Dp, const EvalOptions& opt) {
    require_reciprocal(nu, "nu");
    if (b < 1) fail(ErrorKind::Domain, "b must be a positive integer");
    const Rational nub = rpow(nu, b);
    if (I1.length != nub || I2.length != nub) fail(ErrorKind::Precondition, "ball inflation needs |I1| = |I2| = nu^b");
    if (I1 == I2) fail(ErrorKind::Precondition, "ball inflation needs two distinct separated intervals");
    require_separation(I1, I2, nu, "ball inflation");
    const double side = side_of(nub);
    require_side(Dp, side * side, "Delta'");
    return certify(opt, [&](const QuadratureSpec& q) {
        RatioReport r;
        r.functional = "ball_inflation";
        r.params = {{"nu", rstr(nu)}, {"b", std::to_string(b)}};
        r.lhs = local_24_average(g, I1, I2, Dp, side, q);
        Integrator in;
        in.D = Dp;
        in.weighted = true;
        size_t k1 = in.add(g, I1), k2 = in.add(g, I2);
        in.power(k1, 2);
        in.power(k2, 4);
        auto v = in.run(q);
        r.rhs = to_double(Rational(1) / nu) * (v[0] / Dp.area()) * (v[1] / Dp.area());
        finish(r, "ball_inflation_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I1", I1.str()}, {"I2", I2.str()}, {"Delta'", square_str(Dp)}});
        return r;
    });
}

RatioReport ball_inflation_s_ratio(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                   const Rational& nu, int b, double s, const Square& Dp, double eps,
                                   const EvalOptions& opt) {
    if (!(eps > 0)) fail(ErrorKind::Domain, "eps must be positive");
    require_reciprocal(nu, "nu");
    require_s(s);
    if (b < 1) fail(ErrorKind::Domain, "b must be a positive integer");
    require_piece(I1, nu, "I1");
    require_piece(I2, nu, "I2");
    require_separation(I1, I2, nu, "ball inflation");
    const Rational nub = rpow(nu, b);
    const double side = side_of(nub);
    require_side(Dp, side * side, "Delta'");
    auto Js = partition_interval(I1, nub), Jps = partition_interval(I2, nub);
    const double t = 6 - s;
    // (sum_J ||E_J||^2_{L^s_#})^(s/2) (sum_J' ||E_J'||^2_{L^t_#})^(t/2) on one square
    auto block = [&](const Square& d, const QuadratureSpec& q, std::vector<double>* n1, std::vector<double>* n2) {
        Integrator in;
        in.D = d;
        in.weighted = true;
        for (const auto& J : Js) in.power(in.add(g, J), s);
        for (const auto& J : Jps) in.power(in.add(g, J), t);
        auto v = in.run(q);
        double a = 0, c = 0;
        for (size_t k = 0; k < Js.size(); ++k) {
            double nk = std::pow(v[k] / d.area(), 1 / s);
            if (n1) n1->push_back(nk);
            a += nk * nk;
        }
        for (size_t k = 0; k < Jps.size(); ++k) {
            double nk = std::pow(v[Js.size() + k] / d.area(), 1 / t);
            if (n2) n2->push_back(nk);
            c += nk * nk;
        }
        return std::pow(a, s / 2) * std::pow(c, t / 2);
    };
    return certify(opt, [&](const QuadratureSpec& q) {
        RatioReport r;
        r.functional = "ball_inflation_s";
        r.params = {{"nu", rstr(nu)}, {"b", std::to_string(b)}, {"s", dstr(s)}, {"eps", dstr(eps)}};
        r.lhs = delta_average(Dp, side, [&](const Square& d) { return block(d, q, nullptr, nullptr); });
        std::vector<double> n1, n2;
        double top = block(Dp, q, &n1, &n2);
        r.rhs = std::pow(to_double(nu), -1 - b * eps) * top;
        finish(r, "ball_inflation_s_ratio");
        r.quad_error = weight_tail_fraction(q.K);
        r.witness_ref = witness(g, {{"I1", I1.str()}, {"I2", I2.str()}, {"Delta'", square_str(Dp)}});
        // dyadic pigeonholing: class k holds the blocks with norm in (max 2^-(k+1), max 2^-k]
        auto families = [&](const std::vector<double>& n, const std::string& tag) {
            double mx = *std::max_element(n.begin(), n.end());
            std::map<int, int> cls;
            for (double x : n)
                if (x > 0) cls[static_cast<int>(std::floor(std::log2(mx / x)))]++;
            r.details.emplace_back(tag + ".classes", static_cast<double>(cls.size()));
            for (auto [k, c] : cls) r.details.emplace_back(tag + ".class" + std::to_string(k), c);
        };
        families(n1, "F1");
        families(n2, "F2");
        return r;
    });
}

std::vector<int> random_phase_draw(size_t n, uint64_t seed, uint64_t restart) {
    Rng rng(seed ^ (0x9E3779B97F4A7C15ull * (restart + 1)));
    std::vector<int> ph(n, 0);
    for (size_t k = 1; k < n; ++k) ph[k] = static_cast<int>(rng.next() >> 58);
    return ph;
}

SymbolFunction phase_symbol(const std::vector<int>& phases) {
    std::vector<cplx> c;
    for (int k : phases) c.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 64));
    SymbolFunction g = SymbolFunction::explicit_coefficients(c);
    std::string lab = "phases64(";
    for (size_t i = 0; i < phases.size(); ++i) lab += (i ? " " : "") + std::to_string(phases[i]);
    g.label = lab + ")";
    return g;
}

SearchResult search_lower_bound(const Rational& delta, double p, int budget, uint64_t seed, const EvalOptions& opt) {
    require_reciprocal(delta, "delta");
    if (budget < 1) fail(ErrorKind::Domain, "budget must be >= 1");
    if (!(p >= 2 && p <= 6)) fail(ErrorKind::Domain, "p = " + dstr(p) + " outside [2,6]");
    opt.q.validate();
    const double inv = side_of(delta);
    const Square B{{0, 0}, inv * inv};
    const size_t n = static_cast<size_t>(std::llround(inv));
    auto Js = partition_interval(unit_interval(), delta);
    const QuadratureSpec& q = opt.q;
    // Fixed blocks E_{J_k} 1 on the left-side grid; unimodular coefficients leave the
    // right side unchanged, so only the left side is re-evaluated.
    TensorGrid grid = grid_on_square(B, p / 2, q);
    const size_t np = grid.size();
    if (np * n > 200'000'000) fail(ErrorKind::Cap, "search grid too large; use delta >= 1/8");
    const SymbolFunction one = SymbolFunction::constant_one();
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(n));
    for (size_t k = 0; k < n; ++k) {
        Eigen::MatrixXcd m = eval_extension_tensor(one, Js[k], grid.a1.x, grid.a2.x, q);
        F.col(static_cast<Eigen::Index>(k)) = Eigen::Map<Eigen::VectorXcd>(m.data(), m.size());
    }
    Eigen::VectorXd W(static_cast<Eigen::Index>(np));
    for (size_t j = 0; j < grid.a2.size(); ++j)
        for (size_t i = 0; i < grid.a1.size(); ++i) W(static_cast<Eigen::Index>(i + grid.a1.size() * j)) = grid.a1.w[i] * grid.a2.w[j];
    std::vector<cplx> unit(64);
    for (int k = 0; k < 64; ++k) unit[static_cast<size_t>(k)] = std::polar(1.0, 2 * std::numbers::pi * k / 64);

    SearchResult res;
    auto value = [&](const std::vector<int>& ph) {
        ++res.evaluations;
        Eigen::VectorXcd c(static_cast<Eigen::Index>(n));
        for (size_t k = 0; k < n; ++k) c(static_cast<Eigen::Index>(k)) = unit[static_cast<size_t>(ph[k])];
        Eigen::VectorXcd f = F * c;
        double s = 0;
        for (Eigen::Index i = 0; i < f.size(); ++i) s += W(i) * hpow(std::norm(f(i)), p / 2);
        return s;
    };
    std::vector<int> best = random_phase_draw(n, seed, 0), cur = best;
    double best_v = value(best), cur_v = best_v;
    if (res.evaluations < budget) {
        std::vector<int> ones(n, 0);
        double v = value(ones);
        if (v > best_v) best = ones, best_v = v;
        cur = best;
        cur_v = best_v;
    }
    uint64_t restart = 0;
    while (res.evaluations < budget) {
        bool improved = false;
        for (size_t k = 1; k < n && res.evaluations < budget; ++k) {
            for (int step = 1; step < 64 && res.evaluations < budget; ++step) {
                std::vector<int> cand = cur;
                cand[k] = (cur[k] + step) % 64;
                double v = value(cand);
                if (v > cur_v) {
                    cur = cand;
                    cur_v = v;
                    improved = true;
                    break;
                }
            }
        }
        if (cur_v > best_v) best = cur, best_v = cur_v;
        if (!improved && res.evaluations < budget) {
            cur = random_phase_draw(n, seed, ++restart);
            cur_v = value(cur);
            if (cur_v > best_v) best = cur, best_v = cur_v;
        }
    }
    res.phases = best;
    res.report = linear_ratio(phase_symbol(best), delta, p, B, opt);
    res.report.functional = "search_lower_bound";
    res.report.params.emplace_back("budget", std::to_string(budget));
    res.report.params.emplace_back("seed", std::to_string(seed));
    res.report.details.emplace_back("evaluations", res.evaluations);
    res.report.details.emplace_back("restarts", static_cast<double>(restart));
    return res;
}

RatioReport check_bilinear_reduction(const SymbolFunction& g, const Rational& delta, const Rational& nu,
                                     const Square& B, const EvalOptions& opt) {
    require_reciprocal(delta, "delta");
    require_reciprocal(nu, "nu");
    if (!is_integer(nu / delta)) fail(ErrorKind::Precondition, "nu / delta = " + rstr(nu / delta) + " is not an integer");
    const double inv = side_of(delta);
    require_side(B, inv * inv, "B");
    auto Is = partition_interval(unit_interval(), nu);
    return certify(opt, [&](const QuadratureSpec& q) {
        std::vector<FieldSpec> fs;
        for (const auto& I : Is) fs.push_back({&g, I});
        TensorGrid grid = grid_on_square(B, 3.0, q);
        const size_t n = Is.size();
        // |E_[0,1] g|^6, diagonal^3, off-diagonal^3, (sum |E_I|)^6
        auto acc = grid_reduce(grid, fs, q, 4, [n](const BlockView& v, std::vector<double>& a) {
            std::vector<cplx> f(n);
            std::vector<double> m(n);
            for (Eigen::Index j = 0; j < v.n2; ++j)
                for (Eigen::Index i = 0; i < v.n1; ++i) {
                    double w = v.w1[i] * v.w2[j];
                    cplx tot = 0;
                    double sum = 0;
                    for (size_t k = 0; k < n; ++k) {
                        f[k] = v.fields[k](i, j);
                        tot += f[k];
                        m[k] = std::abs(f[k]);
                        sum += m[k];
                    }
                    double diag = 0, off = 0;
                    for (size_t r = 0; r < n; ++r)
                        for (size_t c = 0; c < n; ++c) {
                            double pr = m[r] * m[c];
                            if ((r > c ? r - c : c - r) <= 3) diag += pr;
                            else off += pr;
                        }
                    a[0] += w * hpow(std::norm(tot), 3);
                    a[1] += w * diag * diag * diag;
                    a[2] += w * off * off * off;
                    a[3] += w * hpow(sum * sum, 3);
                }
        });
        RatioReport r;
        r.functional = "bilinear_reduction";
        r.params = {{"delta", rstr(delta)}, {"nu", rstr(nu)}};
        r.lhs = std::pow(acc[0], 1 / 6.0);
        double diag = std::cbrt(acc[1]), off = std::cbrt(acc[2]);
        r.rhs = std::sqrt(2.0) * (std::sqrt(diag) + std::sqrt(off));
        finish(r, "check_bilinear_reduction");
        r.witness_ref = witness(g, {{"B", square_str(B)}});
        r.details = {{"diagonal", diag}, {"offdiagonal", off}, {"pair_sum", std::pow(acc[3], 1 / 6.0)}};
        return r;
    });
}

namespace {

void check_abup_shapes(const DyadicInterval& I1, const DyadicInterval& I2, const ScaleParams& sp, const Square& B) {
    require_reciprocal(sp.delta, "delta");
    require_reciprocal(sp.nu, "nu");
    if (!(1 <= sp.a && sp.a <= 2 * sp.b)) fail(ErrorKind::Precondition, "needs 1 <= a <= 2b");
    if (!is_integer(rpow(sp.nu, 2 * sp.b) / sp.delta)) fail(ErrorKind::Precondition, "nu^(2b) / delta is not an integer");
    require_piece(I1, rpow(sp.nu, sp.a), "I1");
    require_piece(I2, rpow(sp.nu, sp.b), "I2");
    require_separation(I1, I2, 3 * sp.nu, "the pairing argument");
    double inv = side_of(sp.delta);
    require_side(B, inv * inv, "B");
}

// Spatial bandwidth of E_J g after the shear moving beta to the origin: x1 rate |J|,
// x2 rate spread of (xi - beta)^2 over J.
double sheared_bandwidth(const DyadicInterval& J, double beta) {
    double a = J.lo() - beta, b = J.hi() - beta;
    double hi = std::max(a * a, b * b), lo = (a <= 0 && b >= 0) ? 0 : std::min(a * a, b * b);
    return std::max(J.len(), hi - lo);
}

double quadratic_gap(const DyadicInterval& J1, const DyadicInterval& J2, double beta) {
    // min |u^2 - v^2| over u in J1 - beta, v in J2 - beta (both sides of fixed sign here)
    auto range = [beta](const DyadicInterval& J) {
        double a = J.lo() - beta, b = J.hi() - beta;
        double hi = std::max(a * a, b * b), lo = (a <= 0 && b >= 0) ? 0 : std::min(a * a, b * b);
        return std::make_pair(lo, hi);
    };
    auto [l1, h1] = range(J1);
    auto [l2, h2] = range(J2);
    return std::max({0.0, l1 - h2, l2 - h1});
}

std::vector<RatioReport> pairings(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                  const std::vector<DyadicInterval>& Js, const ScaleParams& sp, const Square& B,
                                  const QuadratureSpec& q) {
    const double beta = I2.lo();
    const size_t n = Js.size();
    std::vector<FieldSpec> fs;
    double bwJ = 0;
    for (const auto& J : Js) {
        fs.push_back({&g, J, beta});
        bwJ = std::max(bwJ, sheared_bandwidth(J, beta));
    }
    fs.push_back({&g, I2, beta});
    // pair products plus two copies of the I2 bandwidth
    double freq = 2 * bwJ + 2 * sheared_bandwidth(I2, beta);
    TensorGrid grid = grid_weighted(B, freq, q);
    const Square Bc = B;
    // accumulators: re, im of P(i, j) for i <= j, row major
    const size_t np = n * (n + 1) / 2;
    auto acc = grid_reduce(grid, fs, q, 2 * np, [n, Bc](const BlockView& v, std::vector<double>& a) {
        std::vector<cplx> f(n);
        for (Eigen::Index j = 0; j < v.n2; ++j)
            for (Eigen::Index i = 0; i < v.n1; ++i) {
                double w = v.w1[i] * v.w2[j] * weight_value(Bc, {v.x1[i], v.x2[j]});
                double e4 = std::norm(v.fields[n](i, j));
                w *= e4 * e4;
                for (size_t k = 0; k < n; ++k) f[k] = v.fields[k](i, j);
                size_t t = 0;
                for (size_t r = 0; r < n; ++r)
                    for (size_t c = r; c < n; ++c, ++t) {
                        cplx z = f[r] * std::conj(f[c]);
                        a[2 * t] += w * z.real();
                        a[2 * t + 1] += w * z.imag();
                    }
            }
    });
    std::vector<double> diag(n);
    {
        size_t t = 0;
        for (size_t r = 0; r < n; ++r)
            for (size_t c = r; c < n; ++c, ++t)
                if (r == c) diag[r] = acc[2 * t];
    }
    const double unit = to_double(rpow(sp.nu, 2 * sp.b));
    const Rational literal = 10 * rpow(sp.nu, 2 * sp.b - 1);
    std::vector<RatioReport> out;
    size_t t = 0;
    for (size_t r = 0; r < n; ++r)
        for (size_t c = r; c < n; ++c, ++t) {
            RatioReport rep;
            rep.functional = "abup_vanishing";
            rep.params = scale_params(sp);
            rep.params.emplace_back("J1", Js[r].str());
            rep.params.emplace_back("J2", Js[c].str());
            rep.lhs = std::hypot(acc[2 * t], acc[2 * t + 1]);
            rep.rhs = std::sqrt(diag[r] * diag[c]);
            finish(rep, "check_abup_vanishing");
            rep.quad_error = weight_tail_fraction(q.K);
            rep.witness_ref = witness(g, {{"I1", I1.str()}, {"I2", I2.str()}, {"B", square_str(B)}});
            double qg = quadratic_gap(Js[r], Js[c], beta);
            bool far = qg > 5 * unit;
            rep.details = {{"index_gap", static_cast<double>(c - r)},
                           {"quadratic_gap", qg / unit},
                           {"far", far ? 1.0 : 0.0},
                           {"literal_far", gap(Js[r], Js[c]) > literal ? 1.0 : 0.0}};
            if (far) rep.flags.push_back("far_pair");
            out.push_back(std::move(rep));
        }
    return out;
}

}  // namespace

bool abup_far_pair(const DyadicInterval& I2, const DyadicInterval& J1, const DyadicInterval& J2, const ScaleParams& sp) {
    return quadratic_gap(J1, J2, I2.lo()) > 5 * to_double(rpow(sp.nu, 2 * sp.b));
}

RatioReport check_abup_vanishing(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                 const DyadicInterval& J1, const DyadicInterval& J2, const ScaleParams& sp,
                                 const Square& B, const EvalOptions& opt) {
    check_abup_shapes(I1, I2, sp, B);
    const Rational ell = rpow(sp.nu, 2 * sp.b);
    for (const auto* J : {&J1, &J2})
        if (J->length != ell || !I1.contains(*J) || !is_integer((J->left - I1.left) / ell))
            fail(ErrorKind::Precondition, J->str() + " is not an element of P_" + rstr(ell) + "(" + I1.str() + ")");
    std::vector<DyadicInterval> Js = {J1};
    if (!(J2 == J1)) Js.push_back(J2);
    return certify(opt, [&](const QuadratureSpec& q) {
        auto reps = pairings(g, I1, I2, Js, sp, B, q);
        return Js.size() == 1 ? reps[0] : reps[1];
    });
}

std::vector<RatioReport> abup_pairings(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                       const ScaleParams& sp, const Square& B, const EvalOptions& opt) {
    check_abup_shapes(I1, I2, sp, B);
    opt.q.validate();
    auto Js = partition_interval(I1, rpow(sp.nu, 2 * sp.b));
    auto reps = pairings(g, I1, I2, Js, sp, B, opt.q);
    if (opt.estimate_error) {
        auto fine = pairings(g, I1, I2, Js, sp, B, opt.q.doubled());
        for (size_t i = 0; i < reps.size(); ++i)
            reps[i].quad_error = std::max(reps[i].quad_error, rel_change(reps[i].lhs, fine[i].lhs));
    }
    return reps;
}

}  // namespace declab
