#include "declab/recursion.hpp"

#include <cmath>
#include <string>

#include "declab/common.hpp"

namespace declab {

namespace {

void check_eps(long double eps) {
    // Accepts (0, 1/2]; the chain is only meaningful below 1/100 but the
    // fixed-point algebra is well defined on the wider range.
    if (!(eps > 0 && eps <= 0.5L)) fail(ErrorKind::Domain, "eps must lie in (0, 1/2], got " + std::to_string(static_cast<double>(eps)));
}

long double two_pow(int N) { return std::ldexp(1.0L, N); }

// The shared tail:  delta-power * L + sum_j 2^-(j+1) ln D(delta^(1 - 2^-(N-j))).
ExtScalar product_term(int N, const std::vector<ExtScalar>& ln_D, const ExtScalar& L, long double delta_power) {
    ExtScalar t = ExtScalar(delta_power) * L;
    for (int j = 0; j < N; ++j) t += ExtScalar(1.0L / two_pow(j + 1)) * ln_D[static_cast<size_t>(N - j - 1)];
    return t;
}

void check_chain(int N, size_t have, size_t want) {
    if (N < 1) fail(ErrorKind::Domain, "N must be >= 1");
    if (have != want)
        fail(ErrorKind::Domain, "expected " + std::to_string(want) + " D-values for N=" + std::to_string(N) + ", got " + std::to_string(have));
}

}  // namespace

LogBound almost_mult(const LogBound& d_sigma, const LogBound& d_ratio) {
    LogBound out;
    out.ln_value = ExtScalar(20000 * kLn10) + d_sigma.ln_value + d_ratio.ln_value;
    out.symbolic_constant = d_sigma.symbolic_constant || d_ratio.symbolic_constant;
    return out;
}

LogBound m11_chain(int N, const std::vector<ExtScalar>& ln_D, long double nu) {
    check_chain(N, ln_D.size(), static_cast<size_t>(N) + 1);
    if (!(nu > 0 && nu < 1)) fail(ErrorKind::Domain, "nu must lie in (0, 1)");
    const long double s = 3 * two_pow(N);
    ExtScalar v = ExtScalar(60000 * kLn10) + ExtScalar(std::log(1 / nu) / 3);
    v += ExtScalar(1 / s) * ln_D[static_cast<size_t>(N - 1)];
    v += ExtScalar(2 / s) * ln_D[static_cast<size_t>(N)];
    for (int j = 0; j < N; ++j) v += ExtScalar(1.0L / two_pow(j + 1)) * ln_D[static_cast<size_t>(j)];
    return {v, false, {}};
}

std::vector<std::string> core_flags(int N, const ExtScalar& L) {
    std::vector<std::string> flags;
    ExtScalar root_log = L / ExtScalar(two_pow(N));  // ln of delta^(-1/2^N)
    if (root_log > ExtScalar(36)) {
        flags.push_back("delta_root_integrality_unverified");
    } else {
        long double q = std::exp(root_log.to_long_double());
        if (std::fabs(q - std::round(q)) > 1e-9L * q) flags.push_back("delta_root_not_integer");
    }
    if (root_log <= ExtScalar(std::log(100.0L))) flags.push_back("delta_not_below_100^-2^N");
    return flags;
}

LogBound iter_generic(int N, IterVariant v, const std::vector<ExtScalar>& ln_D, const ExtScalar& L, long double eps) {
    check_chain(N, ln_D.size(), static_cast<size_t>(N));
    if (L.sign() <= 0) fail(ErrorKind::Domain, "L = ln(1/delta) must be positive");
    const long double s = 3 * two_pow(N);
    LogBound out;
    out.flags = core_flags(N, L);
    const ExtScalar& first = ln_D[static_cast<size_t>(N - 1)];
    switch (v) {
        case IterVariant::Core: {
            ExtScalar second = product_term(N, ln_D, L, 4 / s) + ExtScalar(1 / s) * ln_D[0];
            out.ln_value = ExtScalar(1e5L * kLn10) + ExtScalar(kLn2) + max(first, second);
            break;
        }
        case IterVariant::Iter1:
            out.ln_value = max(first, product_term(N, ln_D, L, 4 / s));
            out.symbolic_constant = true;
            break;
        case IterVariant::Bds:
            if (eps < 0) fail(ErrorKind::Domain, "eps must be >= 0");
            out.ln_value = max(first, product_term(N, ln_D, L, 4 / s + N * eps / (6 * two_pow(N))));
            out.symbolic_constant = true;
            break;
    }
    return out;
}

LogBound core_recursion(int N, const std::vector<ExtScalar>& ln_D, const ExtScalar& L) {
    return iter_generic(N, IterVariant::Core, ln_D, L, 0);
}

namespace {
long double expstep1_margin(long double eps, int N) { return 5.0L / 6 + N / 2.0L - 4 / (3 * eps); }
}  // namespace

int expstep1_min_N(long double eps) {
    check_eps(eps);
    int N = std::max(1, static_cast<int>(std::floor(2 * (4 / (3 * eps) - 5.0L / 6))) - 2);
    while (expstep1_margin(eps, N) <= 1e-12L) ++N;
    return N;
}

BoundHypothesis expstep1(const BoundHypothesis& h, int N) {
    check_eps(h.eps);
    if (N < 1 || expstep1_margin(h.eps, N) <= 1e-12L)
        fail(ErrorKind::Precondition, "expstep1 needs 5/6 + N/2 - 4/(3 eps) > 0; N=" + std::to_string(N) +
                                          " eps=" + std::to_string(static_cast<double>(h.eps)) +
                                          " (smallest valid N is " + std::to_string(expstep1_min_N(h.eps)) + ")");
    ExtScalar shrink = ExtScalar(1) - ExtScalar(h.eps / two_pow(N));
    return {ExtScalar(kLn2 + 1e5L * kLn10) + shrink * h.ln_C, h.eps};
}

int expstep2_N(long double eps) {
    check_eps(eps);
    return static_cast<int>(std::ceil(8 / (3 * eps) - 5.0L / 3 - 1e-9L));
}

namespace {
struct Affine {
    ExtScalar c, u;  // x -> c + (1 - u) x
};
Affine expstep2_map(long double eps) {
    ExtScalar eight_pow = pow(ExtScalar(8), 1 / eps);
    return {ExtScalar(1e6L * kLn10) + ExtScalar(4 * kLn2) * eight_pow, ExtScalar(eps) / eight_pow};
}
}  // namespace

BoundHypothesis expstep2(const BoundHypothesis& h) {
    check_eps(h.eps);
    Affine f = expstep2_map(h.eps);
    return {f.c + h.ln_C - f.u * h.ln_C, h.eps};
}

FixedPoint expstep3_fixed_point(long double eps, const ExtScalar& start) {
    check_eps(eps);
    Affine f = expstep2_map(eps);
    FixedPoint fp;
    fp.closed_form = f.c / f.u;
    fp.ceiling = pow(ExtScalar(200), 1 / eps) * ExtScalar(kLn2);

    // f^(2^k) = c_k + r_k x with r_k = (1 - u)^(2^k). 1 - u rounds to 1 natively, so r_k
    // is carried through its log, which doubles exactly each round.
    ExtScalar lr = f.u < ExtScalar(1e-4L)
                       ? -(f.u + f.u * f.u / ExtScalar(2) + f.u * f.u * f.u / ExtScalar(3))
                       : ExtScalar(std::log1p(-f.u.to_long_double()));
    auto r_of = [](const ExtScalar& l) {
        return l < ExtScalar(-1e15L) ? ExtScalar(0) : exp(l);
    };
    ExtScalar c = f.c;
    ExtScalar x = start;
    for (long long k = 0;; ++k) {
        if (k >= 1000000) fail(ErrorKind::Convergence, "expstep3 iteration did not converge");
        ExtScalar r = r_of(lr);
        ExtScalar nx = c + r * start;
        bool start_forgotten = (r * start).abs() <= ExtScalar(1e-12L) * c.abs();
        if (k > 0 && start_forgotten && (nx - x).abs() <= ExtScalar(1e-12L) * nx.abs()) {
            x = nx;
            fp.squarings = k;
            break;
        }
        x = nx;
        c = c * (ExtScalar(1) + r);
        lr = lr * ExtScalar(2);
    }
    fp.iterated = x;
    bool below = start <= fp.closed_form;
    fp.ordered = fp.closed_form <= fp.ceiling &&
                 (!below || fp.iterated <= fp.closed_form * ExtScalar(1 + 1e-9L));
    return fp;
}

ExtScalar theorem_threshold() { return pow(ExtScalar(200), 200); }

TheoremBound theorem_bound(const ExtScalar& L) {
    if (!(L > theorem_threshold()))
        fail(ErrorKind::Precondition, "theorem bound needs delta < e^{-200^200}, i.e. L = ln(1/delta) > 200^200; got L=" + L.str());
    TheoremBound t;
    t.L = L;
    const long double ln200 = std::log(200.0L);
    t.A = ExtScalar(ln200 / kLn2) * L;
    long double lnA = ln(t.A).to_long_double();
    long double lnlnA = std::log(lnA);
    long double lnL = ln(L).to_long_double();
    t.eta_aux = lnA - lnlnA;
    t.eps = ln200 / t.eta_aux;

    // 200^(1/eps) = e^eta, compared in log space
    t.gate_eps = t.eta_aux + std::log(kLn2) <= std::log(t.eps) + lnL;
    t.gate_eta = std::log(t.eta_aux) + t.eta_aux <= lnA;
    bool chain1 = lnlnA < std::sqrt(lnA);
    bool chain2 = lnA - std::sqrt(lnA) >= lnA / 2;
    bool chain3 = lnA / 2 >= lnL / 2;  // ln ln(1/delta) = ln L
    bool chain4 = 2 * ln200 / lnL < 0.01L;
    t.gate_small = chain1 && chain2 && chain3 && chain4 && t.eps < 0.01L;

    t.ln_bound = ExtScalar(2 * t.eps) * L;
    t.target = ExtScalar(30) * L / ExtScalar(lnL);
    t.within_target = t.ln_bound <= t.target;
    return t;
}

int bootstrap_min_N(long double lambda) {
    if (!(lambda > 0)) fail(ErrorKind::Domain, "lambda must be > 0");
    int N = static_cast<int>(std::ceil(1.0L / 3 + 8 / (3 * lambda) - 1e-12L));
    return std::max(N, 1);
}

BootstrapReport bootstrap_check(long double lambda, int N) {
    if (!(lambda > 0)) fail(ErrorKind::Domain, "lambda must be > 0");
    if (N < 1) fail(ErrorKind::Domain, "N must be >= 1");
    BootstrapReport r;
    r.lambda = lambda;
    r.N = N;
    r.min_N = bootstrap_min_N(lambda);
    const long double P = two_pow(N);
    r.lhs = 4 / (3 * P) + lambda / (6 * P);
    for (int j = 0; j < N; ++j) r.lhs += (1 - 1 / two_pow(N - j)) * lambda / two_pow(j + 1);
    r.rhs = lambda * (1 - (5.0L / 6 + N / 2.0L - 4 / (3 * lambda)) / P);
    r.contracted = lambda * (1 - 1 / P);
    return r;
}

}  // namespace declab
