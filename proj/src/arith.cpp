#include "declab/arith.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "declab/common.hpp"
#include "declab/parallel.hpp"
#include "declab/rng.hpp"

namespace declab {

namespace {

using u128 = unsigned __int128;

BigInt from_u128(u128 v) {
    BigInt r = static_cast<uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<uint64_t>(v);
    return r;
}

int64_t mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

void check_x(int64_t X, const ArithCaps& caps) {
    if (X < 1) fail(ErrorKind::Domain, "X must be >= 1, got " + std::to_string(X));
    if (X > caps.max_x) fail(ErrorKind::Cap, "X=" + std::to_string(X) + " exceeds cap " + std::to_string(caps.max_x));
}

void check_params(const ArithParams& q, const ArithCaps& caps) {
    check_x(q.X, caps);
    if (!is_prime(q.p)) fail(ErrorKind::Domain, "p=" + std::to_string(q.p) + " is not prime");
    if (q.a < 0 || q.b < 0) fail(ErrorKind::Domain, "a, b must be nonnegative");
    if (q.xi < 0 || q.xi >= ipow(q.p, q.a)) fail(ErrorKind::Domain, "xi out of range [0, p^a)");
    if (q.eta < 0 || q.eta >= ipow(q.p, q.b)) fail(ErrorKind::Domain, "eta out of range [0, p^b)");
}

}  // namespace

bool is_prime(int64_t p) {
    if (p < 2) return false;
    for (int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int64_t ipow(int64_t base, int e) {
    int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > (int64_t(1) << 62) / base) fail(ErrorKind::Range, "integer power overflow");
        r *= base;
    }
    return r;
}

CoefficientVector CoefficientVector::zeros(int64_t N) {
    if (N < 0) fail(ErrorKind::Domain, "N must be >= 0");
    return {N, std::vector<cplx>(static_cast<size_t>(2 * N + 1), cplx(0, 0))};
}

CoefficientVector CoefficientVector::ones_on(int64_t N, int64_t lo, int64_t hi) {
    auto c = zeros(N);
    for (int64_t n = std::max(lo, -N); n <= std::min(hi, N); ++n) c.a[static_cast<size_t>(n + N)] = 1.0;
    return c;
}

CoefficientVector CoefficientVector::random(int64_t N, uint64_t seed) {
    auto c = zeros(N);
    Rng rng(seed);
    for (auto& v : c.a) {
        double re = 2 * rng.uniform() - 1;
        double im = 2 * rng.uniform() - 1;
        v = cplx(re, im);
    }
    return c;
}

BigInt count_classes(int64_t X, int64_t mx, int64_t rx, int64_t my, int64_t ry) {
    std::vector<int64_t> xs;
    for (int64_t x = 1; x <= X; ++x)
        if (mod(x, mx) == mod(rx, mx)) xs.push_back(x);
    int64_t y0 = mod(ry, my) == 0 ? my : mod(ry, my);  // smallest y >= 1 in the class
    if (xs.empty() || y0 > X) return 0;
    int64_t smin = xs.front() + 2 * y0, smax = xs.back() + 2 * X;
    size_t ns = static_cast<size_t>(smax - smin + 1);
    std::vector<u128> per_s(ns, 0);

    parallel_for(ns, [&](size_t k) {
        int64_t s = smin + static_cast<int64_t>(k);
        int64_t need = mod(s - 2 * ry, my);
        std::vector<uint64_t> keys;
        for (int64_t x : xs) {
            if (mod(x, my) != need) continue;
            int64_t lo = std::max<int64_t>(y0, s - x - X), hi = std::min<int64_t>(X, s - x - 1);
            if (lo > hi) continue;
            int64_t first = lo + mod(y0 - lo, my);
            for (int64_t y = first; y <= hi; y += my) {
                int64_t z = s - x - y;
                keys.push_back(static_cast<uint64_t>(x * x + y * y + z * z));
            }
        }
        std::sort(keys.begin(), keys.end());
        u128 acc = 0;
        for (size_t i = 0; i < keys.size();) {
            size_t j = i;
            while (j < keys.size() && keys[j] == keys[i]) ++j;
            u128 run = j - i;
            acc += run * run;
            i = j;
        }
        per_s[k] = acc;
    });

    u128 total = 0;
    for (u128 v : per_s) total += v;
    return from_u128(total);
}

BigInt count_J(int64_t X, const ArithCaps& caps) {
    check_x(X, caps);
    return count_classes(X, 1, 0, 1, 0);
}

BigInt count_J_bruteforce(int64_t X, const ArithCaps& caps) {
    if (X < 1) fail(ErrorKind::Domain, "X must be >= 1");
    if (X > caps.brute_max_x)
        fail(ErrorKind::Cap, "brute force limited to X <= " + std::to_string(caps.brute_max_x) + ", got " + std::to_string(X));
    uint64_t c = 0;
    for (int64_t x1 = 1; x1 <= X; ++x1)
        for (int64_t x2 = 1; x2 <= X; ++x2)
            for (int64_t x3 = 1; x3 <= X; ++x3)
                for (int64_t y1 = 1; y1 <= X; ++y1)
                    for (int64_t y2 = 1; y2 <= X; ++y2)
                        for (int64_t y3 = 1; y3 <= X; ++y3)
                            if (x1 + x2 + x3 == y1 + y2 + y3 &&
                                x1 * x1 + x2 * x2 + x3 * x3 == y1 * y1 + y2 * y2 + y3 * y3)
                                ++c;
    return c;
}

BigInt count_I1_class(const ArithParams& q, const ArithCaps& caps) {
    check_params(q, caps);
    return count_classes(q.X, ipow(q.p, q.a), q.xi, ipow(q.p, q.b), q.eta);
}

BigInt count_I1_xdiag_bruteforce(int64_t X, int64_t p, int a, int b, int64_t eta) {
    int64_t ma = ipow(p, a), mb = ipow(p, b);
    std::vector<int64_t> ys;
    for (int64_t y = 1; y <= X; ++y)
        if (mod(y, mb) == mod(eta, mb)) ys.push_back(y);
    uint64_t c = 0;
    for (int64_t x1 = 1; x1 <= X; ++x1)
        for (int64_t x2 = 1; x2 <= X; ++x2) {
            if (mod(x1 - x2, ma) != 0) continue;
            for (int64_t y1 : ys)
                for (int64_t y2 : ys)
                    for (int64_t y3 : ys)
                        for (int64_t y4 : ys)
                            if (x1 + y1 + y2 == x2 + y3 + y4 &&
                                x1 * x1 + y1 * y1 + y2 * y2 == x2 * x2 + y3 * y3 + y4 * y4)
                                ++c;
        }
    return c;
}

I1Max count_I1_max(int64_t X, int64_t p, int a, int b, const ArithCaps& caps) {
    if (a < 1 || b < 1) fail(ErrorKind::Domain, "max variant needs a, b >= 1");
    I1Max best;
    bool any = false;
    int64_t pa = ipow(p, a), pb = ipow(p, b);
    for (int64_t xi = 0; xi < pa; ++xi)
        for (int64_t eta = 0; eta < pb; ++eta) {
            if (mod(xi - eta, p) == 0) continue;
            BigInt v = count_I1_class({X, p, a, b, xi, eta}, caps);
            if (!any || v > best.count) best = {v, xi, eta};
            any = true;
        }
    return best;
}

bool lifting_admissible(int64_t p, int a, int b, int64_t xi, int64_t eta) {
    if (a == 0) return b >= 1;
    // x1 - x2 = 0 mod p^b from the linear equation; the quadratic one adds up to b more
    // digits when the x- and y-classes differ mod p.
    int forced;
    if (mod(xi - eta, p) == 0)
        forced = b;
    else
        forced = p == 2 ? 2 * b - 1 : 2 * b;
    return a + 1 <= forced;
}

LiftingCheck lifting_identity_check(const ArithParams& q, const ArithCaps& caps) {
    check_params(q, caps);
    LiftingCheck r;
    r.admissible = lifting_admissible(q.p, q.a, q.b, q.xi, q.eta);
    r.lhs = count_I1_class(q, caps);
    int64_t pa = ipow(q.p, q.a);
    r.rhs = 0;
    for (int64_t k = 0; k < q.p; ++k) r.rhs += count_I1_class({q.X, q.p, q.a + 1, q.b, q.xi + k * pa, q.eta}, caps);
    r.equal = r.lhs == r.rhs;
    return r;
}

CongruencingRatio congruencing_step_ratio(int64_t X, int64_t p, int a, int b, const ArithCaps& caps) {
    if (a < 1 || a > 2 * b) fail(ErrorKind::Precondition, "need 1 <= a <= 2b");
    if (ipow(p, 2 * b) > X) fail(ErrorKind::Precondition, "need p^(2b) <= X");
    CongruencingRatio r;
    auto num = count_I1_max(X, p, a, b, caps);
    auto den = count_I1_max(X, p, 2 * b, b, caps);
    r.numerator = num.count;
    r.denominator = den.count * ipow(p, 2 * b - a);
    if (r.denominator == 0) fail(ErrorKind::Domain, "empty denominator");
    r.xi_num = num.xi;
    r.eta_num = num.eta;
    r.xi_den = den.xi;
    r.eta_den = den.eta;
    const BigInt exact_limit = BigInt(1) << 53;
    if (r.numerator < exact_limit && r.denominator < exact_limit)
        r.ratio = r.numerator.convert_to<double>() / r.denominator.convert_to<double>();
    else
        r.ratio = boost::multiprecision::cpp_rational(r.numerator, r.denominator).convert_to<double>();
    r.flagged = r.ratio > 1.0;
    return r;
}

cplx weighted_sixth_moment(const CoefficientVector& c, const ArithCaps& caps) {
    const int64_t N = c.N;
    if (N < 0) fail(ErrorKind::Domain, "N must be >= 0");
    if (N > caps.max_n) fail(ErrorKind::Cap, "N=" + std::to_string(N) + " exceeds cap " + std::to_string(caps.max_n));
    std::vector<int64_t> support;
    for (int64_t n = -N; n <= N; ++n)
        if (c.at(n) != cplx(0, 0)) support.push_back(n);
    if (support.empty()) return {0, 0};
    int64_t smin = 3 * support.front(), smax = 3 * support.back();
    size_t ns = static_cast<size_t>(smax - smin + 1);
    std::vector<cplx> per_s(ns);

    parallel_for(ns, [&](size_t k) {
        int64_t s = smin + static_cast<int64_t>(k);
        std::vector<std::pair<int64_t, cplx>> items;
        for (int64_t n1 : support)
            for (int64_t n2 : support) {
                int64_t n3 = s - n1 - n2;
                if (n3 < -N || n3 > N) continue;
                cplx a3 = c.at(n3);
                if (a3 == cplx(0, 0)) continue;
                items.emplace_back(n1 * n1 + n2 * n2 + n3 * n3, c.at(n1) * c.at(n2) * a3);
            }
        std::stable_sort(items.begin(), items.end(),
                         [](const auto& u, const auto& v) { return u.first < v.first; });
        cplx acc = 0;
        for (size_t i = 0; i < items.size();) {
            cplx t = 0;
            size_t j = i;
            for (; j < items.size() && items[j].first == items[i].first; ++j) t += items[j].second;
            acc += t * std::conj(t);
            i = j;
        }
        per_s[k] = acc;
    });
    cplx total = 0;
    for (auto v : per_s) total += v;
    return total;
}

double torus_grid_integral(const CoefficientVector& c, const ArithCaps& caps) {
    const int64_t N = c.N;
    if (N > caps.max_n) fail(ErrorKind::Cap, "N=" + std::to_string(N) + " exceeds cap " + std::to_string(caps.max_n));
    // |S|^6 has frequencies up to 6N in x and 6N^2 in t.
    const int64_t G1 = 6 * N + 1, G2 = 6 * N * N + 1;
    const int64_t M = 2 * N + 1;
    auto e = [](int64_t r, int64_t G) {
        double t = static_cast<double>(r) / static_cast<double>(G);
        if (t > 0.5) t -= 1.0;
        return std::polar(1.0, 2 * std::numbers::pi * t);
    };
    Eigen::MatrixXcd A(G1, M);
    for (int64_t i = 0; i < G1; ++i)
        for (int64_t k = 0; k < M; ++k) A(i, k) = e(mod((k - N) * i, G1), G1);

    const int64_t chunk = 1024;
    const size_t nchunks = static_cast<size_t>((G2 + chunk - 1) / chunk);
    std::vector<double> partial(nchunks, 0.0);
    parallel_for(nchunks, [&](size_t ci) {
        int64_t j0 = static_cast<int64_t>(ci) * chunk, j1 = std::min(G2, j0 + chunk);
        Eigen::MatrixXcd B(M, j1 - j0);
        for (int64_t k = 0; k < M; ++k) {
            int64_t n = k - N;
            for (int64_t j = j0; j < j1; ++j) B(k, j - j0) = c.a[static_cast<size_t>(k)] * e(mod(n * n * j, G2), G2);
        }
        Eigen::MatrixXcd S = A * B;
        double acc = 0;
        for (Eigen::Index jj = 0; jj < S.cols(); ++jj)
            for (Eigen::Index ii = 0; ii < S.rows(); ++ii) {
                double m2 = std::norm(S(ii, jj));
                acc += m2 * m2 * m2;
            }
        partial[ci] = acc;
    });
    double total = 0;
    for (double v : partial) total += v;
    return total / (static_cast<double>(G1) * static_cast<double>(G2));
}

DiscreteRestriction discrete_restriction_ratio(int64_t N, const ArithCaps& caps) {
    if (N < 3) fail(ErrorKind::Precondition, "discrete restriction ratio needs N >= 3 (log log N > 0)");
    DiscreteRestriction d;
    d.moment = weighted_sixth_moment(CoefficientVector::ones_on(N, -N, N), caps).real();
    double l2sq = static_cast<double>(2 * N + 1);
    d.ratio = std::pow(d.moment / (l2sq * l2sq * l2sq), 1.0 / 6.0);
    double ln = std::log(static_cast<double>(N));
    d.reference = std::exp(30 * ln / std::log(ln));
    d.flagged = d.ratio > d.reference;
    return d;
}

}  // namespace declab
