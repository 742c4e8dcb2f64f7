#include "declab/extscalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "declab/common.hpp"

namespace declab {

namespace {

constexpr long double kLn10L = 2.302585092994045684017991454684364208L;
constexpr long double kMaxExp = 9.2e18L;

int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::Range, "ExtScalar exponent overflow");
    return r;
}

}  // namespace

ExtScalar::ExtScalar(long double v) {
    if (v == 0) return;
    if (!std::isfinite(v)) fail(ErrorKind::Domain, "ExtScalar from non-finite value");
    *this = from_parts(v, 0);
}

ExtScalar ExtScalar::from_parts(long double mantissa, int64_t exponent) {
    ExtScalar r;
    if (mantissa == 0) return r;
    if (!std::isfinite(mantissa)) fail(ErrorKind::Domain, "non-finite mantissa");
    long double a = std::fabs(mantissa);
    int shift = static_cast<int>(std::floor(std::log10(a)));
    long double m = mantissa / std::pow(10.0L, static_cast<long double>(shift));
    // log10 can be off by one near powers of ten
    while (std::fabs(m) >= 10) { m /= 10; ++shift; }
    while (std::fabs(m) < 1) { m *= 10; --shift; }
    r.m_ = m;
    r.e_ = checked_add(exponent, shift);
    return r;
}

ExtScalar ExtScalar::pow10(long double l10) {
    if (!std::isfinite(l10) || std::fabs(l10) >= kMaxExp) fail(ErrorKind::Range, "ExtScalar exponent out of range");
    long double k = std::floor(l10);
    long double f = l10 - k;
    return from_parts(std::pow(10.0L, f), static_cast<int64_t>(k));
}

long double ExtScalar::log10_abs() const {
    if (m_ == 0) fail(ErrorKind::Domain, "log of zero");
    return static_cast<long double>(e_) + std::log10(std::fabs(m_));
}

long double ExtScalar::to_long_double() const {
    if (m_ == 0) return 0;
    if (e_ > 4900 || e_ < -4900) fail(ErrorKind::Range, "ExtScalar " + str() + " not representable natively");
    return m_ * std::pow(10.0L, static_cast<long double>(e_));
}

ExtScalar operator+(const ExtScalar& x, const ExtScalar& y) {
    if (x.m_ == 0) return y;
    if (y.m_ == 0) return x;
    const ExtScalar& big = x.e_ >= y.e_ ? x : y;
    const ExtScalar& small = x.e_ >= y.e_ ? y : x;
    int64_t d = big.e_ - small.e_;
    if (d > 40) return big;
    long double m = big.m_ + small.m_ * std::pow(10.0L, -static_cast<long double>(d));
    if (m == 0) return ExtScalar();
    return ExtScalar::from_parts(m, big.e_);
}

ExtScalar operator*(const ExtScalar& x, const ExtScalar& y) {
    if (x.m_ == 0 || y.m_ == 0) return ExtScalar();
    return ExtScalar::from_parts(x.m_ * y.m_, checked_add(x.e_, y.e_));
}

ExtScalar operator/(const ExtScalar& x, const ExtScalar& y) {
    if (y.m_ == 0) fail(ErrorKind::Domain, "ExtScalar division by zero");
    if (x.m_ == 0) return ExtScalar();
    return ExtScalar::from_parts(x.m_ / y.m_, checked_add(x.e_, -y.e_));
}

int compare(const ExtScalar& x, const ExtScalar& y) {
    int sx = x.sign(), sy = y.sign();
    if (sx != sy) return sx < sy ? -1 : 1;
    if (sx == 0) return 0;
    int mag;
    if (x.e_ != y.e_)
        mag = x.e_ < y.e_ ? -1 : 1;
    else {
        long double ax = std::fabs(x.m_), ay = std::fabs(y.m_);
        mag = ax < ay ? -1 : (ax > ay ? 1 : 0);
    }
    return sx > 0 ? mag : -mag;
}

std::string ExtScalar::str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lge%lld", m_, static_cast<long long>(e_));
    return buf;
}

ExtScalar pow(const ExtScalar& x, long double r) {
    if (x.sign() <= 0) fail(ErrorKind::Domain, "pow needs a positive base");
    // split r * e so the integer part of the exponent stays exact
    long double e = static_cast<long double>(x.exponent());
    long double re = r * e;
    long double k = std::floor(re);
    long double frac = (re - k) + r * std::log10(x.mantissa());
    long double kf = std::floor(frac);
    if (std::fabs(k + kf) >= kMaxExp) fail(ErrorKind::Range, "ExtScalar pow overflow");
    return ExtScalar::from_parts(std::pow(10.0L, frac - kf), static_cast<int64_t>(k) + static_cast<int64_t>(kf));
}

ExtScalar ln(const ExtScalar& x) {
    if (x.sign() <= 0) fail(ErrorKind::Domain, "ln of non-positive ExtScalar");
    return ExtScalar(std::log(x.mantissa())) + ExtScalar(static_cast<long double>(x.exponent())) * ExtScalar(kLn10L);
}

ExtScalar exp(const ExtScalar& y) {
    if (y.is_zero()) return ExtScalar(1);
    if (y.exponent() > 18) fail(ErrorKind::Range, "exp argument " + y.str() + " out of range");
    long double t = y.to_long_double() / kLn10L;
    return ExtScalar::pow10(t);
}

ExtScalar max(const ExtScalar& x, const ExtScalar& y) { return x < y ? y : x; }

bool close_rel(const ExtScalar& x, const ExtScalar& y, long double tol) {
    if (x.is_zero() && y.is_zero()) return true;
    ExtScalar diff = (x - y).abs();
    ExtScalar scale = max(x.abs(), y.abs());
    return diff <= scale * ExtScalar(tol);
}

}  // namespace declab
