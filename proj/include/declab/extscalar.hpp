#pragma once
#include <cstdint>
#include <string>

namespace declab {

// value = mantissa * 10^exponent with 1 <= |mantissa| < 10, or (0, 0).
// The mantissa carries a sign so that logs of magnitudes below one stay representable.
class ExtScalar {
public:
    ExtScalar() = default;
    ExtScalar(long double v);  // NOLINT: implicit from native values is convenient in formulas

    static ExtScalar from_parts(long double mantissa, int64_t exponent);
    static ExtScalar pow10(long double log10_value);  // 10^log10_value for |log10_value| < 2^63

    long double mantissa() const { return m_; }
    int64_t exponent() const { return e_; }
    bool is_zero() const { return m_ == 0; }
    int sign() const { return m_ > 0 ? 1 : (m_ < 0 ? -1 : 0); }

    long double log10_abs() const;  // domain error at zero
    long double to_long_double() const;  // range error if not representable
    ExtScalar abs() const { return from_parts(m_ < 0 ? -m_ : m_, e_); }

    ExtScalar operator-() const { return from_parts(-m_, e_); }
    friend ExtScalar operator+(const ExtScalar& x, const ExtScalar& y);
    friend ExtScalar operator-(const ExtScalar& x, const ExtScalar& y) { return x + (-y); }
    friend ExtScalar operator*(const ExtScalar& x, const ExtScalar& y);
    friend ExtScalar operator/(const ExtScalar& x, const ExtScalar& y);
    ExtScalar& operator+=(const ExtScalar& y) { return *this = *this + y; }
    ExtScalar& operator*=(const ExtScalar& y) { return *this = *this * y; }

    friend int compare(const ExtScalar& x, const ExtScalar& y);
    friend bool operator<(const ExtScalar& x, const ExtScalar& y) { return compare(x, y) < 0; }
    friend bool operator<=(const ExtScalar& x, const ExtScalar& y) { return compare(x, y) <= 0; }
    friend bool operator>(const ExtScalar& x, const ExtScalar& y) { return compare(x, y) > 0; }
    friend bool operator>=(const ExtScalar& x, const ExtScalar& y) { return compare(x, y) >= 0; }
    friend bool operator==(const ExtScalar& x, const ExtScalar& y) { return x.m_ == y.m_ && x.e_ == y.e_; }

    std::string str() const;

private:
    long double m_ = 0;
    int64_t e_ = 0;
};

ExtScalar pow(const ExtScalar& x, long double r);  // x > 0
ExtScalar ln(const ExtScalar& x);                  // x > 0
ExtScalar exp(const ExtScalar& y);
ExtScalar max(const ExtScalar& x, const ExtScalar& y);
bool close_rel(const ExtScalar& x, const ExtScalar& y, long double tol);

}  // namespace declab
