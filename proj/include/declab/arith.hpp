#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <vector>

namespace declab {

using BigInt = boost::multiprecision::cpp_int;
using cplx = std::complex<double>;

struct ArithCaps {
    int64_t max_x = 2000;
    int64_t max_n = 128;
    int64_t brute_max_x = 12;
};

struct ArithParams {
    int64_t X = 1;
    int64_t p = 2;
    int a = 0, b = 0;
    int64_t xi = 0, eta = 0;
};

// Coefficients a_n for |n| <= N, stored at index n + N.
struct CoefficientVector {
    int64_t N = 0;
    std::vector<cplx> a;

    cplx at(int64_t n) const { return a[static_cast<size_t>(n + N)]; }
    static CoefficientVector zeros(int64_t N);
    static CoefficientVector ones_on(int64_t N, int64_t lo, int64_t hi);
    static CoefficientVector random(int64_t N, uint64_t seed);
};

bool is_prime(int64_t p);
int64_t ipow(int64_t base, int e);

// Sum over keys (linear sum, quadratic sum) of squared tallies of triples (x, y, y')
// with x = rx mod mx and y, y' = ry mod my, all in [1, X].
BigInt count_classes(int64_t X, int64_t mx, int64_t rx, int64_t my, int64_t ry);

BigInt count_J(int64_t X, const ArithCaps& caps = {});
BigInt count_J_bruteforce(int64_t X, const ArithCaps& caps = {});

BigInt count_I1_class(const ArithParams& prm, const ArithCaps& caps = {});
// Direct six-variable count of the system with y-congruences and x1 = x2 mod p^a only.
BigInt count_I1_xdiag_bruteforce(int64_t X, int64_t p, int a, int b, int64_t eta);

struct I1Max {
    BigInt count;
    int64_t xi = 0, eta = 0;
};
I1Max count_I1_max(int64_t X, int64_t p, int a, int b, const ArithCaps& caps = {});

// True when every solution counted at level a already has x1 = x2 mod p^(a+1),
// which is what makes the class-refinement sum exact.
bool lifting_admissible(int64_t p, int a, int b, int64_t xi, int64_t eta);

struct LiftingCheck {
    bool equal = false;
    bool admissible = false;
    BigInt lhs, rhs;
};
LiftingCheck lifting_identity_check(const ArithParams& prm, const ArithCaps& caps = {});

struct CongruencingRatio {
    double ratio = 0;
    BigInt numerator, denominator;
    int64_t xi_num = 0, eta_num = 0, xi_den = 0, eta_den = 0;
    bool flagged = false;
};
CongruencingRatio congruencing_step_ratio(int64_t X, int64_t p, int a, int b, const ArithCaps& caps = {});

cplx weighted_sixth_moment(const CoefficientVector& c, const ArithCaps& caps = {});
double torus_grid_integral(const CoefficientVector& c, const ArithCaps& caps = {});

struct DiscreteRestriction {
    double moment = 0;
    double ratio = 0;
    double reference = 0;  // exp(30 ln N / ln ln N)
    bool flagged = false;  // ratio above reference
};
DiscreteRestriction discrete_restriction_ratio(int64_t N, const ArithCaps& caps = {});

}  // namespace declab
