#pragma once
#include <string>
#include <vector>

#include "declab/extscalar.hpp"

namespace declab {

// Natural log of a bound >= 1. `symbolic_constant` marks bounds that hold up to an
// unspecified implied constant, which is then excluded from ln_value.
struct LogBound {
    ExtScalar ln_value;
    bool symbolic_constant = false;
    std::vector<std::string> flags;
};

struct BoundHypothesis {
    ExtScalar ln_C;
    long double eps = 0.01L;
};

const long double kLn10 = 2.302585092994045684017991454684364208L;
const long double kLn2 = 0.693147180559945309417232121458176568L;

LogBound almost_mult(const LogBound& d_sigma, const LogBound& d_ratio);

// ln_D[j] = ln D(delta / nu^(2^j)) for j = 0..N.
LogBound m11_chain(int N, const std::vector<ExtScalar>& ln_D, long double nu);

// ln_D[k-1] = ln D(delta^(1 - 2^-k)) for k = 1..N; L = ln(1/delta).
LogBound core_recursion(int N, const std::vector<ExtScalar>& ln_D, const ExtScalar& L);

enum class IterVariant { Core, Iter1, Bds };
LogBound iter_generic(int N, IterVariant v, const std::vector<ExtScalar>& ln_D, const ExtScalar& L, long double eps);

// Desk-scale flags for delta = 1/q: delta^(-1/2^N) integral, and delta < 100^(-2^N).
std::vector<std::string> core_flags(int N, const ExtScalar& L);

int expstep1_min_N(long double eps);
BoundHypothesis expstep1(const BoundHypothesis& h, int N);
BoundHypothesis expstep2(const BoundHypothesis& h);
int expstep2_N(long double eps);

struct FixedPoint {
    ExtScalar closed_form;  // (8^(1/eps)/eps) * ln(10^(10^6) 2^(4*8^(1/eps)))
    ExtScalar iterated;
    ExtScalar ceiling;      // 200^(1/eps) ln 2
    long long squarings = 0;
    bool ordered = false;   // iterated <= closed_form <= ceiling
};
FixedPoint expstep3_fixed_point(long double eps, const ExtScalar& start = ExtScalar(0));

struct TheoremBound {
    ExtScalar L, A, ln_bound, target;  // target = 30 L / ln L
    long double eta_aux = 0, eps = 0;
    bool gate_eps = false;      // 200^(1/eps) ln 2 <= eps L
    bool gate_small = false;    // eps < 1/100 through the ln ln chain
    bool gate_eta = false;      // eta e^eta <= A
    bool within_target = false;
};
ExtScalar theorem_threshold();  // 200^200
TheoremBound theorem_bound(const ExtScalar& L);

struct BootstrapReport {
    long double lambda = 0;
    int N = 0;
    int min_N = 0;
    long double lhs = 0, rhs = 0;  // the two sides of the exponent identity
    long double contracted = 0;    // lambda (1 - 2^-N)
};
int bootstrap_min_N(long double lambda);
BootstrapReport bootstrap_check(long double lambda, int N);

}  // namespace declab
