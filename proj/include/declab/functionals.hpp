#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "declab/extension.hpp"

namespace declab {

struct ScaleParams {
    Rational delta{1, 4};
    Rational nu{1, 4};
    int a = 1, b = 1;
    double s = 2;
    double p = 6;
};

// One evaluated inequality. ratio = lhs / rhs; auxiliary quantities go to details in
// insertion order so serialised reports keep a stable field order.
struct RatioReport {
    std::string functional;
    std::vector<std::pair<std::string, std::string>> params;
    double lhs = 0, rhs = 0, ratio = 0;
    double quad_error = 0;
    std::string witness_ref;
    std::vector<std::pair<std::string, double>> details;
    std::vector<std::string> flags;

    double detail(const std::string& key) const;
    bool has_flag(const std::string& f) const;
};

struct EvalOptions {
    QuadratureSpec q;
    // Re-evaluate with doubled nodes and report the relative change as quad_error
    // (otherwise quad_error is the certified weight-truncation bound).
    bool estimate_error = false;
};

// 2 pi / 9702: integral of the weight of a square over the plane divided by its area.
double weight_mass_fraction();

RatioReport linear_ratio(const SymbolFunction& g, const Rational& delta, double p, const Square& B,
                         const EvalOptions& opt = {});

RatioReport bilinear_M_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                             const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});
// Weighted left side; details carry the unweighted one and their quotient.
RatioReport bilinear_Mprime_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                                  const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});
// Cauchy-Schwarz split used to swap a and b: lhs = int_B |E_I1|^2 |E_I2|^4,
// rhs = (int_B |E_I1|^4 |E_I2|^2)^(1/2) (int_B |E_I2|^6)^(1/2). Equality iff |E_I1| = c |E_I2|.
RatioReport holder_split_check(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                               const Square& B, const EvalOptions& opt = {});

RatioReport script_M_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                           const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});
// Sum over J in P_{nu^b}(I) of the script-M left side with I replaced by J (b > a).
RatioReport script_M_refinement(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                                const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});

RatioReport bold_Ms_ratio(const SymbolFunction& g, const DyadicInterval& I, const DyadicInterval& Ip,
                          const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});

// Partition scale 1/R; Delta may be larger than R.
RatioReport check_l2l2(const SymbolFunction& g, const DyadicInterval& I, const Square& Delta, int64_t R,
                       const EvalOptions& opt = {});
RatioReport check_bernstein(const SymbolFunction& g, const DyadicInterval& I, const Square& Delta, double p,
                            const EvalOptions& opt = {});

RatioReport ball_inflation_ratio(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                 const Rational& nu, int b, const Square& Dp, const EvalOptions& opt = {});
RatioReport ball_inflation_s_ratio(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                   const Rational& nu, int b, double s, const Square& Dp, double eps,
                                   const EvalOptions& opt = {});

struct SearchResult {
    RatioReport report;
    std::vector<int> phases;  // coefficient k is e(phases[k] / 64)
    int evaluations = 0;
};
std::vector<int> random_phase_draw(size_t n, uint64_t seed, uint64_t restart);
SymbolFunction phase_symbol(const std::vector<int>& phases);
SearchResult search_lower_bound(const Rational& delta, double p, int budget, uint64_t seed,
                                const EvalOptions& opt = {});

RatioReport check_bilinear_reduction(const SymbolFunction& g, const Rational& delta, const Rational& nu,
                                     const Square& B, const EvalOptions& opt = {});

// Far pairs: min over J1 x J2 of |xi1^2 - xi4^2| after moving I2 to the origin exceeds 5 nu^(2b).
bool abup_far_pair(const DyadicInterval& I2, const DyadicInterval& J1, const DyadicInterval& J2, const ScaleParams& sp);
RatioReport check_abup_vanishing(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                 const DyadicInterval& J1, const DyadicInterval& J2, const ScaleParams& sp,
                                 const Square& B, const EvalOptions& opt = {});
// Every pair J1 <= J2 from one evaluation of the fields.
std::vector<RatioReport> abup_pairings(const SymbolFunction& g, const DyadicInterval& I1, const DyadicInterval& I2,
                                       const ScaleParams& sp, const Square& B, const EvalOptions& opt = {});

}  // namespace declab
