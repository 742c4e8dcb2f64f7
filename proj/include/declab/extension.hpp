#pragma once
#include <Eigen/Dense>
#include <array>
#include <boost/rational.hpp>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace declab {

using cplx = std::complex<double>;
using Rational = boost::rational<int64_t>;
using Point = std::array<double, 2>;

inline double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

struct DyadicInterval {
    Rational left{0}, length{1};

    DyadicInterval() = default;
    DyadicInterval(Rational l, Rational len);
    Rational right() const { return left + length; }
    double lo() const { return to_double(left); }
    double hi() const { return to_double(right()); }
    double len() const { return to_double(length); }
    bool contains(const DyadicInterval& J) const { return J.left >= left && J.right() <= right(); }
    std::string str() const;
    friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) { return a.left == b.left && a.length == b.length; }
};

DyadicInterval interval(int64_t lnum, int64_t lden, int64_t rnum, int64_t rden);
DyadicInterval unit_interval();

struct Square {
    Point center{0, 0};
    double side = 1;
    double lo(int axis) const { return center[static_cast<size_t>(axis)] - side / 2; }
    double hi(int axis) const { return center[static_cast<size_t>(axis)] + side / 2; }
    bool contains(const Point& x, double tol = 0) const;
    double area() const { return side * side; }
};

std::vector<DyadicInterval> partition_interval(const DyadicInterval& I, const Rational& ell);
std::vector<Square> partition_square(const Square& B, double ell);

double weight_value(const Square& B, const Point& x);  // (1 + |x - c| / side)^-100
// Fraction of the weight's total mass outside the square K * B.
double weight_tail_fraction(double K);

// g on [0,1]: piecewise constant on cells with rational breakpoints, optionally times
// e(m1 xi + m2 xi^2). The modulation keeps the family closed under affine rescaling.
struct SymbolFunction {
    enum class Kind { ConstantOne, SingleBump, UnimodularRandom, Explicit, Rescaled };
    struct Cell {
        Rational a, b;
        cplx v;
    };
    Kind kind = Kind::ConstantOne;
    std::vector<Cell> cells;
    double m1 = 0, m2 = 0;
    std::string label;

    static SymbolFunction constant_one();
    static SymbolFunction zero();
    static SymbolFunction single_bump(const DyadicInterval& J);
    static SymbolFunction unimodular_random(uint64_t seed, const Rational& delta);
    static SymbolFunction explicit_coefficients(const std::vector<cplx>& values);  // over P_{1/n}([0,1])

    cplx value(double xi) const;
    SymbolFunction scaled(cplx c) const;
    SymbolFunction modulated(double dm1, double dm2) const;
    double l1_norm_on(const DyadicInterval& J) const;
};

struct QuadratureSpec {
    int nodes_per_unit_frequency = 4;
    double spacing = 0.25;
    double K = 8;

    void validate() const;
    QuadratureSpec doubled() const { return {2 * nodes_per_unit_frequency, spacing / 2, K}; }
    QuadratureSpec widened() const { return {nodes_per_unit_frequency, spacing, 2 * K}; }
};

// Gauss-Legendre rule on [-1, 1], cached.
struct GLRule {
    std::vector<double> x, w;
};
const GLRule& gauss_legendre(int q);
constexpr int kXiPanelNodes = 24;

// 1-D composite quadrature axis.
struct Axis {
    std::vector<double> x, w;
    std::vector<double> breaks;  // panel boundaries
    void add_panel(double a, double b, int q);
    size_t size() const { return x.size(); }
};
int spatial_nodes(double h, double freq, const QuadratureSpec& q);
// Panels between consecutive breaks, each split so that no panel exceeds the oscillation cap.
Axis axis_from_breaks(const std::vector<double>& breaks, double freq, const QuadratureSpec& q);
// Graded toward c (cone cusp of the weight), fine out to 0.35 R, coarse out to K R/2.
Axis axis_weighted(double c, double R, double freq, const QuadratureSpec& q);

struct TensorGrid {
    Axis a1, a2;
    size_t size() const { return a1.size() * a2.size(); }
};
TensorGrid grid_on_square(const Square& B, double freq, const QuadratureSpec& q);
TensorGrid grid_weighted(const Square& B, double freq, const QuadratureSpec& q);

// Spatial frequency bound (cycles per unit) of |E_J g|^2.
double field_bandwidth(const DyadicInterval& J);

// Composite Gauss-Legendre xi-rule for E_J g; rate bounds the phase derivative (cycles per unit xi).
struct XiRule {
    std::vector<double> xi;
    std::vector<cplx> wg;  // weight * g(xi) * modulation
};
double phase_rate(const SymbolFunction& g, const DyadicInterval& J, double X1, double X2, double shear = 0);
XiRule xi_rule(const SymbolFunction& g, const DyadicInterval& J, double rate, const QuadratureSpec& q);

cplx eval_extension(const SymbolFunction& g, const DyadicInterval& J, const Point& x, const QuadratureSpec& q);
// E_J g on the tensor product x1 x x2 (rows over x1), block-adaptive in the xi-rule.
Eigen::MatrixXcd eval_extension_tensor(const SymbolFunction& g, const DyadicInterval& J,
                                       const std::vector<double>& x1, const std::vector<double>& x2,
                                       const QuadratureSpec& q);

// shear = beta evaluates y -> E_J g(y1 - 2 beta y2, y2), the field seen after moving beta to the origin.
struct FieldSpec {
    const SymbolFunction* g;
    DyadicInterval J;
    double shear = 0;
};
struct BlockView {
    const double *x1, *x2, *w1, *w2;
    Eigen::Index n1, n2;
    std::vector<Eigen::MatrixXcd> fields;  // n1 x n2, one per FieldSpec
};
using BlockReducer = std::function<void(const BlockView&, std::vector<double>& acc)>;
// Tiles the grid into fixed blocks, evaluates every field per block and folds the
// per-block accumulators in block order, so sums are schedule independent.
std::vector<double> grid_reduce(const TensorGrid& grid, const std::vector<FieldSpec>& fields,
                                const QuadratureSpec& q, size_t nacc, const BlockReducer& fn);

struct RescaleResult {
    SymbolFunction g_tilde;
    double alpha = 0, sigma = 1;
    Point apply(const Point& x) const { return {sigma * (x[0] + 2 * alpha * x[1]), sigma * sigma * x[1]}; }
};
RescaleResult rescale_symbol(const SymbolFunction& g, const DyadicInterval& I);

}  // namespace declab
