#include "declab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "declab/common.hpp"
#include "declab/parallel.hpp"
#include "declab/rng.hpp"

namespace declab {

namespace {

inline cplx e_of(double t) {
    double f = t - std::nearbyint(t);
    return {std::cos(2 * std::numbers::pi * f), std::sin(2 * std::numbers::pi * f)};
}

std::string rat_str(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

}  // namespace

DyadicInterval::DyadicInterval(Rational l, Rational len) : left(l), length(len) {
    if (len <= 0) fail(ErrorKind::Domain, "interval length must be positive");
    if (l < 0 || l + len > 1) fail(ErrorKind::Domain, "interval [" + rat_str(l) + ", " + rat_str(l + len) + "] not inside [0,1]");
}

std::string DyadicInterval::str() const { return "[" + rat_str(left) + "," + rat_str(right()) + "]"; }

DyadicInterval interval(int64_t lnum, int64_t lden, int64_t rnum, int64_t rden) {
    Rational l(lnum, lden), r(rnum, rden);
    return {l, r - l};
}

DyadicInterval unit_interval() { return {Rational(0), Rational(1)}; }

bool Square::contains(const Point& x, double tol) const {
    return std::fabs(x[0] - center[0]) <= side / 2 + tol && std::fabs(x[1] - center[1]) <= side / 2 + tol;
}

std::vector<DyadicInterval> partition_interval(const DyadicInterval& I, const Rational& ell) {
    if (ell <= 0) fail(ErrorKind::Domain, "partition length must be positive");
    Rational n = I.length / ell;
    if (n.denominator() != 1)
        fail(ErrorKind::Domain, "cannot partition " + I.str() + " into pieces of length " + rat_str(ell) + ": |I|/l = " + rat_str(n) + " is not an integer");
    std::vector<DyadicInterval> out;
    for (int64_t k = 0; k < n.numerator(); ++k) out.emplace_back(I.left + ell * k, ell);
    return out;
}

std::vector<Square> partition_square(const Square& B, double ell) {
    if (!(ell > 0)) fail(ErrorKind::Domain, "partition side must be positive");
    double ratio = B.side / ell;
    double n = std::round(ratio);
    if (n < 1 || std::fabs(ratio - n) > 1e-12 * ratio)
        fail(ErrorKind::Domain, "cannot partition square of side " + std::to_string(B.side) + " into sides " + std::to_string(ell));
    std::vector<Square> out;
    int m = static_cast<int>(n);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            out.push_back({{B.lo(0) + (i + 0.5) * ell, B.lo(1) + (j + 0.5) * ell}, ell});
    return out;
}

double weight_value(const Square& B, const Point& x) {
    double r = std::hypot(x[0] - B.center[0], x[1] - B.center[1]);
    return std::exp(-100 * std::log1p(r / B.side));
}

double weight_tail_fraction(double K) {
    // mass outside the disc of radius K R / 2 (which contains the complement of K B), relative to
    // the total 2 pi R^2 / 9702
    double S = 1 + K / 2;
    return 9702.0 * (std::pow(S, -98) / 98 - std::pow(S, -99) / 99);
}

SymbolFunction SymbolFunction::constant_one() {
    SymbolFunction g;
    g.kind = Kind::ConstantOne;
    g.cells = {{Rational(0), Rational(1), 1.0}};
    g.label = "one";
    return g;
}

SymbolFunction SymbolFunction::zero() {
    SymbolFunction g = constant_one();
    g.kind = Kind::Explicit;
    g.cells[0].v = 0;
    g.label = "zero";
    return g;
}

SymbolFunction SymbolFunction::single_bump(const DyadicInterval& J) {
    SymbolFunction g;
    g.kind = Kind::SingleBump;
    if (J.left > 0) g.cells.push_back({Rational(0), J.left, 0.0});
    g.cells.push_back({J.left, J.right(), 1.0});
    if (J.right() < 1) g.cells.push_back({J.right(), Rational(1), 0.0});
    g.label = "bump" + J.str();
    return g;
}

SymbolFunction SymbolFunction::unimodular_random(uint64_t seed, const Rational& delta) {
    Rational n = Rational(1) / delta;
    if (delta <= 0 || n.denominator() != 1) fail(ErrorKind::Domain, "random symbol grid needs 1/delta integral");
    SymbolFunction g;
    g.kind = Kind::UnimodularRandom;
    Rng rng(seed);
    for (int64_t k = 0; k < n.numerator(); ++k) g.cells.push_back({delta * k, delta * (k + 1), e_of(rng.uniform())});
    g.label = "unimodular(seed=" + std::to_string(seed) + ",delta=" + rat_str(delta) + ")";
    return g;
}

SymbolFunction SymbolFunction::explicit_coefficients(const std::vector<cplx>& values) {
    if (values.empty()) fail(ErrorKind::Domain, "explicit symbol needs at least one coefficient");
    SymbolFunction g;
    g.kind = Kind::Explicit;
    int64_t n = static_cast<int64_t>(values.size());
    for (int64_t k = 0; k < n; ++k) g.cells.push_back({Rational(k, n), Rational(k + 1, n), values[static_cast<size_t>(k)]});
    g.label = "explicit(n=" + std::to_string(n) + ")";
    return g;
}

cplx SymbolFunction::value(double xi) const {
    for (const auto& c : cells)
        if (xi >= to_double(c.a) && xi <= to_double(c.b)) return c.v * e_of(m1 * xi + m2 * xi * xi);
    fail(ErrorKind::Domain, "symbol evaluated outside [0,1]");
}

SymbolFunction SymbolFunction::scaled(cplx c) const {
    SymbolFunction g = *this;
    for (auto& cell : g.cells) cell.v *= c;
    return g;
}

SymbolFunction SymbolFunction::modulated(double dm1, double dm2) const {
    SymbolFunction g = *this;
    g.m1 += dm1;
    g.m2 += dm2;
    return g;
}

double SymbolFunction::l1_norm_on(const DyadicInterval& J) const {
    double s = 0;
    for (const auto& c : cells) {
        Rational a = std::max(c.a, J.left), b = std::min(c.b, J.right());
        if (b > a) s += std::abs(c.v) * to_double(b - a);
    }
    return s;
}

void QuadratureSpec::validate() const {
    if (nodes_per_unit_frequency < 1) fail(ErrorKind::Config, "nodes_per_unit_frequency must be >= 1");
    if (!(spacing > 0 && spacing <= 0.5)) fail(ErrorKind::Config, "spacing must lie in (0, 1/2]");
    if (!(K >= 4)) fail(ErrorKind::Config, "weight truncation K must be >= 4");
}

double field_bandwidth(const DyadicInterval& J) {
    // |E_J g|^2 has frequencies xi - xi' (x1) and xi^2 - xi'^2 (x2) over J x J
    return std::max(J.len(), J.len() * (J.lo() + J.hi()));
}

double phase_rate(const SymbolFunction& g, const DyadicInterval& J, double X1, double X2, double shear) {
    // bound on |d/dxi| of the phase, in cycles per unit xi
    double xmax = std::max(std::fabs(J.lo()), std::fabs(J.hi()));
    if (shear == 0) return 1 + X1 + 2 * xmax * X2;
    double smax = std::max(std::fabs(J.lo() - shear), std::fabs(J.hi() - shear));
    return 1 + X1 + 2 * smax * X2 + 2 * xmax * std::fabs(g.m2);
}

XiRule xi_rule(const SymbolFunction& g, const DyadicInterval& J, double rate, const QuadratureSpec& q) {
    XiRule r;
    const GLRule& gl = gauss_legendre(kXiPanelNodes);
    for (const auto& c : g.cells) {
        Rational ra = std::max(c.a, J.left), rb = std::min(c.b, J.right());
        if (!(rb > ra) || c.v == cplx(0, 0)) continue;
        double a = to_double(ra), b = to_double(rb), len = b - a;
        int panels = std::max(1, static_cast<int>(std::ceil(q.nodes_per_unit_frequency * rate * len / kXiPanelNodes)));
        double h = len / panels;
        for (int p = 0; p < panels; ++p) {
            double mid = a + (p + 0.5) * h, half = h / 2;
            for (size_t k = 0; k < gl.x.size(); ++k) {
                double xi = mid + half * gl.x[k];
                r.xi.push_back(xi);
                r.wg.push_back(half * gl.w[k] * c.v * e_of(g.m1 * xi + g.m2 * xi * xi));
            }
        }
    }
    return r;
}

namespace {

constexpr Eigen::Index kBlock = 256;

void eval_block(const SymbolFunction& g, const DyadicInterval& J, double shear, const double* x1, Eigen::Index n1,
                const double* x2, Eigen::Index n2, const QuadratureSpec& q, Eigen::Ref<Eigen::MatrixXcd> out) {
    double X1 = 0, X2 = 0;
    const double m2 = shear == 0 ? g.m2 : 0;
    for (Eigen::Index i = 0; i < n1; ++i) X1 = std::max(X1, std::fabs(x1[i] + g.m1));
    for (Eigen::Index j = 0; j < n2; ++j) X2 = std::max(X2, std::fabs(x2[j] + m2));
    XiRule r = xi_rule(g, J, phase_rate(g, J, X1, X2, shear), q);
    const Eigen::Index K = static_cast<Eigen::Index>(r.xi.size());
    if (K == 0) {
        out.setZero();
        return;
    }
    Eigen::MatrixXcd A(n1, K), B(K, n2);
    for (Eigen::Index k = 0; k < K; ++k) {
        double xi = r.xi[static_cast<size_t>(k)];
        cplx wg = r.wg[static_cast<size_t>(k)];
        for (Eigen::Index i = 0; i < n1; ++i) A(i, k) = wg * e_of(xi * x1[i]);
        double c2 = xi * xi - 2 * shear * xi;
        for (Eigen::Index j = 0; j < n2; ++j) B(k, j) = e_of(c2 * x2[j]);
    }
    out.noalias() = A * B;
}

}  // namespace

cplx eval_extension(const SymbolFunction& g, const DyadicInterval& J, const Point& x, const QuadratureSpec& q) {
    Eigen::MatrixXcd out(1, 1);
    eval_block(g, J, 0, &x[0], 1, &x[1], 1, q, out);
    return out(0, 0);
}

Eigen::MatrixXcd eval_extension_tensor(const SymbolFunction& g, const DyadicInterval& J,
                                       const std::vector<double>& x1, const std::vector<double>& x2,
                                       const QuadratureSpec& q) {
    const Eigen::Index n1 = static_cast<Eigen::Index>(x1.size()), n2 = static_cast<Eigen::Index>(x2.size());
    Eigen::MatrixXcd out(n1, n2);
    const Eigen::Index b1 = (n1 + kBlock - 1) / kBlock, b2 = (n2 + kBlock - 1) / kBlock;
    parallel_for(static_cast<size_t>(b1 * b2), [&](size_t t) {
        Eigen::Index bi = static_cast<Eigen::Index>(t) % b1, bj = static_cast<Eigen::Index>(t) / b1;
        Eigen::Index i0 = bi * kBlock, j0 = bj * kBlock;
        Eigen::Index m1 = std::min(kBlock, n1 - i0), m2 = std::min(kBlock, n2 - j0);
        eval_block(g, J, 0, x1.data() + i0, m1, x2.data() + j0, m2, q, out.block(i0, j0, m1, m2));
    });
    return out;
}

namespace {

// Tiles of at most kBlock nodes that never mix magnitude classes of |x|, so the
// xi-rule of a tile near the origin is not sized by far-away nodes.
std::vector<std::pair<Eigen::Index, Eigen::Index>> axis_tiles(const std::vector<double>& x) {
    auto cls = [](double v) { return std::ilogb(std::max(std::fabs(v), 64.0)); };
    std::vector<std::pair<Eigen::Index, Eigen::Index>> tiles;
    Eigen::Index start = 0, n = static_cast<Eigen::Index>(x.size());
    for (Eigen::Index i = 1; i <= n; ++i) {
        if (i == n || i - start == kBlock || cls(x[static_cast<size_t>(i)]) != cls(x[static_cast<size_t>(start)])) {
            tiles.emplace_back(start, i - start);
            start = i;
        }
    }
    return tiles;
}

}  // namespace

std::vector<double> grid_reduce(const TensorGrid& grid, const std::vector<FieldSpec>& fields,
                                const QuadratureSpec& q, size_t nacc, const BlockReducer& fn) {
    const auto t1 = axis_tiles(grid.a1.x), t2 = axis_tiles(grid.a2.x);
    const size_t nb = t1.size() * t2.size();
    std::vector<std::vector<double>> partial(nb, std::vector<double>(nacc, 0.0));
    parallel_for(nb, [&](size_t t) {
        const auto& [i0, m1] = t1[t % t1.size()];
        const auto& [j0, m2] = t2[t / t1.size()];
        BlockView v;
        v.x1 = grid.a1.x.data() + i0;
        v.w1 = grid.a1.w.data() + i0;
        v.x2 = grid.a2.x.data() + j0;
        v.w2 = grid.a2.w.data() + j0;
        v.n1 = m1;
        v.n2 = m2;
        for (const auto& f : fields) {
            Eigen::MatrixXcd m(v.n1, v.n2);
            eval_block(*f.g, f.J, f.shear, v.x1, v.n1, v.x2, v.n2, q, m);
            v.fields.push_back(std::move(m));
        }
        fn(v, partial[t]);
    });
    std::vector<double> acc(nacc, 0.0);
    for (const auto& p : partial)
        for (size_t k = 0; k < nacc; ++k) acc[k] += p[k];
    return acc;
}

RescaleResult rescale_symbol(const SymbolFunction& g, const DyadicInterval& I) {
    RescaleResult r;
    r.alpha = I.lo();
    r.sigma = I.len();
    SymbolFunction t;
    t.kind = SymbolFunction::Kind::Rescaled;
    // constant phase picked up by the modulation at xi = alpha
    cplx phase = e_of(g.m1 * r.alpha + g.m2 * r.alpha * r.alpha);
    for (const auto& c : g.cells) {
        Rational a = std::max(c.a, I.left), b = std::min(c.b, I.right());
        if (!(b > a)) continue;
        t.cells.push_back({(a - I.left) / I.length, (b - I.left) / I.length, c.v * phase});
    }
    t.m1 = r.sigma * (g.m1 + 2 * r.alpha * g.m2);
    t.m2 = r.sigma * r.sigma * g.m2;
    t.label = g.label + "|" + I.str();
    r.g_tilde = std::move(t);
    return r;
}

}  // namespace declab
