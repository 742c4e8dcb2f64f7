#include "declab/field_grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>

#include "declab/common.hpp"

namespace declab {

static_assert(std::endian::native == std::endian::little, "binary field layout assumes a little-endian host");

FieldGrid sample_uniform(const SymbolFunction& g, const DyadicInterval& J, const Point& origin, double spacing,
                         int64_t n1, int64_t n2, const QuadratureSpec& q) {
    if (n1 < 1 || n2 < 1) fail(ErrorKind::Domain, "field grid dimensions must be >= 1");
    if (!(spacing > 0)) fail(ErrorKind::Domain, "field grid spacing must be positive");
    FieldGrid f;
    f.layout = FieldGrid::Layout::Uniform;
    f.origin = origin;
    f.spacing = spacing;
    f.n1 = n1;
    f.n2 = n2;
    for (int64_t i = 0; i < n1; ++i) f.x1.push_back(origin[0] + (i + 0.5) * spacing);
    for (int64_t j = 0; j < n2; ++j) f.x2.push_back(origin[1] + (j + 0.5) * spacing);
    f.w1.assign(static_cast<size_t>(n1), spacing);
    f.w2.assign(static_cast<size_t>(n2), spacing);
    Eigen::MatrixXcd m = eval_extension_tensor(g, J, f.x1, f.x2, q);
    f.samples.assign(m.data(), m.data() + m.size());
    f.provenance = "E_" + J.str() + " g=" + g.label;
    return f;
}

FieldGrid sample_tensor(const SymbolFunction& g, const DyadicInterval& J, const TensorGrid& grid, const QuadratureSpec& q) {
    FieldGrid f;
    f.layout = FieldGrid::Layout::Tensor;
    f.x1 = grid.a1.x;
    f.x2 = grid.a2.x;
    f.w1 = grid.a1.w;
    f.w2 = grid.a2.w;
    f.n1 = static_cast<int64_t>(f.x1.size());
    f.n2 = static_cast<int64_t>(f.x2.size());
    f.origin = {grid.a1.breaks.front(), grid.a2.breaks.front()};
    f.upper = {grid.a1.breaks.back(), grid.a2.breaks.back()};
    f.spacing = 0;
    Eigen::MatrixXcd m = eval_extension_tensor(g, J, f.x1, f.x2, q);
    f.samples.assign(m.data(), m.data() + m.size());
    f.provenance = "E_" + J.str() + " g=" + g.label + " (tensor Gauss-Legendre)";
    return f;
}

namespace {

struct Extent {
    double lo1, hi1, lo2, hi2;
};

Extent extent(const FieldGrid& f) {
    if (f.layout == FieldGrid::Layout::Uniform)
        return {f.origin[0], f.origin[0] + static_cast<double>(f.n1) * f.spacing, f.origin[1],
                f.origin[1] + static_cast<double>(f.n2) * f.spacing};
    return {f.origin[0], f.upper[0], f.origin[1], f.upper[1]};
}

}  // namespace

NormResult norm_lp(const FieldGrid& f, const NormDomain& dom, double p, bool normalized, double K) {
    if (!(p >= 1)) fail(ErrorKind::Domain, "norm exponent must be >= 1");
    if (f.samples.size() != static_cast<size_t>(f.n1 * f.n2)) fail(ErrorKind::Domain, "field grid sample count mismatch");
    Square region = dom.B;
    if (dom.weighted) region.side *= K;
    Extent ex = extent(f);
    const double tol = 1e-9 * std::max(1.0, region.side);
    if (ex.lo1 > region.lo(0) + tol || ex.hi1 < region.hi(0) - tol || ex.lo2 > region.lo(1) + tol || ex.hi2 < region.hi(1) - tol)
        fail(ErrorKind::Domain, std::string("field grid does not cover the ") + (dom.weighted ? "K-dilated " : "") + "norm domain");
    double acc = 0;
    for (int64_t j = 0; j < f.n2; ++j) {
        double y = f.x2[static_cast<size_t>(j)];
        if (std::fabs(y - region.center[1]) > region.side / 2 + 1e-12) continue;
        double row = 0;
        for (int64_t i = 0; i < f.n1; ++i) {
            double x = f.x1[static_cast<size_t>(i)];
            if (std::fabs(x - region.center[0]) > region.side / 2 + 1e-12) continue;
            double v = std::pow(std::abs(f.at(i, j)), p) * f.w1[static_cast<size_t>(i)];
            if (dom.weighted) v *= weight_value(dom.B, {x, y});
            row += v;
        }
        acc += row * f.w2[static_cast<size_t>(j)];
    }
    if (normalized) acc /= dom.B.area();
    return {std::pow(acc, 1 / p), dom.weighted ? weight_tail_fraction(K) : 0.0};
}

namespace {
template <class T>
void put(std::ostream& os, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}
template <class T>
T get(std::istream& is) {
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) fail(ErrorKind::Domain, "truncated field grid stream");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}
}  // namespace

void write_binary(const FieldGrid& f, std::ostream& os) {
    if (f.layout != FieldGrid::Layout::Uniform) fail(ErrorKind::Domain, "binary layout is defined for uniform grids only");
    put<double>(os, f.origin[0]);
    put<double>(os, f.origin[1]);
    put<double>(os, f.spacing);
    put<uint64_t>(os, static_cast<uint64_t>(f.n1));
    put<uint64_t>(os, static_cast<uint64_t>(f.n2));
    for (const auto& z : f.samples) {
        put<double>(os, z.real());
        put<double>(os, z.imag());
    }
}

FieldGrid read_binary(std::istream& is) {
    FieldGrid f;
    f.layout = FieldGrid::Layout::Uniform;
    f.origin[0] = get<double>(is);
    f.origin[1] = get<double>(is);
    f.spacing = get<double>(is);
    f.n1 = static_cast<int64_t>(get<uint64_t>(is));
    f.n2 = static_cast<int64_t>(get<uint64_t>(is));
    if (f.n1 < 1 || f.n2 < 1 || !(f.spacing > 0)) fail(ErrorKind::Domain, "invalid field grid header");
    for (int64_t i = 0; i < f.n1; ++i) f.x1.push_back(f.origin[0] + (i + 0.5) * f.spacing);
    for (int64_t j = 0; j < f.n2; ++j) f.x2.push_back(f.origin[1] + (j + 0.5) * f.spacing);
    f.w1.assign(static_cast<size_t>(f.n1), f.spacing);
    f.w2.assign(static_cast<size_t>(f.n2), f.spacing);
    f.samples.resize(static_cast<size_t>(f.n1 * f.n2));
    for (auto& z : f.samples) {
        double re = get<double>(is);
        double im = get<double>(is);
        z = {re, im};
    }
    return f;
}

void write_csv(const FieldGrid& f, std::ostream& os) {
    os << "x1,x2,re,im\n" << std::setprecision(17);
    for (int64_t j = 0; j < f.n2; ++j)
        for (int64_t i = 0; i < f.n1; ++i) {
            cplx z = f.at(i, j);
            os << f.x1[static_cast<size_t>(i)] << ',' << f.x2[static_cast<size_t>(j)] << ',' << z.real() << ',' << z.imag() << '\n';
        }
}

}  // namespace declab
