#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "declab/extension.hpp"

namespace declab {

// Samples of E_J g. Uniform grids are cell-centred (sample i sits at origin + (i + 1/2) spacing)
// and integrate by the midpoint rule; tensor grids carry their own Gauss-Legendre weights.
struct FieldGrid {
    enum class Layout { Uniform, Tensor };
    Layout layout = Layout::Uniform;
    Point origin{0, 0};
    Point upper{0, 0};  // far corner of tensor grids
    double spacing = 0.25;
    int64_t n1 = 0, n2 = 0;
    std::vector<double> x1, x2, w1, w2;
    std::vector<cplx> samples;  // index i + n1 * j
    std::string provenance;

    cplx at(int64_t i, int64_t j) const { return samples[static_cast<size_t>(i + n1 * j)]; }
};

FieldGrid sample_uniform(const SymbolFunction& g, const DyadicInterval& J, const Point& origin, double spacing,
                         int64_t n1, int64_t n2, const QuadratureSpec& q);
FieldGrid sample_tensor(const SymbolFunction& g, const DyadicInterval& J, const TensorGrid& grid, const QuadratureSpec& q);

struct NormDomain {
    Square B;
    bool weighted = false;
};

struct NormResult {
    double value = 0;
    double tail_bound = 0;  // relative weight mass discarded outside K B
};
NormResult norm_lp(const FieldGrid& f, const NormDomain& dom, double p, bool normalized, double K = 8);

void write_binary(const FieldGrid& f, std::ostream& os);
FieldGrid read_binary(std::istream& is);
void write_csv(const FieldGrid& f, std::ostream& os);

}  // namespace declab
