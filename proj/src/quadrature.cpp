#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "declab/common.hpp"
#include "declab/extension.hpp"

namespace declab {

const GLRule& gauss_legendre(int q) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GLRule>> cache;
    if (q < 1 || q > 4000) fail(ErrorKind::Domain, "Gauss-Legendre order out of range");
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[q];
    if (!slot) {
        auto rule = std::make_unique<GLRule>();
        // legendre_p_zeros returns the nonnegative roots in increasing order
        auto zeros = boost::math::legendre_p_zeros<double>(q);
        std::vector<std::pair<double, double>> nodes;
        for (double z : zeros) {
            double dp = boost::math::legendre_p_prime<double>(q, z);
            double w = 2.0 / ((1 - z * z) * dp * dp);
            nodes.emplace_back(z, w);
            if (z != 0) nodes.emplace_back(-z, w);
        }
        std::sort(nodes.begin(), nodes.end());
        for (auto& [z, w] : nodes) {
            rule->x.push_back(z);
            rule->w.push_back(w);
        }
        slot = std::move(rule);
    }
    return *slot;
}

void Axis::add_panel(double a, double b, int q) {
    const GLRule& r = gauss_legendre(q);
    double mid = (a + b) / 2, half = (b - a) / 2;
    for (size_t k = 0; k < r.x.size(); ++k) {
        x.push_back(mid + half * r.x[k]);
        w.push_back(half * r.w[k]);
    }
    if (breaks.empty() || breaks.back() != a) breaks.push_back(a);
    breaks.push_back(b);
}

int spatial_nodes(double h, double freq, const QuadratureSpec& q) {
    // 1/spacing nodes per cycle plus a floor that also scales with refinement
    return static_cast<int>(std::ceil((freq * h + 2) / q.spacing));
}

namespace {
double oscillation_cap(double freq) { return std::min(64.0, 8.0 / std::max(freq, 1e-9)); }
}  // namespace

Axis axis_from_breaks(const std::vector<double>& breaks, double freq, const QuadratureSpec& q) {
    Axis ax;
    double cap = oscillation_cap(freq);
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) fail(ErrorKind::Domain, "axis breaks must increase");
        int n = static_cast<int>(std::ceil((b - a) / cap - 1e-12));
        n = std::max(n, 1);
        double h = (b - a) / n;
        int nodes = spatial_nodes(h, freq, q);
        for (int k = 0; k < n; ++k) ax.add_panel(a + k * h, k + 1 == n ? b : a + (k + 1) * h, nodes);
    }
    return ax;
}

Axis axis_weighted(double c, double R, double freq, const QuadratureSpec& q) {
    const double lambda = R / 100;  // e-folding length of the weight near its centre
    const double cap = oscillation_cap(freq);
    // w(0.35 R) = 1.35^-100 ~ 1e-13; beyond that only coarse panels
    const double fine_radius = 0.35 * R;
    std::vector<double> t = {0, lambda / 64};
    while (t.back() < fine_radius) t.push_back(std::min({2 * t.back(), t.back() + cap, fine_radius}));
    const size_t fine = t.size();
    while (t.back() < q.K * R / 2) t.push_back(std::min(2 * t.back(), q.K * R / 2));

    Axis ax;
    auto panel = [&](double a, double b, bool is_fine) {
        int nodes = is_fine ? spatial_nodes(b - a, freq, q) : static_cast<int>(std::ceil(2 / q.spacing));
        ax.add_panel(a, b, nodes);
    };
    for (size_t k = t.size() - 1; k >= 1; --k) panel(c - t[k], c - t[k - 1], k < fine);
    for (size_t k = 1; k < t.size(); ++k) panel(c + t[k - 1], c + t[k], k < fine);
    return ax;
}

TensorGrid grid_on_square(const Square& B, double freq, const QuadratureSpec& q) {
    return {axis_from_breaks({B.lo(0), B.hi(0)}, freq, q), axis_from_breaks({B.lo(1), B.hi(1)}, freq, q)};
}

TensorGrid grid_weighted(const Square& B, double freq, const QuadratureSpec& q) {
    return {axis_weighted(B.center[0], B.side, freq, q), axis_weighted(B.center[1], B.side, freq, q)};
}

}  // namespace declab
