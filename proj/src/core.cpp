#include "tofgraph/core.hpp"

#include <algorithm>

namespace tofgraph {

double det_sum(const RasterD& a) {
    const int h = a.height();
    std::vector<double> row_sums(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double s = 0.0;
        const double* p = a.data() + static_cast<size_t>(y) * a.width();
        for (int x = 0; x < a.width(); ++x) s += p[x];
        row_sums[y] = s;
    }
    double total = 0.0;
    for (int y = 0; y < h; ++y) total += row_sums[y];
    return total;
}

double det_dot(const RasterD& a, const RasterD& b) {
    require_same_shape(a, b, "det_dot");
    const int h = a.height();
    std::vector<double> row_sums(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double s = 0.0;
        const size_t off = static_cast<size_t>(y) * a.width();
        const double* pa = a.data() + off;
        const double* pb = b.data() + off;
        for (int x = 0; x < a.width(); ++x) s += pa[x] * pb[x];
        row_sums[y] = s;
    }
    double total = 0.0;
    for (int y = 0; y < h; ++y) total += row_sums[y];
    return total;
}

double det_sum_squares(const RasterD& a) { return det_dot(a, a); }

double det_max_abs(const RasterD& a) {
    const int h = a.height();
    std::vector<double> row_max(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double m = 0.0;
        const double* p = a.data() + static_cast<size_t>(y) * a.width();
        for (int x = 0; x < a.width(); ++x) m = std::max(m, std::abs(p[x]));
        row_max[y] = m;
    }
    double m = 0.0;
    for (int y = 0; y < h; ++y) m = std::max(m, row_max[y]);
    return m;
}

}  // namespace tofgraph
