#include "tofgraph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tofgraph/core.hpp"

namespace tofgraph {

std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b) {
    const size_t n = b.size();
    if (a.size() != n * n) throw StructuralError("lu_solve: matrix/vector size mismatch");
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});

    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        double best = std::abs(a[perm[col] * n + col]);
        for (size_t r = col + 1; r < n; ++r) {
            double v = std::abs(a[perm[r] * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw NumericError("lu_solve: singular matrix");
        std::swap(perm[col], perm[pivot]);
        const size_t prow = perm[col];
        const double inv_p = 1.0 / a[prow * n + col];
        for (size_t r = col + 1; r < n; ++r) {
            const size_t row = perm[r];
            const double factor = a[row * n + col] * inv_p;
            a[row * n + col] = factor;
            for (size_t c = col + 1; c < n; ++c) a[row * n + c] -= factor * a[prow * n + c];
        }
    }

    std::vector<double> y(n);
    for (size_t r = 0; r < n; ++r) {
        double s = b[perm[r]];
        for (size_t c = 0; c < r; ++c) s -= a[perm[r] * n + c] * y[c];
        y[r] = s;
    }
    std::vector<double> x(n);
    for (size_t ri = n; ri-- > 0;) {
        double s = y[ri];
        for (size_t c = ri + 1; c < n; ++c) s -= a[perm[ri] * n + c] * x[c];
        x[ri] = s / a[perm[ri] * n + ri];
    }
    return x;
}

void jacobi_eigen_sym(std::vector<double> a, int n, std::vector<double>& eigenvalues,
                      std::vector<double>& eigenvectors) {
    if (a.size() != static_cast<size_t>(n) * n)
        throw StructuralError("jacobi_eigen_sym: bad matrix size");
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a[static_cast<size_t>(i) * n + j] *
                                                 a[static_cast<size_t>(i) * n + j];
        return std::sqrt(s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > 1e-14; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[static_cast<size_t>(p) * n + q];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[static_cast<size_t>(p) * n + p];
                double aqq = a[static_cast<size_t>(q) * n + q];
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[static_cast<size_t>(k) * n + p];
                    double akq = a[static_cast<size_t>(k) * n + q];
                    a[static_cast<size_t>(k) * n + p] = c * akp - s * akq;
                    a[static_cast<size_t>(k) * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[static_cast<size_t>(p) * n + k];
                    double aqk = a[static_cast<size_t>(q) * n + k];
                    a[static_cast<size_t>(p) * n + k] = c * apk - s * aqk;
                    a[static_cast<size_t>(q) * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v[static_cast<size_t>(k) * n + p];
                    double vkq = v[static_cast<size_t>(k) * n + q];
                    v[static_cast<size_t>(k) * n + p] = c * vkp - s * vkq;
                    v[static_cast<size_t>(k) * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return a[static_cast<size_t>(i) * n + i] < a[static_cast<size_t>(j) * n + j];
    });

    eigenvalues.resize(n);
    eigenvectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        eigenvalues[k] = a[static_cast<size_t>(order[k]) * n + order[k]];
        for (int i = 0; i < n; ++i)
            eigenvectors[static_cast<size_t>(k) * n + i] = v[static_cast<size_t>(i) * n + order[k]];
    }
}

}  // namespace tofgraph
