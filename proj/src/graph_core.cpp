#include "tofgraph/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tofgraph {

double PixelGraph::neighbor_weight(int x, int y, int k) const {
    return edge_weight(x, y, kNeighborDx[k], kNeighborDy[k]);
}

double* PixelGraph::edge_slot(int x, int y, int dx, int dy) {
    int nx = x + dx, ny = y + dy;
    if (nx < 0 || nx >= width || ny < 0 || ny >= height) return nullptr;
    // Canonical planes own E, S, SE, SW edges; others mirror.
    if (dx == 1 && dy == 0) return &w[0].at(x, y);
    if (dx == -1 && dy == 0) return &w[0].at(nx, ny);
    if (dx == 0 && dy == 1) return &w[1].at(x, y);
    if (dx == 0 && dy == -1) return &w[1].at(nx, ny);
    if (dx == 1 && dy == 1) return &w[2].at(x, y);
    if (dx == -1 && dy == -1) return &w[2].at(nx, ny);
    if (dx == -1 && dy == 1) return &w[3].at(x, y);
    if (dx == 1 && dy == -1) return &w[3].at(nx, ny);
    return nullptr;
}

double PixelGraph::edge_weight(int x, int y, int dx, int dy) const {
    double* slot = const_cast<PixelGraph*>(this)->edge_slot(x, y, dx, dy);
    return slot ? *slot : 0.0;
}

void PixelGraph::recompute_degrees() {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double d = 0.0;
            for (int k = 0; k < 8; ++k) d += neighbor_weight(x, y, k);
            degree.at(x, y) = d;
        }
    }
}

void PixelGraph::adjacency_apply(const RasterD& x_in, RasterD& out) const {
    require_same_shape(x_in, w[0], "adjacency_apply");
    if (!out.same_shape(x_in)) out = RasterD(width, height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) {
                int nx = x + kNeighborDx[k], ny = y + kNeighborDy[k];
                if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                s += neighbor_weight(x, y, k) * x_in.at(nx, ny);
            }
            out.at(x, y) = s;
        }
    }
}

void PixelGraph::laplacian_apply(const RasterD& x_in, RasterD& out) const {
    adjacency_apply(x_in, out);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out.at(x, y) = degree.at(x, y) * x_in.at(x, y) - out.at(x, y);
}

double PixelGraph::quadratic_form(const RasterD& x) const {
    RasterD lx;
    laplacian_apply(x, lx);
    return det_dot(x, lx);
}

AttentionParams AttentionParams::identity(int dim) {
    AttentionParams p;
    p.dim = dim;
    p.Q.assign(static_cast<size_t>(dim) * dim, 0.0);
    p.K.assign(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        p.Q[static_cast<size_t>(i) * dim + i] = 1.0;
        p.K[static_cast<size_t>(i) * dim + i] = 1.0;
    }
    return p;
}

FeatureField compute_features(const DepthFrame& frame, int window) {
    if (window < 1 || window % 2 == 0)
        throw DomainError("compute_features: window must be odd and >= 1");
    const int w = frame.width(), h = frame.height();
    const int half = window / 2;
    const int patch = window * window;
    FeatureField feat(w, h, 3 * patch);

    auto clamp_depth = [&](int x, int y) {
        return frame.depth.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    auto clamp_amp = [&](int x, int y) {
        return frame.amplitude.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double* f = feat.at(x, y);
            // Channel layout: [grad_h patch | grad_v patch | amplitude patch].
            int idx = 0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    f[idx++] = 0.5 * (clamp_depth(x + dx + 1, y + dy) -
                                      clamp_depth(x + dx - 1, y + dy));
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    f[idx++] = 0.5 * (clamp_depth(x + dx, y + dy + 1) -
                                      clamp_depth(x + dx, y + dy - 1));
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    f[idx++] = clamp_amp(x + dx, y + dy);

            // Remove each group's window mean.
            for (int g = 0; g < 3; ++g) {
                double mean = 0.0;
                for (int i = 0; i < patch; ++i) mean += f[g * patch + i];
                mean /= patch;
                for (int i = 0; i < patch; ++i) f[g * patch + i] -= mean;
            }

            double norm_sq = 0.0;
            for (int i = 0; i < 3 * patch; ++i) norm_sq += f[i] * f[i];
            if (norm_sq > 0.0) {
                double inv = 1.0 / std::sqrt(norm_sq);
                for (int i = 0; i < 3 * patch; ++i) f[i] *= inv;
            }
        }
    }
    return feat;
}

FeatureField compute_features(const RawFrame& raw, const SensorModel& model, int window) {
    return compute_features(raw2d(raw, model), window);
}

namespace {

double feature_dist_sq(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

PixelGraph intra_graph(const FeatureField& feat, double sigma_f) {
    if (!(sigma_f > 0.0)) throw DomainError("intra_graph: sigma_f must be > 0");
    const int w = feat.width, h = feat.height;
    PixelGraph g(w, h);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_f * sigma_f);
    // Canonical direction offsets: E, S, SE, SW.
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};

    for (int d = 0; d < 4; ++d) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                double dist = feature_dist_sq(feat.at(x, y), feat.at(nx, ny), feat.dim);
                g.w[d].at(x, y) = std::exp(-dist * inv_two_sigma_sq);
            }
        }
    }
    g.recompute_degrees();
    return g;
}

InterFrameGraph inter_graph(const FeatureField& feat_t, const FeatureField& feat_prev,
                            const AttentionParams& params, int q) {
    if (q < 1 || q % 2 == 0) throw DomainError("inter_graph: q must be odd and >= 1");
    if (feat_t.width != feat_prev.width || feat_t.height != feat_prev.height)
        throw StructuralError("inter_graph: feature field dimensions differ");
    if (feat_t.dim != feat_prev.dim || params.dim != feat_t.dim)
        throw StructuralError("inter_graph: feature/attention dimension mismatch");

    const int w = feat_t.width, h = feat_t.height, dim = feat_t.dim;
    const int half = q / 2;
    InterFrameGraph inter(w, h, q);

    // Precompute Q F_t and K F_prev for every pixel.
    std::vector<double> qf(static_cast<size_t>(w) * h * dim);
    std::vector<double> kf(static_cast<size_t>(w) * h * dim);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t off = (static_cast<size_t>(y) * w + x) * dim;
            const double* ft = feat_t.at(x, y);
            const double* fp = feat_prev.at(x, y);
            for (int r = 0; r < dim; ++r) {
                double sq = 0.0, sk = 0.0;
                const double* qrow = params.Q.data() + static_cast<size_t>(r) * dim;
                const double* krow = params.K.data() + static_cast<size_t>(r) * dim;
                for (int c = 0; c < dim; ++c) {
                    sq += qrow[c] * ft[c];
                    sk += krow[c] * fp[c];
                }
                qf[off + r] = sq;
                kf[off + r] = sk;
            }
        }
    }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double* qv = qf.data() + (static_cast<size_t>(y) * w + x) * dim;
            double* row = inter.row(x, y);
            double max_score = -std::numeric_limits<double>::infinity();
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const double* kv = kf.data() + (static_cast<size_t>(ny) * w + nx) * dim;
                    double s = 0.0;
                    for (int c = 0; c < dim; ++c) s += qv[c] * kv[c];
                    row[(dy + half) * q + (dx + half)] = s;
                    max_score = std::max(max_score, s);
                }
            }
            double total = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    int idx = (dy + half) * q + (dx + half);
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) {
                        row[idx] = 0.0;
                        continue;
                    }
                    row[idx] = std::exp(row[idx] - max_score);
                    total += row[idx];
                }
            }
            for (int i = 0; i < q * q; ++i) row[i] /= total;
        }
    }
    return inter;
}

RasterD mapping_confidence(const FeatureField& feat_t, const FeatureField& feat_prev,
                           const InterFrameGraph& inter, double sigma_c) {
    if (!(sigma_c > 0.0)) throw DomainError("mapping_confidence: sigma_c must be > 0");
    if (feat_t.width != inter.width || feat_t.height != inter.height)
        throw StructuralError("mapping_confidence: dimensions differ");
    const int w = feat_t.width, h = feat_t.height;
    const int half = inter.q / 2;
    RasterD phi(w, h);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_c * sigma_c);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    best = std::min(best,
                                    feature_dist_sq(feat_t.at(x, y), feat_prev.at(nx, ny),
                                                    feat_t.dim));
                }
            }
            phi.at(x, y) = std::exp(-best * inv_two_sigma_sq);
        }
    }
    return phi;
}

PixelGraph map_graph(const PixelGraph& prev, const InterFrameGraph& inter) {
    if (prev.width != inter.width || prev.height != inter.height)
        throw StructuralError("map_graph: dimensions differ");
    const int w = prev.width, h = prev.height;
    const int q = inter.q;
    const int half = q / 2;
    const int dil = half + 1;      // previous-frame graph dilates the window by one
    const int dq = q + 2;
    PixelGraph mapped(w, h);
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        std::vector<double> v(static_cast<size_t>(dq) * dq);
        for (int x = 0; x < w; ++x) {
            // v(l) = sum_k w_inter(m, k) (W_prev + I)(k, l) over the dilated window.
            std::fill(v.begin(), v.end(), 0.0);
            const double* urow = inter.row(x, y);
            for (int ky = -half; ky <= half; ++ky) {
                for (int kx = -half; kx <= half; ++kx) {
                    double u = urow[(ky + half) * q + (kx + half)];
                    if (u == 0.0) continue;
                    int px = x + kx, py = y + ky;
                    if (px < 0 || px >= w || py < 0 || py >= h) continue;
                    v[static_cast<size_t>(ky + dil) * dq + (kx + dil)] += u;  // identity term
                    for (int k = 0; k < 8; ++k) {
                        int lx = px + kNeighborDx[k], ly = py + kNeighborDy[k];
                        if (lx < 0 || lx >= w || ly < 0 || ly >= h) continue;
                        double wp = prev.neighbor_weight(px, py, k);
                        v[static_cast<size_t>(ly - y + dil) * dq + (lx - x + dil)] += u * wp;
                    }
                }
            }
            // W_hat(m, n) = sum_l v(l) w_inter(n, l) for canonical neighbors n.
            for (int d = 0; d < 4; ++d) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const double* nrow = inter.row(nx, ny);
                double acc = 0.0;
                for (int ly = -half; ly <= half; ++ly) {
                    for (int lx = -half; lx <= half; ++lx) {
                        double un = nrow[(ly + half) * q + (lx + half)];
                        if (un == 0.0) continue;
                        acc += un * v[static_cast<size_t>(cdy[d] + ly + dil) * dq +
                                      (cdx[d] + lx + dil)];
                    }
                }
                mapped.w[d].at(x, y) = acc;
            }
        }
    }
    mapped.recompute_degrees();
    return mapped;
}

PixelGraph fuse_graphs(const PixelGraph& mapped, const PixelGraph& cur, const RasterD& phi) {
    if (mapped.width != cur.width || mapped.height != cur.height)
        throw StructuralError("fuse_graphs: graph dimensions differ");
    require_same_shape(phi, cur.degree, "fuse_graphs");
    const int w = cur.width, h = cur.height;
    PixelGraph fused(w, h);
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};

    for (int d = 0; d < 4; ++d) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                double phi_avg = 0.5 * (phi.at(x, y) + phi.at(nx, ny));
                fused.w[d].at(x, y) = phi_avg * mapped.w[d].at(x, y) + cur.w[d].at(x, y);
            }
        }
    }
    fused.recompute_degrees();
    return fused;
}

std::vector<double> dense_adjacency(const PixelGraph& g) {
    const size_t n = static_cast<size_t>(g.width) * g.height;
    std::vector<double> a(n * n, 0.0);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            for (int k = 0; k < 8; ++k) {
                int nx = x + kNeighborDx[k], ny = y + kNeighborDy[k];
                if (nx < 0 || nx >= g.width || ny < 0 || ny >= g.height) continue;
                size_t m = static_cast<size_t>(y) * g.width + x;
                size_t nn = static_cast<size_t>(ny) * g.width + nx;
                a[m * n + nn] = g.neighbor_weight(x, y, k);
            }
    return a;
}

std::vector<double> dense_laplacian(const PixelGraph& g) {
    const size_t n = static_cast<size_t>(g.width) * g.height;
    std::vector<double> l = dense_adjacency(g);
    for (size_t i = 0; i < n * n; ++i) l[i] = -l[i];
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            size_t m = static_cast<size_t>(y) * g.width + x;
            l[m * n + m] += g.degree.at(x, y);
        }
    return l;
}

void dump_graph_csv(const PixelGraph& g, std::ostream& out) {
    out.precision(17);
    out << "m,n,weight\n";
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};
    for (int d = 0; d < 4; ++d)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= g.width || ny < 0 || ny >= g.height) continue;
                out << (static_cast<long long>(y) * g.width + x) << ','
                    << (static_cast<long long>(ny) * g.width + nx) << ',' << g.w[d].at(x, y)
                    << '\n';
            }
}

void validate_graph(const PixelGraph& g) {
    for (int d = 0; d < 4; ++d)
        for (size_t i = 0; i < g.w[d].size(); ++i)
            if (!(g.w[d][i] >= 0.0) || !std::isfinite(g.w[d][i]))
                throw NumericError("validate_graph: negative or non-finite weight");
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            double d = 0.0;
            for (int k = 0; k < 8; ++k) d += g.neighbor_weight(x, y, k);
            double stored = g.degree.at(x, y);
            if (std::abs(d - stored) > 1e-12 * std::max(1.0, std::abs(d)))
                throw NumericError("validate_graph: degree inconsistent with weights");
        }
}

}  // namespace tofgraph
