#include "tofgraph/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tofgraph::reference {

CorrelationFrame correlate(const DepthFrame& depth, const RasterD& alpha, const RasterD& beta,
                           const SensorModel& model, int freq_index) {
    const int w = depth.width(), h = depth.height();
    const double f = model.mod_freqs.at(freq_index);
    const double phase_per_meter = 4.0 * kPi * f / model.light_speed;

    CorrelationFrame corr;
    corr.width = w;
    corr.height = h;
    corr.freq_index = freq_index;
    corr.alpha = alpha;
    corr.beta = beta;
    for (double theta : model.phase_offsets) {
        RasterD out(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double phi = phase_per_meter * depth.depth.at(x, y);
                out.at(x, y) = 0.5 * alpha.at(x, y) * std::cos(phi + theta) + beta.at(x, y);
            }
        corr.samples.push_back(std::move(out));
    }
    return corr;
}

RawFrame extract_iq(const CorrelationFrame& corr, const SensorModel& model) {
    RawFrame raw(corr.width, corr.height, corr.freq_index);
    for (int y = 0; y < corr.height; ++y)
        for (int x = 0; x < corr.width; ++x) {
            double xi = 0.0, xq = 0.0;
            for (size_t s = 0; s < model.phase_offsets.size(); ++s) {
                double c = corr.samples[s].at(x, y);
                xi += std::cos(model.phase_offsets[s]) * c;
                xq -= std::sin(model.phase_offsets[s]) * c;
            }
            raw.i_raster.at(x, y) = xi;
            raw.q_raster.at(x, y) = xq;
        }
    return raw;
}

DepthFrame raw2d(const RawFrame& raw, const SensorModel& model) {
    const double f = model.mod_freqs.at(raw.freq_index);
    const double meters_per_phase = model.light_speed / (4.0 * kPi * f);
    DepthFrame out(raw.width, raw.height);
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x) {
            double xi = raw.i_raster.at(x, y);
            double xq = raw.q_raster.at(x, y);
            double amp = std::hypot(xi, xq);
            double phi = std::atan2(xq, xi);
            if (phi < 0.0) phi += 2.0 * kPi;
            out.depth.at(x, y) = meters_per_phase * phi;
            out.amplitude.at(x, y) = amp;
            out.valid.at(x, y) = amp >= model.amplitude_floor ? 1 : 0;
        }
    return out;
}

RawFrame add_awgn(const RawFrame& raw, const NoiseSpec& spec) {
    if (spec.sigma == 0.0) return raw;
    RawFrame out = raw;
    const uint64_t key = mix64(spec.seed);
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x) {
            uint64_t pixel = static_cast<uint64_t>(y) * raw.width + x;
            double ni, nq;
            normal_pair(key, pixel, ni, nq);
            out.i_raster.at(x, y) += spec.sigma * ni;
            out.q_raster.at(x, y) += spec.sigma * nq;
        }
    return out;
}

FeatureField compute_features(const DepthFrame& frame, int window) {
    const int w = frame.width(), h = frame.height();
    const int half = window / 2;
    const int patch = window * window;
    FeatureField feat(w, h, 3 * patch);

    auto cd = [&](int x, int y) {
        return frame.depth.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    auto ca = [&](int x, int y) {
        return frame.amplitude.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* f = feat.at(x, y);
            int idx = 0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    f[idx++] = 0.5 * (cd(x + dx + 1, y + dy) - cd(x + dx - 1, y + dy));
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    f[idx++] = 0.5 * (cd(x + dx, y + dy + 1) - cd(x + dx, y + dy - 1));
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) f[idx++] = ca(x + dx, y + dy);
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
    return feat;
}

namespace {

double dist_sq(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

PixelGraph intra_graph(const FeatureField& feat, double sigma_f) {
    const int w = feat.width, h = feat.height;
    PixelGraph g(w, h);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_f * sigma_f);
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};
    for (int d = 0; d < 4; ++d)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                g.w[d].at(x, y) =
                    std::exp(-dist_sq(feat.at(x, y), feat.at(nx, ny), feat.dim) * inv_two_sigma_sq);
            }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double deg = 0.0;
            for (int k = 0; k < 8; ++k) deg += g.neighbor_weight(x, y, k);
            g.degree.at(x, y) = deg;
        }
    return g;
}

InterFrameGraph inter_graph(const FeatureField& feat_t, const FeatureField& feat_prev,
                            const AttentionParams& params, int q) {
    const int w = feat_t.width, h = feat_t.height, dim = feat_t.dim;
    const int half = q / 2;
    InterFrameGraph inter(w, h, q);

    auto matvec = [&](const std::vector<double>& m, const double* v, std::vector<double>& out) {
        for (int r = 0; r < dim; ++r) {
            double s = 0.0;
            for (int c = 0; c < dim; ++c) s += m[static_cast<size_t>(r) * dim + c] * v[c];
            out[r] = s;
        }
    };

    std::vector<double> qv(dim), kv(dim);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            matvec(params.Q, feat_t.at(x, y), qv);
            double* row = inter.row(x, y);
            double max_score = -std::numeric_limits<double>::infinity();
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    matvec(params.K, feat_prev.at(nx, ny), kv);
                    double s = 0.0;
                    for (int c = 0; c < dim; ++c) s += qv[c] * kv[c];
                    row[(dy + half) * q + (dx + half)] = s;
                    max_score = std::max(max_score, s);
                }
            double total = 0.0;
            for (int dy = -half; dy <= half; ++dy)
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
            for (int i = 0; i < q * q; ++i) row[i] /= total;
        }
    return inter;
}

RasterD mapping_confidence(const FeatureField& feat_t, const FeatureField& feat_prev,
                           const InterFrameGraph& inter, double sigma_c) {
    const int w = feat_t.width, h = feat_t.height;
    const int half = inter.q / 2;
    RasterD phi(w, h);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_c * sigma_c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    best = std::min(best, dist_sq(feat_t.at(x, y), feat_prev.at(nx, ny), feat_t.dim));
                }
            phi.at(x, y) = std::exp(-best * inv_two_sigma_sq);
        }
    return phi;
}

PixelGraph map_graph(const PixelGraph& prev, const InterFrameGraph& inter) {
    const int w = prev.width, h = prev.height;
    const int q = inter.q;
    const int half = q / 2;
    const int dil = half + 1;
    const int dq = q + 2;
    PixelGraph mapped(w, h);
    const int cdx[4] = {1, 0, 1, -1};
    const int cdy[4] = {0, 1, 1, 1};

    std::vector<double> v(static_cast<size_t>(dq) * dq);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::fill(v.begin(), v.end(), 0.0);
            const double* urow = inter.row(x, y);
            for (int ky = -half; ky <= half; ++ky)
                for (int kx = -half; kx <= half; ++kx) {
                    double u = urow[(ky + half) * q + (kx + half)];
                    if (u == 0.0) continue;
                    int px = x + kx, py = y + ky;
                    if (px < 0 || px >= w || py < 0 || py >= h) continue;
                    v[static_cast<size_t>(ky + dil) * dq + (kx + dil)] += u;
                    for (int k = 0; k < 8; ++k) {
                        int lx = px + kNeighborDx[k], ly = py + kNeighborDy[k];
                        if (lx < 0 || lx >= w || ly < 0 || ly >= h) continue;
                        v[static_cast<size_t>(ly - y + dil) * dq + (lx - x + dil)] +=
                            u * prev.neighbor_weight(px, py, k);
                    }
                }
            for (int d = 0; d < 4; ++d) {
                int nx = x + cdx[d], ny = y + cdy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const double* nrow = inter.row(nx, ny);
                double acc = 0.0;
                for (int ly = -half; ly <= half; ++ly)
                    for (int lx = -half; lx <= half; ++lx) {
                        double un = nrow[(ly + half) * q + (lx + half)];
                        if (un == 0.0) continue;
                        acc += un *
                               v[static_cast<size_t>(cdy[d] + ly + dil) * dq + (cdx[d] + lx + dil)];
                    }
                mapped.w[d].at(x, y) = acc;
            }
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double deg = 0.0;
            for (int k = 0; k < 8; ++k) deg += mapped.neighbor_weight(x, y, k);
            mapped.degree.at(x, y) = deg;
        }
    return mapped;
}

RasterD unrolled_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                                 const PixelGraph& graph, int inner_iters) {
    const int w = graph.width, h = graph.height;
    RasterD x = x_prev_outer;
    RasterD next(w, h);
    for (int p = 0; p < inner_iters; ++p) {
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                double s = 0.0;
                for (int k = 0; k < 8; ++k) {
                    int nx = xx + kNeighborDx[k], ny = y + kNeighborDy[k];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    s += graph.neighbor_weight(xx, y, k) * x.at(nx, ny);
                }
                double lam = lambda_diag.at(xx, y);
                next.at(xx, y) =
                    (x_prev_outer.at(xx, y) + lam * s) / (1.0 + lam * graph.degree.at(xx, y));
            }
        std::swap(x, next);
    }
    return x;
}

}  // namespace tofgraph::reference
