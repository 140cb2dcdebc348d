#include <doctest.h>

#include <cstdio>
#include <sstream>

#include "test_util.hpp"
#include "tofgraph/graph_core.hpp"
#include "tofgraph/linalg.hpp"
#include "tofgraph/reference.hpp"
#include "tofgraph/scene_synth.hpp"

using namespace tofgraph;
using namespace tofgraph::testutil;

namespace {

// Depth raster on an exactly representable grid so constant offsets stay
// exact in floating point.
DepthFrame exact_textured_depth(uint64_t key, int w, int h) {
    DepthFrame d(w, h);
    for (size_t i = 0; i < d.depth.size(); ++i) {
        uint64_t bits = mix64(key ^ mix64(i));
        d.depth[i] = 2.0 + static_cast<double>(bits % 4096) / 65536.0;
        d.amplitude[i] = 1.0 + static_cast<double>((bits >> 16) % 1024) / 4096.0;
    }
    return d;
}

InterFrameGraph one_hot_inter(int w, int h, int q) {
    InterFrameGraph inter(w, h, q);
    const int half = q / 2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) inter.row(x, y)[half * q + half] = 1.0;
    return inter;
}

InterFrameGraph uniform_inter(int w, int h, int q) {
    InterFrameGraph inter(w, h, q);
    const int half = q / 2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* row = inter.row(x, y);
            int count = 0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    if (x + dx >= 0 && x + dx < w && y + dy >= 0 && y + dy < h) ++count;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    if (x + dx >= 0 && x + dx < w && y + dy >= 0 && y + dy < h)
                        row[(dy + half) * q + (dx + half)] = 1.0 / count;
        }
    return inter;
}

InterFrameGraph random_inter(uint64_t key, int w, int h, int q) {
    InterFrameGraph inter(w, h, q);
    const int half = q / 2;
    size_t counter = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* row = inter.row(x, y);
            double total = 0.0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) {
                    ++counter;
                    if (x + dx < 0 || x + dx >= w || y + dy < 0 || y + dy >= h) continue;
                    double v = uniform_open01(key, counter);
                    row[(dy + half) * q + (dx + half)] = v;
                    total += v;
                }
            for (int i = 0; i < q * q; ++i) row[i] /= total;
        }
    return inter;
}

// Dense oracle for the mapped graph: A (W_prev + I) A' with A the dense
// inter-frame matrix.
std::vector<double> dense_mapped(const PixelGraph& prev, const InterFrameGraph& inter) {
    const int w = prev.width, h = prev.height;
    const size_t n = static_cast<size_t>(w) * h;
    const int half = inter.q / 2;
    std::vector<double> a(n * n, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double* row = inter.row(x, y);
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    a[(static_cast<size_t>(y) * w + x) * n + (static_cast<size_t>(ny) * w + nx)] =
                        row[(dy + half) * inter.q + (dx + half)];
                }
        }
    std::vector<double> wp = dense_adjacency(prev);
    for (size_t i = 0; i < n; ++i) wp[i * n + i] += 1.0;  // W_prev + I
    std::vector<double> tmp(n * n, 0.0), b(n * n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            double v = a[i * n + k];
            if (v == 0.0) continue;
            for (size_t j = 0; j < n; ++j) tmp[i * n + j] += v * wp[k * n + j];
        }
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            double v = tmp[i * n + k];
            if (v == 0.0) continue;
            for (size_t j = 0; j < n; ++j) b[i * n + j] += v * a[j * n + k];
        }
    return b;
}

double min_eigenvalue(const std::vector<double>& m, int n) {
    std::vector<double> evals, evecs;
    jacobi_eigen_sym(m, n, evals, evecs);
    return evals.front();
}

}  // namespace

TEST_SUITE("graph_core") {

TEST_CASE("features vanish on constant frames and ignore depth offsets") {
    DepthFrame flat(9, 7);
    flat.depth.fill(2.5);
    flat.amplitude.fill(1.0);
    FeatureField feat = compute_features(flat, 3);
    for (size_t i = 0; i < feat.values.size(); ++i) CHECK(feat.values[i] == 0.0);

    DepthFrame tex = exact_textured_depth(5, 12, 9);
    FeatureField base = compute_features(tex, 3);
    DepthFrame shifted = tex;
    for (size_t i = 0; i < shifted.depth.size(); ++i) shifted.depth[i] += 0.25;
    FeatureField offset = compute_features(shifted, 3);
    CHECK(std::memcmp(base.values.data(), offset.values.data(),
                      base.values.size() * sizeof(double)) == 0);
}

TEST_CASE("step edge produces opposing gradient features") {
    DepthFrame step(9, 5);
    step.amplitude.fill(1.0);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 9; ++x) step.depth.at(x, y) = x < 4 ? 1.0 : 1.5;
    FeatureField feat = compute_features(step, 3);
    const double* left = feat.at(3, 2);
    const double* right = feat.at(5, 2);
    double dot = 0.0;
    for (int c = 0; c < feat.dim; ++c) dot += left[c] * right[c];
    CHECK(dot < -0.1);  // unit vectors, so dot == cosine
}

TEST_CASE("feature vectors are unit norm or zero") {
    DepthFrame tex = exact_textured_depth(6, 10, 8);
    FeatureField feat = compute_features(tex, 3);
    for (int y = 0; y < feat.height; ++y)
        for (int x = 0; x < feat.width; ++x) {
            double n = 0.0;
            for (int c = 0; c < feat.dim; ++c) n += feat.at(x, y)[c] * feat.at(x, y)[c];
            CHECK((std::abs(n - 1.0) < 1e-12 || n == 0.0));
        }
}

TEST_CASE("intra graph weights and degrees") {
    SUBCASE("all-equal features give unit weights and grid degrees") {
        FeatureField feat(6, 5, 4);
        for (size_t i = 0; i < feat.values.size(); ++i) feat.values[i] = 0.5;
        PixelGraph g = intra_graph(feat, 0.5);
        CHECK(g.degree.at(2, 2) == doctest::Approx(8.0));
        CHECK(g.degree.at(2, 0) == doctest::Approx(5.0));
        CHECK(g.degree.at(0, 0) == doctest::Approx(3.0));
        CHECK(g.neighbor_weight(2, 2, 0) == doctest::Approx(1.0));
        validate_graph(g);
    }
    SUBCASE("orthogonal unit features give exp(-1) at sigma 1") {
        FeatureField feat(2, 1, 2);
        feat.at(0, 0)[0] = 1.0;
        feat.at(1, 0)[1] = 1.0;
        PixelGraph g = intra_graph(feat, 1.0);
        CHECK(g.edge_weight(0, 0, 1, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("random features give a PSD Laplacian on a 6x6 grid") {
        FeatureField feat(6, 6, 5);
        for (size_t i = 0; i < feat.values.size(); ++i)
            feat.values[i] = uniform_open01(77, i) - 0.5;
        PixelGraph g = intra_graph(feat, 0.5);
        CHECK(min_eigenvalue(dense_laplacian(g), 36) >= -1e-10);
    }
}

TEST_CASE("inter graph softmax") {
    const int q = 7;
    SUBCASE("single matching neighbor gets e / (e + 48)") {
        const int w = 7, h = 7, dim = 51;
        FeatureField prev(w, h, dim);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) prev.at(x, y)[(y * w + x) % dim] = 1.0;
        FeatureField cur(w, h, dim);
        cur.at(3, 3)[(3 * w + 3) % dim] = 1.0;
        InterFrameGraph inter = inter_graph(cur, prev, AttentionParams::identity(dim), q);
        const double expected = std::exp(1.0) / (std::exp(1.0) + 48.0);
        CHECK(inter.row(3, 3)[3 * q + 3] == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("equal scores give uniform weights") {
        FeatureField cur(9, 9, 3), prev(9, 9, 3);
        InterFrameGraph inter = inter_graph(cur, prev, AttentionParams::identity(3), q);
        for (int i = 0; i < q * q; ++i)
            CHECK(inter.row(4, 4)[i] == doctest::Approx(1.0 / 49.0).epsilon(1e-12));
        for (int y = 0; y < 9; ++y)
            for (int x = 0; x < 9; ++x) {
                double s = 0.0;
                for (int i = 0; i < q * q; ++i) s += inter.row(x, y)[i];
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
    SUBCASE("static scene argmax sits at zero displacement") {
        DepthFrame tex = exact_textured_depth(9, 16, 14);
        FeatureField feat = compute_features(tex, 3);
        InterFrameGraph inter = inter_graph(feat, feat, AttentionParams::identity(feat.dim), q);
        const int half = q / 2;
        int checked = 0;
        for (int y = half; y < 14 - half; ++y)
            for (int x = half; x < 16 - half; ++x) {
                // Only conclusive when the feature is its own unique nearest
                // neighbor within the window.
                double self = 0.0;
                const double* fm = feat.at(x, y);
                for (int c = 0; c < feat.dim; ++c) self += fm[c] * fm[c];
                double best_other = -1e300;
                for (int dy = -half; dy <= half; ++dy)
                    for (int dx = -half; dx <= half; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const double* fk = feat.at(x + dx, y + dy);
                        double s = 0.0;
                        for (int c = 0; c < feat.dim; ++c) s += fm[c] * fk[c];
                        best_other = std::max(best_other, s);
                    }
                if (best_other > self - 1e-9) continue;
                const double* row = inter.row(x, y);
                int argmax = 0;
                for (int i = 1; i < q * q; ++i)
                    if (row[i] > row[argmax]) argmax = i;
                CHECK(argmax == half * q + half);
                ++checked;
            }
        CHECK(checked > 20);
    }
    SUBCASE("dimension mismatch is structural") {
        FeatureField cur(4, 4, 3), prev(4, 4, 3);
        CHECK_THROWS_AS(inter_graph(cur, prev, AttentionParams::identity(4), q),
                        StructuralError);
    }
}

TEST_CASE("mapping confidence") {
    SUBCASE("static scene gives phi = 1 exactly") {
        DepthFrame tex = exact_textured_depth(10, 12, 10);
        FeatureField feat = compute_features(tex, 3);
        InterFrameGraph inter(12, 10, 7);
        RasterD phi = mapping_confidence(feat, feat, inter, 0.5);
        for (size_t i = 0; i < phi.size(); ++i) CHECK(phi[i] == 1.0);
    }
    SUBCASE("matches the brute-force window minimum") {
        DepthFrame a = exact_textured_depth(11, 12, 10);
        DepthFrame b = exact_textured_depth(12, 12, 10);
        FeatureField fa = compute_features(a, 3);
        FeatureField fb = compute_features(b, 3);
        InterFrameGraph inter(12, 10, 5);
        RasterD phi = mapping_confidence(fa, fb, inter, 0.7);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 12; ++x) {
                double best = 1e300;
                for (int dy = -2; dy <= 2; ++dy)
                    for (int dx = -2; dx <= 2; ++dx) {
                        int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= 12 || ny < 0 || ny >= 10) continue;
                        double d = 0.0;
                        for (int c = 0; c < fa.dim; ++c) {
                            double t = fa.at(x, y)[c] - fb.at(nx, ny)[c];
                            d += t * t;
                        }
                        best = std::min(best, d);
                    }
                CHECK(phi.at(x, y) ==
                      doctest::Approx(std::exp(-best / (2.0 * 0.7 * 0.7))).epsilon(1e-12));
            }
    }
    SUBCASE("fast motion beyond the window lowers phi") {
        DepthFrame tex = exact_textured_depth(13, 24, 10);
        DepthFrame shifted(24, 10);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 24; ++x) {
                shifted.depth.at(x, y) = tex.depth.at(std::min(23, x + 6), y);
                shifted.amplitude.at(x, y) = tex.amplitude.at(x, y);
            }
        FeatureField cur = compute_features(shifted, 3);
        FeatureField prev = compute_features(tex, 3);
        InterFrameGraph inter(24, 10, 7);
        RasterD phi_moving = mapping_confidence(cur, prev, inter, 0.5);
        RasterD phi_static = mapping_confidence(cur, cur, inter, 0.5);
        CHECK(det_sum(phi_moving) < 0.8 * det_sum(phi_static));
    }
    SUBCASE("occluded regions carry lower confidence than unoccluded ones") {
        Scene s = teapot_lite_scene();
        CameraIntrinsics intr;
        intr.width = 48;
        intr.height = 40;
        intr.focal = 44.0;
        CameraPath path = linear_path(intr, 3, {0.15, 0.0, 0.0});
        DepthFrame prev = render_depth(s, path, 0);
        DepthFrame cur = render_depth(s, path, 1);
        Correspondence corr = render_correspondence(s, path, 1, 1);
        FeatureField fc = compute_features(cur, 3);
        FeatureField fp = compute_features(prev, 3);
        InterFrameGraph inter(48, 40, 7);
        RasterD phi = mapping_confidence(fc, fp, inter, 0.5);
        double occ_sum = 0.0, un_sum = 0.0;
        int occ_n = 0, un_n = 0;
        for (int y = 0; y < 40; ++y)
            for (int x = 0; x < 48; ++x) {
                if (!corr.valid.at(x, y)) continue;
                if (corr.occluded.at(x, y)) {
                    occ_sum += phi.at(x, y);
                    ++occ_n;
                } else {
                    un_sum += phi.at(x, y);
                    ++un_n;
                }
            }
        REQUIRE(occ_n > 0);
        REQUIRE(un_n > 0);
        CHECK(occ_sum / occ_n < un_sum / un_n);
    }
}

TEST_CASE("map_graph") {
    SUBCASE("one-hot inter weights restrict the previous graph") {
        PixelGraph prev = random_graph(91, 6, 5, 0.1, 1.0);
        InterFrameGraph inter = one_hot_inter(6, 5, 5);
        PixelGraph mapped = map_graph(prev, inter);
        for (int d = 0; d < 4; ++d)
            for (size_t i = 0; i < mapped.w[d].size(); ++i)
                CHECK(mapped.w[d][i] == doctest::Approx(prev.w[d][i]).epsilon(1e-14));
    }
    SUBCASE("zero previous graph with uniform inter counts window overlap") {
        const int q = 7;
        PixelGraph prev(20, 16);  // all-zero weights
        InterFrameGraph inter = uniform_inter(20, 16, q);
        PixelGraph mapped = map_graph(prev, inter);
        // Interior horizontal edge: windows overlap in q*(q-1) cells.
        double expected_e = static_cast<double>(q * (q - 1)) / (q * q * q * q);
        CHECK(mapped.edge_weight(9, 8, 1, 0) == doctest::Approx(expected_e).epsilon(1e-12));
        // Diagonal edge: (q-1)^2 cells.
        double expected_d = static_cast<double>((q - 1) * (q - 1)) / (q * q * q * q);
        CHECK(mapped.edge_weight(9, 8, 1, 1) == doctest::Approx(expected_d).epsilon(1e-12));
    }
    SUBCASE("matches the dense triple product on random 4x4 instances") {
        for (uint64_t seed = 0; seed < 10; ++seed) {
            PixelGraph prev = random_graph(derive_stream(101, seed), 4, 4, 0.0, 1.0);
            InterFrameGraph inter = random_inter(derive_stream(102, seed), 4, 4, 3);
            PixelGraph mapped = map_graph(prev, inter);
            std::vector<double> oracle = dense_mapped(prev, inter);
            const size_t n = 16;
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x)
                    for (int k = 0; k < 8; ++k) {
                        int nx = x + kNeighborDx[k], ny = y + kNeighborDy[k];
                        if (nx < 0 || nx >= 4 || ny < 0 || ny >= 4) continue;
                        size_t m = static_cast<size_t>(y) * 4 + x;
                        size_t nn = static_cast<size_t>(ny) * 4 + nx;
                        CHECK(std::abs(mapped.neighbor_weight(x, y, k) - oracle[m * n + nn]) <
                              1e-12);
                    }
        }
    }
}

TEST_CASE("fuse_graphs") {
    SUBCASE("zero confidence falls back to the current graph bit for bit") {
        PixelGraph mapped = random_graph(111, 8, 6, 0.0, 2.0);
        PixelGraph cur = random_graph(112, 8, 6, 0.0, 1.0);
        RasterD phi(8, 6, 0.0);
        PixelGraph fused = fuse_graphs(mapped, cur, phi);
        CHECK(graphs_bit_identical(fused, cur));
    }
    SUBCASE("full confidence with mapped == cur doubles weights and degrees") {
        PixelGraph cur = random_graph(113, 8, 6, 0.0, 1.0);
        RasterD phi(8, 6, 1.0);
        PixelGraph fused = fuse_graphs(cur, cur, phi);
        for (int d = 0; d < 4; ++d)
            for (size_t i = 0; i < fused.w[d].size(); ++i)
                CHECK(fused.w[d][i] == 2.0 * cur.w[d][i]);
        for (size_t i = 0; i < fused.degree.size(); ++i)
            CHECK(fused.degree[i] == 2.0 * cur.degree[i]);
    }
    SUBCASE("random fusion keeps the Laplacian PSD on a 6x6 grid") {
        PixelGraph mapped = random_graph(114, 6, 6, 0.0, 2.0);
        PixelGraph cur = random_graph(115, 6, 6, 0.0, 1.0);
        RasterD phi = random_raster(116, 6, 6, 0.0, 1.0);
        PixelGraph fused = fuse_graphs(mapped, cur, phi);
        validate_graph(fused);
        CHECK(min_eigenvalue(dense_laplacian(fused), 36) >= -1e-10);
    }
    SUBCASE("quadratic form stays non-negative at larger sizes") {
        PixelGraph mapped = random_graph(117, 20, 16, 0.0, 2.0);
        PixelGraph cur = random_graph(118, 20, 16, 0.0, 1.0);
        RasterD phi = random_raster(119, 20, 16, 0.0, 1.0);
        PixelGraph fused = fuse_graphs(mapped, cur, phi);
        for (uint64_t c = 0; c < 20; ++c) {
            RasterD x = random_raster(derive_stream(120, c), 20, 16, -1.0, 1.0);
            CHECK(fused.quadratic_form(x) >= -1e-10);
        }
    }
}

TEST_CASE("constant depth offset leaves every graph quantity bit-identical") {
    DepthFrame cur = exact_textured_depth(121, 14, 12);
    DepthFrame prev = exact_textured_depth(122, 14, 12);
    auto shift = [](const DepthFrame& f, double delta) {
        DepthFrame out = f;
        for (size_t i = 0; i < out.depth.size(); ++i) out.depth[i] += delta;
        return out;
    };
    const double delta = 0.25;

    FeatureField fc = compute_features(cur, 3);
    FeatureField fp = compute_features(prev, 3);
    FeatureField fc2 = compute_features(shift(cur, delta), 3);
    FeatureField fp2 = compute_features(shift(prev, delta), 3);

    PixelGraph intra_a = intra_graph(fc, 0.5);
    PixelGraph intra_b = intra_graph(fc2, 0.5);
    CHECK(graphs_bit_identical(intra_a, intra_b));

    AttentionParams attn = AttentionParams::identity(fc.dim);
    InterFrameGraph inter_a = inter_graph(fc, fp, attn, 5);
    InterFrameGraph inter_b = inter_graph(fc2, fp2, attn, 5);
    CHECK(std::memcmp(inter_a.weights.data(), inter_b.weights.data(),
                      inter_a.weights.size() * sizeof(double)) == 0);

    RasterD phi_a = mapping_confidence(fc, fp, inter_a, 0.5);
    RasterD phi_b = mapping_confidence(fc2, fp2, inter_b, 0.5);
    CHECK(rasters_bit_identical(phi_a, phi_b));

    PixelGraph prev_intra_a = intra_graph(fp, 0.5);
    PixelGraph prev_intra_b = intra_graph(fp2, 0.5);
    PixelGraph fused_a = fuse_graphs(map_graph(prev_intra_a, inter_a), intra_a, phi_a);
    PixelGraph fused_b = fuse_graphs(map_graph(prev_intra_b, inter_b), intra_b, phi_b);
    CHECK(graphs_bit_identical(fused_a, fused_b));
}

TEST_CASE("arbitrary query/key matrices drive the attention scores") {
    const int w = 6, h = 5, dim = 4, q = 3;
    FeatureField cur(w, h, dim), prev(w, h, dim);
    for (size_t i = 0; i < cur.values.size(); ++i) {
        cur.values[i] = uniform_open01(141, i) - 0.5;
        prev.values[i] = uniform_open01(142, i) - 0.5;
    }
    AttentionParams params;
    params.dim = dim;
    params.Q.resize(dim * dim);
    params.K.resize(dim * dim);
    for (int i = 0; i < dim * dim; ++i) {
        params.Q[i] = uniform_open01(143, i) - 0.5;
        params.K[i] = uniform_open01(144, i) - 0.5;
    }
    InterFrameGraph inter = inter_graph(cur, prev, params, q);

    // Brute-force softmax of (Q f_t)' (K f_prev) per pixel.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::vector<double> scores(q * q, -1e300);
            double qf[dim];
            for (int r = 0; r < dim; ++r) {
                qf[r] = 0.0;
                for (int c = 0; c < dim; ++c) qf[r] += params.Q[r * dim + c] * cur.at(x, y)[c];
            }
            double total = 0.0;
            double max_s = -1e300;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    double kf[dim], s = 0.0;
                    for (int r = 0; r < dim; ++r) {
                        kf[r] = 0.0;
                        for (int c = 0; c < dim; ++c)
                            kf[r] += params.K[r * dim + c] * prev.at(nx, ny)[c];
                        s += qf[r] * kf[r];
                    }
                    scores[(dy + 1) * q + (dx + 1)] = s;
                    max_s = std::max(max_s, s);
                }
            for (int i = 0; i < q * q; ++i)
                if (scores[i] > -1e299) total += std::exp(scores[i] - max_s);
            for (int i = 0; i < q * q; ++i) {
                double expected = scores[i] > -1e299 ? std::exp(scores[i] - max_s) / total : 0.0;
                CHECK(inter.row(x, y)[i] == doctest::Approx(expected).epsilon(1e-12));
            }
        }
}

TEST_CASE("graph dump emits one line per undirected edge") {
    PixelGraph g = random_graph(151, 3, 2, 0.1, 1.0);
    std::ostringstream out;
    dump_graph_csv(g, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "m,n,weight");
    int edges = 0;
    double total = 0.0;
    while (std::getline(in, line)) {
        long long m, n;
        double wgt;
        REQUIRE(std::sscanf(line.c_str(), "%lld,%lld,%lf", &m, &n, &wgt) == 3);
        CHECK(m != n);
        CHECK(wgt >= 0.0);
        total += 2.0 * wgt;  // each undirected edge contributes twice to the degree sum
        ++edges;
    }
    // 3x2 grid: 7 rook edges + 4 diagonal edges.
    CHECK(edges == 11);
    CHECK(total == doctest::Approx(det_sum(g.degree)).epsilon(1e-9));
}

TEST_CASE("parallel graph kernels match the serial reference bit for bit") {
    DepthFrame cur = exact_textured_depth(131, 21, 17);
    DepthFrame prev = exact_textured_depth(132, 21, 17);

    FeatureField fc_p = compute_features(cur, 3);
    FeatureField fc_r = reference::compute_features(cur, 3);
    CHECK(std::memcmp(fc_p.values.data(), fc_r.values.data(),
                      fc_p.values.size() * sizeof(double)) == 0);

    FeatureField fp = compute_features(prev, 3);
    PixelGraph g_p = intra_graph(fc_p, 0.5);
    PixelGraph g_r = reference::intra_graph(fc_r, 0.5);
    CHECK(graphs_bit_identical(g_p, g_r));

    AttentionParams attn = AttentionParams::identity(fc_p.dim);
    InterFrameGraph i_p = inter_graph(fc_p, fp, attn, 5);
    InterFrameGraph i_r = reference::inter_graph(fc_p, fp, attn, 5);
    CHECK(std::memcmp(i_p.weights.data(), i_r.weights.data(),
                      i_p.weights.size() * sizeof(double)) == 0);

    RasterD phi_p = mapping_confidence(fc_p, fp, i_p, 0.5);
    RasterD phi_r = reference::mapping_confidence(fc_p, fp, i_r, 0.5);
    CHECK(rasters_bit_identical(phi_p, phi_r));

    PixelGraph prev_g = intra_graph(fp, 0.5);
    PixelGraph m_p = map_graph(prev_g, i_p);
    PixelGraph m_r = reference::map_graph(prev_g, i_r);
    CHECK(graphs_bit_identical(m_p, m_r));
}

}  // TEST_SUITE
