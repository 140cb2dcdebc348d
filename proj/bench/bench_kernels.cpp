// Kernel benchmark: OpenMP-parallel paths against the serial reference
// implementations, with an agreement check on every pair.
//
//   bench_kernels [width height reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tofgraph/glr_solver.hpp"
#include "tofgraph/graph_core.hpp"
#include "tofgraph/noise_model.hpp"
#include "tofgraph/reference.hpp"
#include "tofgraph/scene_synth.hpp"
#include "tofgraph/tof_imaging.hpp"

using namespace tofgraph;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename Fn>
double time_ms(int reps, Fn fn) {
    fn();  // warm-up
    double t0 = now_ms();
    for (int r = 0; r < reps; ++r) fn();
    return (now_ms() - t0) / reps;
}

double max_abs_diff(const RasterD& a, const RasterD& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-22s %10.2f ms %10.2f ms %8.2fx   max|diff| %.3g\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int w = argc > 1 ? std::atoi(argv[1]) : 320;
    const int h = argc > 2 ? std::atoi(argv[2]) : 240;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

#ifdef _OPENMP
    std::printf("threads: %d, frame: %dx%d, reps: %d\n", omp_get_max_threads(), w, h, reps);
#else
    std::printf("OpenMP disabled, frame: %dx%d, reps: %d\n", w, h, reps);
#endif
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    SensorModel model;
    Scene scene = teapot_lite_scene();
    CameraIntrinsics intr;
    intr.width = w;
    intr.height = h;
    intr.focal = 0.8 * w;
    CameraPath path = linear_path(intr, 2, {0.03, 0.01, 0.02});
    DepthFrame depth = render_depth(scene, path, 0);
    DepthFrame depth_prev = render_depth(scene, path, 1);
    RasterD beta(w, h, scene.ambient);

    CorrelationFrame corr_s, corr_p;
    double ts = time_ms(reps, [&] { corr_s = reference::correlate(depth, depth.amplitude, beta, model, 0); });
    double tp = time_ms(reps, [&] { corr_p = correlate(depth, depth.amplitude, beta, model, 0); });
    report("correlate", ts, tp, max_abs_diff(corr_s.samples[0], corr_p.samples[0]));

    RawFrame raw_s, raw_p;
    ts = time_ms(reps, [&] { raw_s = reference::extract_iq(corr_s, model); });
    tp = time_ms(reps, [&] { raw_p = extract_iq(corr_p, model); });
    report("extract_iq", ts, tp, max_abs_diff(raw_s.i_raster, raw_p.i_raster));

    NoiseSpec spec{0.05, 7};
    RawFrame noisy_s, noisy_p;
    ts = time_ms(reps, [&] { noisy_s = reference::add_awgn(raw_s, spec); });
    tp = time_ms(reps, [&] { noisy_p = add_awgn(raw_p, spec); });
    report("add_awgn", ts, tp, max_abs_diff(noisy_s.i_raster, noisy_p.i_raster));

    DepthFrame rec_s, rec_p;
    ts = time_ms(reps, [&] { rec_s = reference::raw2d(noisy_s, model); });
    tp = time_ms(reps, [&] { rec_p = raw2d(noisy_p, model); });
    report("raw2d", ts, tp, max_abs_diff(rec_s.depth, rec_p.depth));

    FeatureField feat_s, feat_p;
    ts = time_ms(reps, [&] { feat_s = reference::compute_features(rec_s, 3); });
    tp = time_ms(reps, [&] { feat_p = compute_features(rec_p, 3); });
    report("compute_features", ts, tp, max_abs_diff(feat_s.values, feat_p.values));
    FeatureField feat_prev = compute_features(depth_prev, 3);

    PixelGraph intra_s, intra_p;
    ts = time_ms(reps, [&] { intra_s = reference::intra_graph(feat_s, 0.75); });
    tp = time_ms(reps, [&] { intra_p = intra_graph(feat_p, 0.75); });
    report("intra_graph", ts, tp, max_abs_diff(intra_s.degree, intra_p.degree));

    AttentionParams attn = AttentionParams::identity(feat_p.dim);
    InterFrameGraph inter_s, inter_p;
    ts = time_ms(reps, [&] { inter_s = reference::inter_graph(feat_s, feat_prev, attn, 7); });
    tp = time_ms(reps, [&] { inter_p = inter_graph(feat_p, feat_prev, attn, 7); });
    report("inter_graph", ts, tp, max_abs_diff(inter_s.weights, inter_p.weights));

    RasterD phi_s, phi_p;
    ts = time_ms(reps, [&] { phi_s = reference::mapping_confidence(feat_s, feat_prev, inter_s, 0.75); });
    tp = time_ms(reps, [&] { phi_p = mapping_confidence(feat_p, feat_prev, inter_p, 0.75); });
    report("mapping_confidence", ts, tp, max_abs_diff(phi_s, phi_p));

    PixelGraph prev_graph = intra_graph(feat_prev, 0.75);
    PixelGraph mapped_s, mapped_p;
    ts = time_ms(reps, [&] { mapped_s = reference::map_graph(prev_graph, inter_s); });
    tp = time_ms(reps, [&] { mapped_p = map_graph(prev_graph, inter_p); });
    report("map_graph", ts, tp, max_abs_diff(mapped_s.degree, mapped_p.degree));

    PixelGraph fused = fuse_graphs(mapped_p, intra_p, phi_p);
    RasterD lam(w, h, 2.0);
    RasterD sol_s, sol_p;
    ts = time_ms(reps, [&] {
        sol_s = reference::unrolled_component_solve(noisy_s.i_raster, lam, fused, 8);
    });
    tp = time_ms(reps, [&] { sol_p = unrolled_component_solve(noisy_p.i_raster, lam, fused, 8); });
    report("unrolled_solve (P=8)", ts, tp, max_abs_diff(sol_s, sol_p));

    return 0;
}
