#pragma once

#include "tofgraph/glr_solver.hpp"
#include "tofgraph/graph_core.hpp"
#include "tofgraph/metrics.hpp"
#include "tofgraph/noise_model.hpp"
#include "tofgraph/scene_synth.hpp"

// Sequence-level orchestration shared by the CLI and the acceptance suite:
// per-frame graph construction, fusion with the previous frame, per-frequency
// denoising and dual-frequency merging.

namespace tofgraph {

struct GraphParams {
    int q = 7;                // inter-frame neighborhood size
    double sigma_f = 0.75;    // intra-frame feature bandwidth
    double sigma_c = 0.75;    // mapping-confidence bandwidth
    int feature_window = 3;
    AttentionParams attention;  // empty dim means identity of the feature dim
};

struct PipelineConfig {
    SensorModel sensor;
    NoiseSpec noise;
    SolverConfig solver;
    GraphParams graph;
};

enum class DenoiseMode { Single, Fused };

struct DenoiseResult {
    std::vector<std::vector<RawFrame>> raw;  // [frame][freq]
    std::vector<DepthFrame> depth;           // merged across frequencies
    std::vector<DenoiseTrace> traces;        // [frame * n_freq + freq]
};

// Frame 0 (and every frame in Single mode) falls back to the intra-frame
// graph; Fused mode transports and fuses the previous frame's graph.
// force_phi_zero keeps the fused machinery but zeroes the confidence, which
// must reproduce Single mode bit for bit.
DenoiseResult denoise_sequence(const std::vector<std::vector<RawFrame>>& noisy,
                               const PipelineConfig& cfg, DenoiseMode mode, SolveMethod method,
                               bool force_phi_zero = false, bool want_traces = false);

// Depth of each frame straight from the (noisy) raw data: raw2d per
// frequency, dual-frequency unwrap when two frequencies are configured.
std::vector<DepthFrame> depth_from_raw_sequence(const std::vector<std::vector<RawFrame>>& raw,
                                                const SensorModel& model);
DepthFrame depth_from_raw_frame(const std::vector<RawFrame>& raw_per_freq,
                                const SensorModel& model);

}  // namespace tofgraph
