#pragma once

#include "tofgraph/glr_solver.hpp"
#include "tofgraph/graph_core.hpp"
#include "tofgraph/noise_model.hpp"
#include "tofgraph/tof_imaging.hpp"

// Serial reference implementations of the parallel kernels, written as plain
// nested loops. The OpenMP paths must match these bit for bit; the test
// suites assert that and the benchmark target compares their runtimes.

namespace tofgraph::reference {

CorrelationFrame correlate(const DepthFrame& depth, const RasterD& alpha, const RasterD& beta,
                           const SensorModel& model, int freq_index);
RawFrame extract_iq(const CorrelationFrame& corr, const SensorModel& model);
DepthFrame raw2d(const RawFrame& raw, const SensorModel& model);
RawFrame add_awgn(const RawFrame& raw, const NoiseSpec& spec);

FeatureField compute_features(const DepthFrame& frame, int window);
PixelGraph intra_graph(const FeatureField& feat, double sigma_f);
InterFrameGraph inter_graph(const FeatureField& feat_t, const FeatureField& feat_prev,
                            const AttentionParams& params, int q);
RasterD mapping_confidence(const FeatureField& feat_t, const FeatureField& feat_prev,
                           const InterFrameGraph& inter, double sigma_c);
PixelGraph map_graph(const PixelGraph& prev, const InterFrameGraph& inter);

RasterD unrolled_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                                 const PixelGraph& graph, int inner_iters);

}  // namespace tofgraph::reference
