#pragma once

#include "tofgraph/core.hpp"
#include "tofgraph/scene_synth.hpp"
#include "tofgraph/tof_imaging.hpp"

// Per-frame accuracy metrics and the temporal consistency metric computed
// against ground-truth correspondence. Every metric is restricted to the
// intersection of GT-valid and prediction-valid pixels.

namespace tofgraph {

// Mean |pred - gt| over valid pixels, meters.
double mae(const DepthFrame& pred, const DepthFrame& gt);
// Mean |pred - gt| / gt; requires gt > 0 on valid pixels.
double absrel(const DepthFrame& pred, const DepthFrame& gt);
// Fraction of valid pixels with max(pred/gt, gt/pred) < 1.25.
double delta1(const DepthFrame& pred, const DepthFrame& gt);

// Mean |dPred - dGt| over consecutive frame pairs, where d* is the temporal
// depth change along the ground-truth correspondence with bilinear sampling
// at the warped coordinate. corr[t] maps frame t+1 to frame t. Occluded
// pixels are excluded; constant prediction bias cancels exactly.
double tepe(const std::vector<DepthFrame>& pred, const std::vector<DepthFrame>& gt,
            const std::vector<Correspondence>& corr);

// Row `row` of every frame stacked over time: output is width x T.
RasterD xt_slice(const std::vector<DepthFrame>& seq, int row);

struct EvalReport {
    std::vector<double> frame_mae;
    std::vector<double> frame_absrel;
    std::vector<double> frame_delta1;
    std::vector<uint64_t> frame_valid_pixels;
    std::vector<double> pair_tepe;  // one entry per consecutive frame pair
    double mean_mae = 0.0;
    double mean_absrel = 0.0;
    double mean_delta1 = 0.0;
    double sequence_tepe = 0.0;  // pooled over all pairs; NaN without correspondence
    bool has_tepe = false;
};

EvalReport evaluate_sequence(const std::vector<DepthFrame>& pred,
                             const std::vector<DepthFrame>& gt,
                             const std::vector<Correspondence>* corr = nullptr);

}  // namespace tofgraph
