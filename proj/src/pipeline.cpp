#include "tofgraph/pipeline.hpp"

namespace tofgraph {

DenoiseResult denoise_sequence(const std::vector<std::vector<RawFrame>>& noisy,
                               const PipelineConfig& cfg, DenoiseMode mode, SolveMethod method,
                               bool force_phi_zero, bool want_traces) {
    if (noisy.empty()) throw StructuralError("denoise_sequence: empty sequence");
    cfg.sensor.validate();
    cfg.solver.validate();
    const size_t n_freqs = cfg.sensor.mod_freqs.size();
    const int frames = static_cast<int>(noisy.size());
    for (const auto& frame : noisy)
        if (frame.size() != n_freqs)
            throw StructuralError("denoise_sequence: frame is missing a frequency");

    DenoiseResult result;
    result.raw.assign(frames, {});
    if (want_traces) result.traces.resize(static_cast<size_t>(frames) * n_freqs);

    for (size_t f = 0; f < n_freqs; ++f) {
        FeatureField prev_feat;
        PixelGraph prev_intra;
        for (int t = 0; t < frames; ++t) {
            const RawFrame& frame = noisy[t][f];
            FeatureField feat = compute_features(frame, cfg.sensor, cfg.graph.feature_window);
            PixelGraph intra = intra_graph(feat, cfg.graph.sigma_f);

            PixelGraph fused;
            const bool can_fuse = mode == DenoiseMode::Fused && t > 0;
            if (can_fuse) {
                AttentionParams attn = cfg.graph.attention.dim == feat.dim
                                           ? cfg.graph.attention
                                           : AttentionParams::identity(feat.dim);
                InterFrameGraph inter = inter_graph(feat, prev_feat, attn, cfg.graph.q);
                RasterD phi = force_phi_zero
                                  ? RasterD(frame.width, frame.height, 0.0)
                                  : mapping_confidence(feat, prev_feat, inter, cfg.graph.sigma_c);
                PixelGraph mapped = map_graph(prev_intra, inter);
                fused = fuse_graphs(mapped, intra, phi);
            }
            const PixelGraph& graph = can_fuse ? fused : intra;

            DenoiseTrace trace;
            RawFrame denoised = map_denoise_frame(frame, graph, graph, cfg.solver, method,
                                                  want_traces ? &trace : nullptr);
            if (want_traces) result.traces[static_cast<size_t>(t) * n_freqs + f] = std::move(trace);
            result.raw[t].push_back(std::move(denoised));

            prev_feat = std::move(feat);
            prev_intra = std::move(intra);
        }
    }

    result.depth.reserve(frames);
    for (int t = 0; t < frames; ++t)
        result.depth.push_back(depth_from_raw_frame(result.raw[t], cfg.sensor));
    return result;
}

DepthFrame depth_from_raw_frame(const std::vector<RawFrame>& raw_per_freq,
                                const SensorModel& model) {
    if (raw_per_freq.empty()) throw StructuralError("depth_from_raw_frame: no frequencies");
    DepthFrame low = raw2d(raw_per_freq[0], model);
    if (raw_per_freq.size() == 1) return low;
    DepthFrame high = raw2d(raw_per_freq[1], model);
    return unwrap_dual_freq(low, high, model);
}

std::vector<DepthFrame> depth_from_raw_sequence(const std::vector<std::vector<RawFrame>>& raw,
                                                const SensorModel& model) {
    std::vector<DepthFrame> out;
    out.reserve(raw.size());
    for (const auto& frame : raw) out.push_back(depth_from_raw_frame(frame, model));
    return out;
}

}  // namespace tofgraph
