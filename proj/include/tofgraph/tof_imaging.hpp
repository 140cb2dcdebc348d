#pragma once

#include "tofgraph/core.hpp"

// Closed-form continuous-wave ToF physics: correlation samples from depth,
// I/Q extraction, depth/amplitude reconstruction and dual-frequency phase
// unwrapping. All operations are pure functions of their inputs.

namespace tofgraph {

struct SensorModel {
    // Modulation frequencies, Hz. One or two entries; when two, the first is
    // the low (unwrapping) frequency.
    std::vector<double> mod_freqs{20e6, 60e6};
    // Correlation phase offsets, radians. Arctangent recovery needs >= 3.
    std::vector<double> phase_offsets{0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
    double light_speed = kLightSpeed;
    // Pixels with recovered amplitude below this are flagged invalid.
    double amplitude_floor = 1e-6;

    void validate() const;
    // Maximum unambiguous depth c / (2 f) for the given frequency.
    double unambiguous_range(int freq_index) const;
    // Sum of cos^2(theta) over the offset set; recovered amplitude equals
    // (alpha / 2) * iq_gain() for symmetric offset sets.
    double iq_gain() const;
};

// In-phase / quadrature raster pair for one modulation frequency.
struct RawFrame {
    int width = 0;
    int height = 0;
    int freq_index = 0;
    RasterD i_raster;
    RasterD q_raster;

    RawFrame() = default;
    RawFrame(int w, int h, int freq)
        : width(w), height(h), freq_index(freq), i_raster(w, h), q_raster(w, h) {}
};

// Per-offset correlation samples c_theta plus the signal amplitude and
// ambient intensity they were generated from.
struct CorrelationFrame {
    int width = 0;
    int height = 0;
    int freq_index = 0;
    std::vector<RasterD> samples;  // one raster per configured phase offset
    RasterD alpha;
    RasterD beta;
};

struct DepthFrame {
    RasterD depth;      // meters
    RasterD amplitude;  // same units as RawFrame
    MaskRaster valid;

    DepthFrame() = default;
    DepthFrame(int w, int h) : depth(w, h), amplitude(w, h), valid(w, h, 1) {}
    int width() const { return depth.width(); }
    int height() const { return depth.height(); }
};

// c_theta = (alpha/2) cos(phi + theta) + beta with phi = 4 pi f d / c.
CorrelationFrame correlate(const DepthFrame& depth, const RasterD& alpha, const RasterD& beta,
                           const SensorModel& model, int freq_index);

// x_i = sum_theta cos(theta) c_theta, x_q = sum_theta -sin(theta) c_theta.
RawFrame extract_iq(const CorrelationFrame& corr, const SensorModel& model);

// phi = atan2(x_q, x_i) wrapped to [0, 2 pi); depth = c phi / (4 pi f);
// amplitude = sqrt(x_i^2 + x_q^2). Low-amplitude pixels are flagged, not faulted.
DepthFrame raw2d(const RawFrame& raw, const SensorModel& model);

// Max absolute depth error over valid pixels of the noiseless
// correlate -> extract_iq -> raw2d chain. Uses the frame's own amplitude
// raster as alpha and zero ambient.
double roundtrip_residual(const DepthFrame& depth, const SensorModel& model, int freq_index = 0);

// Picks the wrap count k >= 0 minimizing |d_high + k c/(2 f_high) - d_low|
// over physical candidates; pixels whose best residual still exceeds half a
// high-frequency wrap are flagged invalid.
DepthFrame unwrap_dual_freq(const DepthFrame& d_low, const DepthFrame& d_high,
                            const SensorModel& model);

}  // namespace tofgraph
