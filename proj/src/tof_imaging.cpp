#include "tofgraph/tof_imaging.hpp"

#include <algorithm>
#include <cmath>

namespace tofgraph {

void SensorModel::validate() const {
    if (mod_freqs.empty() || mod_freqs.size() > 2)
        throw DomainError("SensorModel: expected 1 or 2 modulation frequencies");
    for (double f : mod_freqs)
        if (!(f > 0.0)) throw DomainError("SensorModel: modulation frequency must be > 0");
    if (mod_freqs.size() == 2 && !(mod_freqs[0] < mod_freqs[1]))
        throw DomainError("SensorModel: frequencies must be ordered low, high");
    if (phase_offsets.size() < 3)
        throw DomainError("SensorModel: need at least 3 phase offsets");
    for (size_t a = 0; a < phase_offsets.size(); ++a)
        for (size_t b = a + 1; b < phase_offsets.size(); ++b)
            if (phase_offsets[a] == phase_offsets[b])
                throw DomainError("SensorModel: phase offsets must be distinct");
    if (!(amplitude_floor > 0.0))
        throw DomainError("SensorModel: amplitude floor must be > 0");
}

double SensorModel::unambiguous_range(int freq_index) const {
    return light_speed / (2.0 * mod_freqs.at(freq_index));
}

double SensorModel::iq_gain() const {
    double g = 0.0;
    for (double th : phase_offsets) g += std::cos(th) * std::cos(th);
    return g;
}

CorrelationFrame correlate(const DepthFrame& depth, const RasterD& alpha, const RasterD& beta,
                           const SensorModel& model, int freq_index) {
    model.validate();
    require_same_shape(depth.depth, alpha, "correlate");
    require_same_shape(depth.depth, beta, "correlate");
    const int w = depth.width(), h = depth.height();
    const double f = model.mod_freqs.at(freq_index);
    const double phase_per_meter = 4.0 * kPi * f / model.light_speed;

    for (size_t p = 0; p < alpha.size(); ++p)
        if (!(alpha[p] >= 0.0)) throw DomainError("correlate: alpha must be >= 0");

    CorrelationFrame corr;
    corr.width = w;
    corr.height = h;
    corr.freq_index = freq_index;
    corr.alpha = alpha;
    corr.beta = beta;
    corr.samples.assign(model.phase_offsets.size(), RasterD(w, h));

    for (size_t s = 0; s < model.phase_offsets.size(); ++s) {
        const double theta = model.phase_offsets[s];
        RasterD& out = corr.samples[s];
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double phi = phase_per_meter * depth.depth.at(x, y);
                out.at(x, y) = 0.5 * alpha.at(x, y) * std::cos(phi + theta) + beta.at(x, y);
            }
        }
    }
    return corr;
}

RawFrame extract_iq(const CorrelationFrame& corr, const SensorModel& model) {
    if (corr.samples.size() != model.phase_offsets.size())
        throw StructuralError("extract_iq: sample count does not match offset count");
    for (const RasterD& s : corr.samples)
        if (s.width() != corr.width || s.height() != corr.height)
            throw StructuralError("extract_iq: sample raster dimensions differ");

    RawFrame raw(corr.width, corr.height, corr.freq_index);
    const size_t n_offsets = model.phase_offsets.size();
    std::vector<double> cos_w(n_offsets), sin_w(n_offsets);
    for (size_t s = 0; s < n_offsets; ++s) {
        cos_w[s] = std::cos(model.phase_offsets[s]);
        sin_w[s] = std::sin(model.phase_offsets[s]);
    }

    const int w = corr.width, h = corr.height;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double xi = 0.0, xq = 0.0;
            for (size_t s = 0; s < n_offsets; ++s) {
                double c = corr.samples[s].at(x, y);
                xi += cos_w[s] * c;
                xq -= sin_w[s] * c;
            }
            raw.i_raster.at(x, y) = xi;
            raw.q_raster.at(x, y) = xq;
        }
    }
    return raw;
}

DepthFrame raw2d(const RawFrame& raw, const SensorModel& model) {
    require_same_shape(raw.i_raster, raw.q_raster, "raw2d");
    const int w = raw.width, h = raw.height;
    const double f = model.mod_freqs.at(raw.freq_index);
    const double meters_per_phase = model.light_speed / (4.0 * kPi * f);

    DepthFrame out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double xi = raw.i_raster.at(x, y);
            double xq = raw.q_raster.at(x, y);
            double amp = std::hypot(xi, xq);
            double phi = std::atan2(xq, xi);
            if (phi < 0.0) phi += 2.0 * kPi;
            out.depth.at(x, y) = meters_per_phase * phi;
            out.amplitude.at(x, y) = amp;
            out.valid.at(x, y) = amp >= model.amplitude_floor ? 1 : 0;
        }
    }
    return out;
}

double roundtrip_residual(const DepthFrame& depth, const SensorModel& model, int freq_index) {
    RasterD beta(depth.width(), depth.height(), 0.0);
    CorrelationFrame corr = correlate(depth, depth.amplitude, beta, model, freq_index);
    RawFrame raw = extract_iq(corr, model);
    DepthFrame rec = raw2d(raw, model);

    double worst = 0.0;
    for (int y = 0; y < depth.height(); ++y)
        for (int x = 0; x < depth.width(); ++x)
            if (depth.valid.at(x, y) && rec.valid.at(x, y))
                worst = std::max(worst, std::abs(rec.depth.at(x, y) - depth.depth.at(x, y)));
    return worst;
}

DepthFrame unwrap_dual_freq(const DepthFrame& d_low, const DepthFrame& d_high,
                            const SensorModel& model) {
    if (model.mod_freqs.size() != 2)
        throw DomainError("unwrap_dual_freq: two configured frequencies required");
    require_same_shape(d_low.depth, d_high.depth, "unwrap_dual_freq");

    const double range_low = model.unambiguous_range(0);
    const double period_high = model.unambiguous_range(1);
    const int k_max = static_cast<int>(std::ceil(range_low / period_high));
    const int w = d_low.width(), h = d_low.height();

    DepthFrame out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool ok = d_low.valid.at(x, y) && d_high.valid.at(x, y);
            double lo = d_low.depth.at(x, y);
            double hi = d_high.depth.at(x, y);
            // Best physical candidate d_high + k * period within the low range.
            double best = hi;
            double best_err = std::abs(hi - lo);
            for (int k = 1; k <= k_max; ++k) {
                double cand = hi + k * period_high;
                if (cand > range_low + 0.5 * period_high) break;
                double err = std::abs(cand - lo);
                if (err < best_err) {
                    best_err = err;
                    best = cand;
                }
            }
            if (best_err > 0.5 * period_high) ok = false;
            out.depth.at(x, y) = best;
            out.amplitude.at(x, y) =
                std::min(d_low.amplitude.at(x, y), d_high.amplitude.at(x, y));
            out.valid.at(x, y) = ok ? 1 : 0;
        }
    }
    return out;
}

}  // namespace tofgraph
