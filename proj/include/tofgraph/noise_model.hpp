#pragma once

#include "tofgraph/core.hpp"
#include "tofgraph/tof_imaging.hpp"

// AWGN corruption of I/Q rasters and the induced per-pixel depth-noise
// density, with a Monte-Carlo empirical oracle.
//
// Density convention: both pdf functions evaluate the phase-domain density
// at psi = 4 pi f n_d / c, i.e. they integrate to one against
// d(psi) = (4 pi f / c) d(n_d). Consumers integrating over depth error in
// meters must fold in that Jacobian (see depth_noise_phase_jacobian).

namespace tofgraph {

struct NoiseSpec {
    double sigma = 0.05;  // AWGN std deviation on I/Q, amplitude units
    uint64_t seed = 0;
};

// y = x + n with n iid N(0, sigma^2), independently on I and Q, generated
// deterministically from the seed via the counter-based stream (pixel index
// is the counter). Identical (raw, spec) gives bit-identical output.
RawFrame add_awgn(const RawFrame& raw, const NoiseSpec& spec);

// Full depth-noise density: the cosine-erf term plus the uniform floor that
// dominates at low SNR. gamma = sigma / amplitude.
double depth_noise_pdf_exact(double n_d, double gamma, double f_m);

// Small-gamma approximation: cos * exp(-sin^2 / (2 gamma^2)) / (gamma sqrt(2 pi)).
double depth_noise_pdf_approx(double n_d, double gamma, double f_m);

// d(psi)/d(n_d); multiply pdf values by this to get a density per meter.
inline double depth_noise_phase_jacobian(double f_m) {
    return 4.0 * kPi * f_m / kLightSpeed;
}

// Std of the small-gamma Gaussian limit, in meters: gamma * c / (4 pi f).
inline double depth_noise_sigma(double gamma, double f_m) {
    return gamma * kLightSpeed / (4.0 * kPi * f_m);
}

struct DepthNoiseHistogram {
    double lo = 0.0;      // left edge of first bin, meters of depth error
    double hi = 0.0;      // right edge of last bin
    std::vector<uint64_t> counts;
    uint64_t total = 0;   // includes out-of-range samples
    uint64_t underflow = 0;
    uint64_t overflow = 0;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_center(size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
};

// Simulates n_samples noisy I/Q draws for a single pixel at the given true
// depth and amplitude, reconstructs depth through the raw2d formula and
// histograms the wrapped depth error. Bins span +/- 4 analytic std unless
// sigma is zero, in which case a degenerate single-bin histogram is returned.
DepthNoiseHistogram monte_carlo_depth_noise(double depth, double amplitude, const NoiseSpec& spec,
                                            const SensorModel& model, int freq_index,
                                            uint64_t n_samples, int bins = 101);

// Model probability mass of one histogram bin (3-point Simpson in n_d with
// the phase Jacobian folded in).
double pdf_bin_mass_exact(double lo, double hi, double gamma, double f_m);
double pdf_bin_mass_approx(double lo, double hi, double gamma, double f_m);

// Total-variation distance between the empirical histogram and the model
// pdf, including any out-of-range mass.
double tv_distance_exact(const DepthNoiseHistogram& h, double gamma, double f_m);
double tv_distance_approx(const DepthNoiseHistogram& h, double gamma, double f_m);

}  // namespace tofgraph
