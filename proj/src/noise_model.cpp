#include "tofgraph/noise_model.hpp"

#include <algorithm>
#include <cmath>

namespace tofgraph {

RawFrame add_awgn(const RawFrame& raw, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw DomainError("add_awgn: sigma must be >= 0");
    if (spec.sigma == 0.0) return raw;

    RawFrame out = raw;
    const uint64_t key = mix64(spec.seed);
    const int w = raw.width, h = raw.height;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            uint64_t pixel = static_cast<uint64_t>(y) * w + x;
            double ni, nq;
            normal_pair(key, pixel, ni, nq);
            out.i_raster.at(x, y) += spec.sigma * ni;
            out.q_raster.at(x, y) += spec.sigma * nq;
        }
    }
    return out;
}

double depth_noise_pdf_exact(double n_d, double gamma, double f_m) {
    if (!(gamma > 0.0)) throw DomainError("depth_noise_pdf_exact: gamma must be > 0");
    const double psi = 4.0 * kPi * f_m * n_d / kLightSpeed;
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    const double main_term = c / (2.0 * gamma * std::sqrt(2.0 * kPi)) *
                             (1.0 + std::erf(c / (gamma * std::sqrt(2.0)))) *
                             std::exp(-s * s / (2.0 * gamma * gamma));
    const double floor_term = std::exp(-1.0 / (2.0 * gamma * gamma)) / (2.0 * kPi);
    // Where cos < 0 both terms shrink to ~exp(-1/(2 gamma^2)) and their sum
    // can round an ulp below zero; the density itself is non-negative.
    return std::max(0.0, main_term + floor_term);
}

double depth_noise_pdf_approx(double n_d, double gamma, double f_m) {
    if (!(gamma > 0.0)) throw DomainError("depth_noise_pdf_approx: gamma must be > 0");
    const double psi = 4.0 * kPi * f_m * n_d / kLightSpeed;
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return c / (gamma * std::sqrt(2.0 * kPi)) * std::exp(-s * s / (2.0 * gamma * gamma));
}

DepthNoiseHistogram monte_carlo_depth_noise(double depth, double amplitude, const NoiseSpec& spec,
                                            const SensorModel& model, int freq_index,
                                            uint64_t n_samples, int bins) {
    if (n_samples < 10000) throw DomainError("monte_carlo_depth_noise: need >= 1e4 samples");
    if (bins < 1) throw DomainError("monte_carlo_depth_noise: need >= 1 bin");
    const double f = model.mod_freqs.at(freq_index);
    const double meters_per_phase = model.light_speed / (4.0 * kPi * f);
    const double phi_true = depth / meters_per_phase;
    const double xi0 = amplitude * std::cos(phi_true);
    const double xq0 = amplitude * std::sin(phi_true);
    const double wrap = model.unambiguous_range(freq_index);  // c / (2 f)

    DepthNoiseHistogram hist;
    hist.total = n_samples;
    if (spec.sigma == 0.0) {
        hist.lo = -0.5;
        hist.hi = 0.5;
        hist.counts.assign(1, n_samples);
        return hist;
    }
    const double gamma = spec.sigma / amplitude;
    const double span = 4.0 * depth_noise_sigma(gamma, f);
    hist.lo = -span;
    hist.hi = span;
    hist.counts.assign(bins, 0);

    const uint64_t key = mix64(spec.seed);
    const double inv_width = bins / (hist.hi - hist.lo);

#pragma omp parallel
    {
        std::vector<uint64_t> local(bins, 0);
        uint64_t under = 0, over = 0;
#pragma omp for schedule(static) nowait
        for (long long j = 0; j < static_cast<long long>(n_samples); ++j) {
            double ni, nq;
            normal_pair(key, static_cast<uint64_t>(j), ni, nq);
            double xi = xi0 + spec.sigma * ni;
            double xq = xq0 + spec.sigma * nq;
            double phi = std::atan2(xq, xi);
            if (phi < 0.0) phi += 2.0 * kPi;
            double err = meters_per_phase * phi - depth;
            // Wrap into the sign-symmetric period (-wrap/2, wrap/2].
            err -= wrap * std::floor(err / wrap + 0.5);
            double t = (err - hist.lo) * inv_width;
            if (t < 0.0) {
                ++under;
            } else if (t >= bins) {
                ++over;
            } else {
                ++local[static_cast<size_t>(t)];
            }
        }
#pragma omp critical
        {
            for (int b = 0; b < bins; ++b) hist.counts[b] += local[b];
            hist.underflow += under;
            hist.overflow += over;
        }
    }
    return hist;
}

namespace {

template <typename Pdf>
double simpson_bin_mass(double lo, double hi, Pdf pdf, double f_m) {
    const double jac = depth_noise_phase_jacobian(f_m);
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) * jac * (pdf(lo) + 4.0 * pdf(mid) + pdf(hi)) / 6.0;
}

template <typename Pdf>
double tv_distance(const DepthNoiseHistogram& h, Pdf bin_mass) {
    double tv = 0.0;
    double model_in_range = 0.0;
    const double width = h.bin_width();
    for (size_t b = 0; b < h.counts.size(); ++b) {
        double lo = h.lo + static_cast<double>(b) * width;
        double q = bin_mass(lo, lo + width);
        model_in_range += q;
        double p = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
        tv += std::abs(p - q);
    }
    double p_out = static_cast<double>(h.underflow + h.overflow) / static_cast<double>(h.total);
    double q_out = std::max(0.0, 1.0 - model_in_range);
    tv += std::abs(p_out - q_out);
    return 0.5 * tv;
}

}  // namespace

double pdf_bin_mass_exact(double lo, double hi, double gamma, double f_m) {
    return simpson_bin_mass(lo, hi, [&](double n) { return depth_noise_pdf_exact(n, gamma, f_m); },
                            f_m);
}

double pdf_bin_mass_approx(double lo, double hi, double gamma, double f_m) {
    return simpson_bin_mass(lo, hi, [&](double n) { return depth_noise_pdf_approx(n, gamma, f_m); },
                            f_m);
}

double tv_distance_exact(const DepthNoiseHistogram& h, double gamma, double f_m) {
    return tv_distance(h, [&](double lo, double hi) { return pdf_bin_mass_exact(lo, hi, gamma, f_m); });
}

double tv_distance_approx(const DepthNoiseHistogram& h, double gamma, double f_m) {
    return tv_distance(h,
                       [&](double lo, double hi) { return pdf_bin_mass_approx(lo, hi, gamma, f_m); });
}

}  // namespace tofgraph
