#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Core containers and utilities shared by every module: dense rasters,
// counter-based deterministic RNG, and reductions whose result does not
// depend on the number of OpenMP threads.

namespace tofgraph {

inline constexpr double kLightSpeed = 2.99792458e8;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Malformed inputs: dimension mismatches, bad file contents.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Values outside an operation's mathematical domain.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite intermediates, solver non-convergence.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Row-major dense grid of values.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw StructuralError("Raster dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }

    T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    const std::vector<T>& vec() const { return data_; }

    bool same_shape(const Raster& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    void fill(T value) { data_.assign(data_.size(), value); }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RasterD = Raster<double>;
using MaskRaster = Raster<uint8_t>;

inline void require_same_shape(const RasterD& a, const RasterD& b, const char* what) {
    if (!a.same_shape(b))
        throw StructuralError(std::string(what) + ": raster dimensions differ");
}

// --- Deterministic counter-based RNG -------------------------------------
//
// All randomness is derived from (key, counter) pairs through SplitMix64
// finalization, so results are independent of evaluation order and thread
// count. Stream derivation rule: a consumer owning master seed s and indices
// (a, b) uses derive_stream(s, a, b) as its key; sample j within the stream
// uses counter j.

inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline uint64_t derive_stream(uint64_t seed, uint64_t a, uint64_t b = 0) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ (a + 0x9E3779B97F4A7C15ull));
    h = mix64(h ^ (b + 0xD1B54A32D192ED03ull));
    return h;
}

// Uniform in (0, 1]; never returns 0 so log() stays finite.
inline double uniform_open01(uint64_t key, uint64_t counter) {
    uint64_t h = mix64(key ^ mix64(counter));
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

// One standard-normal pair per counter via Box-Muller.
inline void normal_pair(uint64_t key, uint64_t counter, double& n0, double& n1) {
    double u1 = uniform_open01(key, 2 * counter);
    double u2 = uniform_open01(key, 2 * counter + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * kPi * u2;
    n0 = r * std::cos(t);
    n1 = r * std::sin(t);
}

// --- Thread-count-independent reductions ----------------------------------
//
// Partial sums are accumulated per row in a fixed order and combined
// serially, so the result is bit-identical for any OpenMP thread count.

double det_sum(const RasterD& a);
double det_dot(const RasterD& a, const RasterD& b);
double det_sum_squares(const RasterD& a);
double det_max_abs(const RasterD& a);

}  // namespace tofgraph
