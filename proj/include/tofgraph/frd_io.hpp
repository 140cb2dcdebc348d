#pragma once

#include <filesystem>

#include "tofgraph/core.hpp"
#include "tofgraph/tof_imaging.hpp"

// FRD raster container: magic "FRD1", then width/height/channels/dtype as
// u32 little-endian (dtype 0 = float32), then row-major channel-interleaved
// float32 payload, little-endian. Bit-exact across platforms by construction.

namespace tofgraph {

struct FrdImage {
    uint32_t width = 0;
    uint32_t height = 0;
    uint32_t channels = 0;
    std::vector<float> data;  // row-major, channel-interleaved

    float& at(uint32_t x, uint32_t y, uint32_t c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(uint32_t x, uint32_t y, uint32_t c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

void write_frd(const std::filesystem::path& path, const FrdImage& img);
FrdImage read_frd(const std::filesystem::path& path);

// Depth frames are stored as (depth, amplitude) pairs; invalid pixels carry
// NaN in the depth channel. Raw frames are (i, q) pairs.
FrdImage frd_from_depth(const DepthFrame& d);
DepthFrame depth_from_frd(const FrdImage& img);
FrdImage frd_from_raw(const RawFrame& r);
RawFrame raw_from_frd(const FrdImage& img, int freq_index);

// FNV-1a 64-bit digests used in run manifests.
uint64_t fnv1a64(const void* data, size_t size);
uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string digest_hex(uint64_t digest);

}  // namespace tofgraph
