#include "tofgraph/frd_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace tofgraph {

namespace {

void put_u32_le(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void write_frd(const std::filesystem::path& path, const FrdImage& img) {
    const size_t expected = static_cast<size_t>(img.width) * img.height * img.channels;
    if (img.data.size() != expected)
        throw StructuralError("write_frd: payload size does not match header");

    std::vector<unsigned char> bytes;
    bytes.reserve(20 + img.data.size() * 4);
    bytes.insert(bytes.end(), {'F', 'R', 'D', '1'});
    put_u32_le(bytes, img.width);
    put_u32_le(bytes, img.height);
    put_u32_le(bytes, img.channels);
    put_u32_le(bytes, 0);  // dtype 0 = float32
    for (float f : img.data) put_u32_le(bytes, std::bit_cast<uint32_t>(f));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("write_frd: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StructuralError("write_frd: write failed for " + path.string());
}

FrdImage read_frd(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("read_frd: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 20 || std::memcmp(bytes.data(), "FRD1", 4) != 0)
        throw StructuralError("read_frd: bad magic in " + path.string());

    FrdImage img;
    img.width = get_u32_le(bytes.data() + 4);
    img.height = get_u32_le(bytes.data() + 8);
    img.channels = get_u32_le(bytes.data() + 12);
    uint32_t dtype = get_u32_le(bytes.data() + 16);
    if (dtype != 0) throw StructuralError("read_frd: unsupported dtype tag");
    const size_t count = static_cast<size_t>(img.width) * img.height * img.channels;
    if (bytes.size() != 20 + count * 4)
        throw StructuralError("read_frd: payload length mismatch in " + path.string());
    img.data.resize(count);
    for (size_t i = 0; i < count; ++i)
        img.data[i] = std::bit_cast<float>(get_u32_le(bytes.data() + 20 + i * 4));
    return img;
}

FrdImage frd_from_depth(const DepthFrame& d) {
    FrdImage img;
    img.width = static_cast<uint32_t>(d.width());
    img.height = static_cast<uint32_t>(d.height());
    img.channels = 2;
    img.data.resize(static_cast<size_t>(img.width) * img.height * 2);
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            bool valid = d.valid.at(static_cast<int>(x), static_cast<int>(y)) != 0;
            img.at(x, y, 0) = valid ? static_cast<float>(d.depth.at(x, y))
                                    : std::numeric_limits<float>::quiet_NaN();
            img.at(x, y, 1) = static_cast<float>(d.amplitude.at(x, y));
        }
    }
    return img;
}

DepthFrame depth_from_frd(const FrdImage& img) {
    if (img.channels != 2) throw StructuralError("depth_from_frd: expected 2 channels");
    DepthFrame d(static_cast<int>(img.width), static_cast<int>(img.height));
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            float z = img.at(x, y, 0);
            bool valid = !std::isnan(z);
            d.depth.at(x, y) = valid ? z : 0.0;
            d.amplitude.at(x, y) = img.at(x, y, 1);
            d.valid.at(x, y) = valid ? 1 : 0;
        }
    }
    return d;
}

FrdImage frd_from_raw(const RawFrame& r) {
    FrdImage img;
    img.width = static_cast<uint32_t>(r.width);
    img.height = static_cast<uint32_t>(r.height);
    img.channels = 2;
    img.data.resize(static_cast<size_t>(img.width) * img.height * 2);
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            float xi = static_cast<float>(r.i_raster.at(x, y));
            float xq = static_cast<float>(r.q_raster.at(x, y));
            if (std::isnan(xi) || std::isnan(xq))
                throw StructuralError("frd_from_raw: raw rasters must be finite");
            img.at(x, y, 0) = xi;
            img.at(x, y, 1) = xq;
        }
    }
    return img;
}

RawFrame raw_from_frd(const FrdImage& img, int freq_index) {
    if (img.channels != 2) throw StructuralError("raw_from_frd: expected 2 channels");
    RawFrame r(static_cast<int>(img.width), static_cast<int>(img.height), freq_index);
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            r.i_raster.at(x, y) = img.at(x, y, 0);
            r.q_raster.at(x, y) = img.at(x, y, 1);
        }
    }
    return r;
}

uint64_t fnv1a64(const void* data, size_t size) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xCBF29CE484222325ull;
    for (size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("fnv1a64_file: cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a64(bytes.data(), bytes.size());
}

std::string digest_hex(uint64_t digest) {
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hex[digest & 0xF];
        digest >>= 4;
    }
    return s;
}

}  // namespace tofgraph
