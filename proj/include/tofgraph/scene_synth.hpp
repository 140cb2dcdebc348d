#pragma once

#include "tofgraph/core.hpp"
#include "tofgraph/noise_model.hpp"
#include "tofgraph/tof_imaging.hpp"

// Desk-scale parametric scenes rendered to ground-truth depth video with
// known per-pixel temporal correspondence, then converted to clean and noisy
// raw ToF sequences.

namespace tofgraph {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

struct Mat3 {
    // Row-major.
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }
    static Mat3 rot_x(double rad);
    static Mat3 rot_y(double rad);
    static Mat3 rot_z(double rad);
    // Euler XYZ, applied as Rz * Ry * Rx.
    static Mat3 euler_xyz_deg(double dx, double dy, double dz);

    Vec3 apply(Vec3 v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Vec3 apply_transposed(Vec3 v) const {
        return {m[0] * v.x + m[3] * v.y + m[6] * v.z, m[1] * v.x + m[4] * v.y + m[7] * v.z,
                m[2] * v.x + m[5] * v.y + m[8] * v.z};
    }
    Mat3 mul(const Mat3& o) const;
};

// Camera-to-world transform. Camera looks along +z, +x right, +y down.
struct Pose {
    Mat3 rotation;
    Vec3 position;
};

struct Primitive {
    enum class Type { Plane, Sphere, Box };
    Type type = Type::Plane;
    // Plane: point + normal. Sphere: center + radius. Box: center +
    // half_size, oriented by rotation.
    Vec3 point;
    Vec3 normal{0, 0, -1};
    Vec3 center;
    double radius = 1.0;
    Vec3 half_size{0.5, 0.5, 0.5};
    Mat3 rotation;
    double albedo = 1.0;
};

struct Scene {
    std::vector<Primitive> primitives;
    double ambient = 0.0;  // beta, same for every pixel
    // When set, alpha = albedo / depth^2 instead of plain albedo.
    bool inverse_square_falloff = false;
};

struct CameraIntrinsics {
    double focal = 260.0;  // pixels; fx == fy
    double cx = 0.0;       // principal point; <= 0 means image center
    double cy = 0.0;
    int width = 320;
    int height = 240;
};

struct CameraPath {
    CameraIntrinsics intrinsics;
    std::vector<Pose> poses;  // one per frame
    int frame_count() const { return static_cast<int>(poses.size()); }
};

// Per-pixel map from frame t to frame t-dt: continuous source coordinate,
// the analytic z-depth of the surface point in the source frame, and an
// occlusion flag. `valid` is false where frame t has no surface.
struct Correspondence {
    RasterD prev_x;
    RasterD prev_y;
    RasterD prev_depth;
    MaskRaster occluded;
    MaskRaster valid;

    Correspondence() = default;
    Correspondence(int w, int h)
        : prev_x(w, h), prev_y(w, h), prev_depth(w, h), occluded(w, h, 0), valid(w, h, 0) {}
};

// Nearest ray-primitive intersection along the optical axis (z-depth) through
// pixel centers; background pixels invalid. The amplitude raster carries the
// hit primitive's albedo (alpha).
DepthFrame render_depth(const Scene& scene, const CameraPath& path, int frame_t);

// Back-projects each pixel of frame t and re-projects into frame t-dt;
// occluded where the re-projected depth disagrees with that frame's z-buffer
// by more than 1 cm, or the re-projection leaves the image.
Correspondence render_correspondence(const Scene& scene, const CameraPath& path, int t, int dt);

struct SynthResult {
    std::vector<DepthFrame> gt;                    // [frame]
    std::vector<std::vector<RawFrame>> clean;      // [frame][freq]
    std::vector<std::vector<RawFrame>> noisy;      // [frame][freq]
    std::vector<Correspondence> correspondence;    // [t] maps frame t+1 -> t
};

// Renders the whole sequence and converts it through the imaging chain;
// per-frame noise streams derive from spec.seed via derive_stream(seed,
// frame, freq). Throws DomainError listing offending frames if any depth
// exceeds the unwrap range.
SynthResult synth_sequence(const Scene& scene, const CameraPath& path, const SensorModel& model,
                           const NoiseSpec& spec);

// Built-in sphere+box+plane demo scene.
Scene teapot_lite_scene();
// Linear path: start pose plus per-frame translation/rotation increments.
CameraPath linear_path(const CameraIntrinsics& intr, int frames, Vec3 translation_per_frame,
                       Vec3 rotation_deg_per_frame = {}, Pose start = {});

}  // namespace tofgraph
