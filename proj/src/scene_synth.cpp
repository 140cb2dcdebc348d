#include "tofgraph/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tofgraph {

Mat3 Mat3::rot_x(double r) {
    double c = std::cos(r), s = std::sin(r);
    Mat3 m;
    m.m[0] = 1; m.m[1] = 0; m.m[2] = 0;
    m.m[3] = 0; m.m[4] = c; m.m[5] = -s;
    m.m[6] = 0; m.m[7] = s; m.m[8] = c;
    return m;
}

Mat3 Mat3::rot_y(double r) {
    double c = std::cos(r), s = std::sin(r);
    Mat3 m;
    m.m[0] = c;  m.m[1] = 0; m.m[2] = s;
    m.m[3] = 0;  m.m[4] = 1; m.m[5] = 0;
    m.m[6] = -s; m.m[7] = 0; m.m[8] = c;
    return m;
}

Mat3 Mat3::rot_z(double r) {
    double c = std::cos(r), s = std::sin(r);
    Mat3 m;
    m.m[0] = c; m.m[1] = -s; m.m[2] = 0;
    m.m[3] = s; m.m[4] = c;  m.m[5] = 0;
    m.m[6] = 0; m.m[7] = 0;  m.m[8] = 1;
    return m;
}

Mat3 Mat3::euler_xyz_deg(double dx, double dy, double dz) {
    const double k = kPi / 180.0;
    return rot_z(dz * k).mul(rot_y(dy * k)).mul(rot_x(dx * k));
}

Mat3 Mat3::mul(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
            r.m[i * 3 + j] = s;
        }
    return r;
}

namespace {

// Ray o + t*d in world space; d is the camera-frame pixel direction with
// d_cam.z == 1 rotated to world, so the hit parameter t IS the z-depth.
struct Hit {
    double t = std::numeric_limits<double>::infinity();
    double albedo = 0.0;
    bool ok = false;
};

void intersect_plane(const Primitive& pr, Vec3 o, Vec3 d, Hit& hit) {
    double denom = dot(d, pr.normal);
    if (std::abs(denom) < 1e-12) return;
    double t = dot(pr.point - o, pr.normal) / denom;
    if (t > 1e-9 && t < hit.t) hit = {t, pr.albedo, true};
}

void intersect_sphere(const Primitive& pr, Vec3 o, Vec3 d, Hit& hit) {
    Vec3 oc = o - pr.center;
    double a = dot(d, d);
    double b = 2.0 * dot(oc, d);
    double c = dot(oc, oc) - pr.radius * pr.radius;
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    double sq = std::sqrt(disc);
    double t = (-b - sq) / (2.0 * a);
    if (t <= 1e-9) t = (-b + sq) / (2.0 * a);
    if (t > 1e-9 && t < hit.t) hit = {t, pr.albedo, true};
}

void intersect_box(const Primitive& pr, Vec3 o, Vec3 d, Hit& hit) {
    // Slab test in the box frame.
    Vec3 ol = pr.rotation.apply_transposed(o - pr.center);
    Vec3 dl = pr.rotation.apply_transposed(d);
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const double omin[3] = {ol.x, ol.y, ol.z};
    const double dmin[3] = {dl.x, dl.y, dl.z};
    const double half[3] = {pr.half_size.x, pr.half_size.y, pr.half_size.z};
    for (int ax = 0; ax < 3; ++ax) {
        if (std::abs(dmin[ax]) < 1e-15) {
            if (std::abs(omin[ax]) > half[ax]) return;
            continue;
        }
        double ta = (-half[ax] - omin[ax]) / dmin[ax];
        double tb = (half[ax] - omin[ax]) / dmin[ax];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return;
    }
    double t = t0 > 1e-9 ? t0 : t1;
    if (t > 1e-9 && t < hit.t) hit = {t, pr.albedo, true};
}

Hit trace(const Scene& scene, Vec3 o, Vec3 d) {
    Hit hit;
    for (const Primitive& pr : scene.primitives) {
        switch (pr.type) {
            case Primitive::Type::Plane: intersect_plane(pr, o, d, hit); break;
            case Primitive::Type::Sphere: intersect_sphere(pr, o, d, hit); break;
            case Primitive::Type::Box: intersect_box(pr, o, d, hit); break;
        }
    }
    return hit;
}

void resolve_principal_point(const CameraIntrinsics& intr, double& cx, double& cy) {
    cx = intr.cx > 0.0 ? intr.cx : 0.5 * (intr.width - 1);
    cy = intr.cy > 0.0 ? intr.cy : 0.5 * (intr.height - 1);
}

double bilinear(const RasterD& r, double x, double y) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0, fy = y - y0;
    auto clamp_at = [&](int xx, int yy) {
        xx = std::clamp(xx, 0, r.width() - 1);
        yy = std::clamp(yy, 0, r.height() - 1);
        return r.at(xx, yy);
    };
    double v00 = clamp_at(x0, y0), v10 = clamp_at(x0 + 1, y0);
    double v01 = clamp_at(x0, y0 + 1), v11 = clamp_at(x0 + 1, y0 + 1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

}  // namespace

DepthFrame render_depth(const Scene& scene, const CameraPath& path, int frame_t) {
    if (scene.primitives.empty()) throw DomainError("render_depth: scene has no primitives");
    const CameraIntrinsics& intr = path.intrinsics;
    const Pose& pose = path.poses.at(frame_t);
    double cx, cy;
    resolve_principal_point(intr, cx, cy);

    DepthFrame out(intr.width, intr.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            Vec3 d_cam{(x - cx) / intr.focal, (y - cy) / intr.focal, 1.0};
            Vec3 d = pose.rotation.apply(d_cam);
            Hit hit = trace(scene, pose.position, d);
            if (hit.ok) {
                double alpha = scene.inverse_square_falloff ? hit.albedo / (hit.t * hit.t)
                                                            : hit.albedo;
                out.depth.at(x, y) = hit.t;
                out.amplitude.at(x, y) = alpha;
                out.valid.at(x, y) = 1;
            } else {
                out.depth.at(x, y) = 0.0;
                out.amplitude.at(x, y) = 0.0;
                out.valid.at(x, y) = 0;
            }
        }
    }
    return out;
}

Correspondence render_correspondence(const Scene& scene, const CameraPath& path, int t, int dt) {
    if (t - dt < 0) throw DomainError("render_correspondence: t - dt before first frame");
    const CameraIntrinsics& intr = path.intrinsics;
    const Pose& cur = path.poses.at(t);
    const Pose& prev = path.poses.at(t - dt);
    double cx, cy;
    resolve_principal_point(intr, cx, cy);

    DepthFrame cur_depth = render_depth(scene, path, t);
    DepthFrame prev_depth = render_depth(scene, path, t - dt);

    Correspondence corr(intr.width, intr.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            if (!cur_depth.valid.at(x, y)) continue;
            double z = cur_depth.depth.at(x, y);
            Vec3 d_cam{(x - cx) / intr.focal, (y - cy) / intr.focal, 1.0};
            Vec3 p_world = cur.position + z * cur.rotation.apply(d_cam);
            Vec3 p_prev = prev.rotation.apply_transposed(p_world - prev.position);
            corr.valid.at(x, y) = 1;
            if (p_prev.z <= 1e-9) {
                corr.occluded.at(x, y) = 1;
                continue;
            }
            double u = intr.focal * p_prev.x / p_prev.z + cx;
            double v = intr.focal * p_prev.y / p_prev.z + cy;
            // Snap coordinates a rounding error outside the image back in.
            const double snap = 1e-6;
            if (u > -snap && u < 0.0) u = 0.0;
            if (v > -snap && v < 0.0) v = 0.0;
            if (u > intr.width - 1.0 && u < intr.width - 1.0 + snap) u = intr.width - 1.0;
            if (v > intr.height - 1.0 && v < intr.height - 1.0 + snap) v = intr.height - 1.0;
            corr.prev_x.at(x, y) = u;
            corr.prev_y.at(x, y) = v;
            corr.prev_depth.at(x, y) = p_prev.z;
            bool inside = u >= 0.0 && u <= intr.width - 1.0 && v >= 0.0 && v <= intr.height - 1.0;
            if (!inside) {
                corr.occluded.at(x, y) = 1;
                continue;
            }
            double zbuf = bilinear(prev_depth.depth, u, v);
            if (std::abs(zbuf - p_prev.z) > 0.01) corr.occluded.at(x, y) = 1;
        }
    }
    return corr;
}

SynthResult synth_sequence(const Scene& scene, const CameraPath& path, const SensorModel& model,
                           const NoiseSpec& spec) {
    model.validate();
    if (path.frame_count() < 2) throw DomainError("synth_sequence: need at least 2 frames");
    const int frames = path.frame_count();
    const size_t n_freqs = model.mod_freqs.size();
    const double range = model.unambiguous_range(0);

    SynthResult out;
    out.gt.resize(frames);
    out.clean.resize(frames);
    out.noisy.resize(frames);

    std::vector<int> offenders;
    for (int t = 0; t < frames; ++t) {
        out.gt[t] = render_depth(scene, path, t);
        double max_depth = 0.0;
        for (int y = 0; y < out.gt[t].height(); ++y)
            for (int x = 0; x < out.gt[t].width(); ++x)
                if (out.gt[t].valid.at(x, y))
                    max_depth = std::max(max_depth, out.gt[t].depth.at(x, y));
        if (max_depth >= range) offenders.push_back(t);
    }
    if (!offenders.empty()) {
        std::ostringstream msg;
        msg << "synth_sequence: depth exceeds unwrap range " << range << " m in frames";
        for (int t : offenders) msg << ' ' << t;
        throw DomainError(msg.str());
    }

    for (int t = 0; t < frames; ++t) {
        RasterD beta(out.gt[t].width(), out.gt[t].height(), scene.ambient);
        out.clean[t].reserve(n_freqs);
        out.noisy[t].reserve(n_freqs);
        for (size_t f = 0; f < n_freqs; ++f) {
            CorrelationFrame corr =
                correlate(out.gt[t], out.gt[t].amplitude, beta, model, static_cast<int>(f));
            RawFrame clean = extract_iq(corr, model);
            NoiseSpec frame_spec = spec;
            frame_spec.seed = derive_stream(spec.seed, static_cast<uint64_t>(t), f);
            out.clean[t].push_back(clean);
            out.noisy[t].push_back(add_awgn(clean, frame_spec));
        }
    }

    out.correspondence.reserve(frames - 1);
    for (int t = 1; t < frames; ++t)
        out.correspondence.push_back(render_correspondence(scene, path, t, 1));
    return out;
}

Scene teapot_lite_scene() {
    Scene scene;
    scene.ambient = 0.05;

    Primitive back;
    back.type = Primitive::Type::Plane;
    back.point = {0.0, 0.0, 4.0};
    back.normal = {0.0, -0.15, -1.0};
    back.albedo = 1.0;
    scene.primitives.push_back(back);

    Primitive ball;
    ball.type = Primitive::Type::Sphere;
    ball.center = {-0.25, 0.05, 2.6};
    ball.radius = 0.45;
    ball.albedo = 0.85;
    scene.primitives.push_back(ball);

    Primitive crate;
    crate.type = Primitive::Type::Box;
    crate.center = {0.45, 0.25, 3.1};
    crate.half_size = {0.35, 0.3, 0.3};
    crate.rotation = Mat3::euler_xyz_deg(0.0, 25.0, 0.0);
    crate.albedo = 1.15;
    scene.primitives.push_back(crate);
    return scene;
}

CameraPath linear_path(const CameraIntrinsics& intr, int frames, Vec3 translation_per_frame,
                       Vec3 rotation_deg_per_frame, Pose start) {
    CameraPath path;
    path.intrinsics = intr;
    path.poses.reserve(frames);
    for (int t = 0; t < frames; ++t) {
        Pose pose;
        pose.position = start.position + static_cast<double>(t) * translation_per_frame;
        pose.rotation = start.rotation.mul(Mat3::euler_xyz_deg(t * rotation_deg_per_frame.x,
                                                               t * rotation_deg_per_frame.y,
                                                               t * rotation_deg_per_frame.z));
        path.poses.push_back(pose);
    }
    return path;
}

}  // namespace tofgraph
