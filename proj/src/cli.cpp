#include "tofgraph/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "tofgraph/frd_io.hpp"
#include "tofgraph/metrics.hpp"
#include "tofgraph/pipeline.hpp"

namespace tofgraph {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// --- small utilities -------------------------------------------------------

struct StageTimer {
    std::map<std::string, double> ms;
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void lap(const std::string& stage) {
        auto now = std::chrono::steady_clock::now();
        ms[stage] += std::chrono::duration<double, std::milli>(now - mark).count();
        mark = now;
    }
};

int line_of_byte(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json parse_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_of_byte(text, e.byte) << ": " << e.what();
        throw std::invalid_argument(msg.str());
    }
}

std::string frame_name(const char* prefix, int t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d.frd", prefix, t);
    return buf;
}

std::string raw_name(const char* prefix, size_t freq, int t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_f%zu_%04d.frd", prefix, freq, t);
    return buf;
}

// --- config (de)serialization ----------------------------------------------

void apply_config_json(const json& j, PipelineConfig& cfg) {
    if (j.contains("sensor")) {
        const json& s = j["sensor"];
        if (s.contains("mod_freqs")) cfg.sensor.mod_freqs = s["mod_freqs"].get<std::vector<double>>();
        if (s.contains("phase_offsets"))
            cfg.sensor.phase_offsets = s["phase_offsets"].get<std::vector<double>>();
        if (s.contains("amplitude_floor")) cfg.sensor.amplitude_floor = s["amplitude_floor"];
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        if (n.contains("sigma")) cfg.noise.sigma = n["sigma"];
        if (n.contains("seed")) cfg.noise.seed = n["seed"].get<uint64_t>();
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("lambda")) cfg.solver.lambda = s["lambda"];
        if (s.contains("outer_iters")) cfg.solver.outer_iters = s["outer_iters"];
        if (s.contains("inner_iters")) cfg.solver.inner_iters = s["inner_iters"];
        if (s.contains("oracle_tol")) cfg.solver.oracle_tol = s["oracle_tol"];
        if (s.contains("q_clamp")) cfg.solver.q_clamp = s["q_clamp"];
        if (s.contains("q_clamp_scale")) cfg.solver.q_clamp_scale = s["q_clamp_scale"];
    }
    if (j.contains("graph")) {
        const json& g = j["graph"];
        if (g.contains("q")) cfg.graph.q = g["q"];
        if (g.contains("sigma_f")) cfg.graph.sigma_f = g["sigma_f"];
        if (g.contains("sigma_c")) cfg.graph.sigma_c = g["sigma_c"];
        if (g.contains("feature_window")) cfg.graph.feature_window = g["feature_window"];
        if (g.contains("attention_file") && !g["attention_file"].is_null()) {
            json a = parse_json_file(g["attention_file"].get<std::string>());
            AttentionParams p;
            p.dim = a.at("dim");
            p.Q = a.at("Q").get<std::vector<double>>();
            p.K = a.at("K").get<std::vector<double>>();
            if (p.Q.size() != static_cast<size_t>(p.dim) * p.dim ||
                p.K.size() != static_cast<size_t>(p.dim) * p.dim)
                throw StructuralError("attention file: Q/K must be dim x dim row-major");
            cfg.graph.attention = std::move(p);
        }
    }
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["sensor"] = {{"mod_freqs", cfg.sensor.mod_freqs},
                   {"phase_offsets", cfg.sensor.phase_offsets},
                   {"amplitude_floor", cfg.sensor.amplitude_floor},
                   {"light_speed", cfg.sensor.light_speed}};
    j["noise"] = {{"sigma", cfg.noise.sigma}, {"seed", cfg.noise.seed}};
    j["solver"] = {{"lambda", cfg.solver.lambda},
                   {"outer_iters", cfg.solver.outer_iters},
                   {"inner_iters", cfg.solver.inner_iters},
                   {"oracle_tol", cfg.solver.oracle_tol},
                   {"q_clamp", cfg.solver.q_clamp},
                   {"q_clamp_scale", cfg.solver.q_clamp_scale}};
    j["graph"] = {{"q", cfg.graph.q},
                  {"sigma_f", cfg.graph.sigma_f},
                  {"sigma_c", cfg.graph.sigma_c},
                  {"feature_window", cfg.graph.feature_window},
                  {"attention_identity", cfg.graph.attention.dim == 0}};
    return j;
}

// --- scene / path specs ------------------------------------------------------

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw DomainError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Scene scene_from_json(const json& j) {
    Scene scene;
    scene.ambient = j.value("ambient", 0.0);
    scene.inverse_square_falloff = j.value("inverse_square_falloff", false);
    if (!j.contains("primitives") || !j["primitives"].is_array() || j["primitives"].empty())
        throw DomainError("scene spec: at least one primitive required");
    for (const json& p : j["primitives"]) {
        Primitive pr;
        std::string type = p.at("type");
        pr.albedo = p.value("albedo", 1.0);
        if (pr.albedo < 0.0) throw DomainError("scene spec: albedo must be >= 0");
        if (type == "plane") {
            pr.type = Primitive::Type::Plane;
            pr.point = vec3_from_json(p.at("point"));
            pr.normal = vec3_from_json(p.at("normal"));
            if (norm(pr.normal) == 0.0) throw DomainError("scene spec: zero plane normal");
        } else if (type == "sphere") {
            pr.type = Primitive::Type::Sphere;
            pr.center = vec3_from_json(p.at("center"));
            pr.radius = p.at("radius");
            if (!(pr.radius > 0.0)) throw DomainError("scene spec: sphere radius must be > 0");
        } else if (type == "box") {
            pr.type = Primitive::Type::Box;
            pr.center = vec3_from_json(p.at("center"));
            pr.half_size = vec3_from_json(p.at("half_size"));
            if (p.contains("rotation_deg")) {
                Vec3 r = vec3_from_json(p["rotation_deg"]);
                pr.rotation = Mat3::euler_xyz_deg(r.x, r.y, r.z);
            }
        } else {
            throw DomainError("scene spec: unknown primitive type '" + type + "'");
        }
        scene.primitives.push_back(pr);
    }
    return scene;
}

CameraPath path_from_json(const json& j) {
    CameraPath path;
    path.intrinsics.focal = j.value("focal", 260.0);
    path.intrinsics.width = j.value("width", 320);
    path.intrinsics.height = j.value("height", 240);
    if (j.contains("principal_point")) {
        path.intrinsics.cx = j["principal_point"][0];
        path.intrinsics.cy = j["principal_point"][1];
    }
    if (!(path.intrinsics.focal > 0.0)) throw DomainError("path spec: focal must be > 0");
    if (path.intrinsics.width < 2 || path.intrinsics.height < 2)
        throw DomainError("path spec: image must be at least 2x2");

    auto pose_from = [](const json& p) {
        Pose pose;
        if (p.contains("position")) pose.position = vec3_from_json(p["position"]);
        if (p.contains("rotation_deg")) {
            Vec3 r = vec3_from_json(p["rotation_deg"]);
            pose.rotation = Mat3::euler_xyz_deg(r.x, r.y, r.z);
        }
        return pose;
    };

    if (j.contains("poses")) {
        for (const json& p : j["poses"]) path.poses.push_back(pose_from(p));
    } else {
        int frames = j.value("frames", 8);
        Pose start = j.contains("start") ? pose_from(j["start"]) : Pose{};
        Vec3 tv{}, rv{};
        if (j.contains("velocity")) {
            const json& v = j["velocity"];
            if (v.contains("translation")) tv = vec3_from_json(v["translation"]);
            if (v.contains("rotation_deg")) rv = vec3_from_json(v["rotation_deg"]);
        }
        path = linear_path(path.intrinsics, frames, tv, rv, start);
    }
    if (path.frame_count() < 2) throw DomainError("path spec: need at least 2 frames");
    return path;
}

json default_path_json() {
    return json{{"focal", 260.0},
                {"width", 320},
                {"height", 240},
                {"frames", 8},
                {"velocity", {{"translation", {0.03, 0.01, 0.02}}}}};
}

json default_scene_json() {
    return json{{"ambient", 0.05},
                {"primitives",
                 {{{"type", "plane"}, {"point", {0, 0, 4}}, {"normal", {0, -0.15, -1}}, {"albedo", 1.0}},
                  {{"type", "sphere"}, {"center", {-0.25, 0.05, 2.6}}, {"radius", 0.45}, {"albedo", 0.85}},
                  {{"type", "box"},
                   {"center", {0.45, 0.25, 3.1}},
                   {"half_size", {0.35, 0.3, 0.3}},
                   {"rotation_deg", {0, 25, 0}},
                   {"albedo", 1.15}}}}};
}

// --- manifest ----------------------------------------------------------------

struct ManifestBuilder {
    json j;

    ManifestBuilder(const std::string& command, uint64_t seed) {
        j["tool"] = "tofgraph";
        j["version"] = kToolVersion;
        j["command"] = command;
        j["seed"] = seed;
#ifdef _OPENMP
        j["threads"] = omp_get_max_threads();
#else
        j["threads"] = 1;
#endif
        j["inputs"] = json::object();
        j["outputs"] = json::object();
    }

    void add_input(const fs::path& p) { j["inputs"][p.filename().string()] = digest_hex(fnv1a64_file(p)); }
    void add_output(const fs::path& p) { j["outputs"][p.filename().string()] = digest_hex(fnv1a64_file(p)); }

    void write(const fs::path& path, const StageTimer& timer) {
        json t = json::object();
        for (const auto& [k, v] : timer.ms) t[k] = v;
        j["timings_ms"] = t;
        std::ofstream out(path);
        out << j.dump(2) << '\n';
    }
};

// --- synth -------------------------------------------------------------------

FrdImage frd_from_correspondence(const Correspondence& c) {
    FrdImage img;
    img.width = static_cast<uint32_t>(c.prev_x.width());
    img.height = static_cast<uint32_t>(c.prev_x.height());
    img.channels = 4;
    img.data.resize(static_cast<size_t>(img.width) * img.height * 4);
    for (uint32_t y = 0; y < img.height; ++y)
        for (uint32_t x = 0; x < img.width; ++x) {
            img.at(x, y, 0) = static_cast<float>(c.prev_x.at(x, y));
            img.at(x, y, 1) = static_cast<float>(c.prev_y.at(x, y));
            img.at(x, y, 2) = static_cast<float>(c.prev_depth.at(x, y));
            float flag = 0.0f;
            if (!c.valid.at(x, y))
                flag = 2.0f;
            else if (c.occluded.at(x, y))
                flag = 1.0f;
            img.at(x, y, 3) = flag;
        }
    return img;
}

Correspondence correspondence_from_frd(const FrdImage& img) {
    if (img.channels != 4) throw StructuralError("correspondence file must have 4 channels");
    Correspondence c(static_cast<int>(img.width), static_cast<int>(img.height));
    for (uint32_t y = 0; y < img.height; ++y)
        for (uint32_t x = 0; x < img.width; ++x) {
            c.prev_x.at(x, y) = img.at(x, y, 0);
            c.prev_y.at(x, y) = img.at(x, y, 1);
            c.prev_depth.at(x, y) = img.at(x, y, 2);
            float flag = img.at(x, y, 3);
            c.valid.at(x, y) = flag < 1.5f ? 1 : 0;
            c.occluded.at(x, y) = (flag >= 0.5f && flag < 1.5f) ? 1 : 0;
        }
    return c;
}

int cmd_synth(const fs::path& scene_file, const fs::path& path_file, const fs::path& out_dir,
              const PipelineConfig& cfg) {
    StageTimer timer;
    json scene_json = scene_file.empty() ? default_scene_json() : parse_json_file(scene_file);
    json path_json = path_file.empty() ? default_path_json() : parse_json_file(path_file);
    Scene scene = scene_from_json(scene_json);
    CameraPath path = path_from_json(path_json);
    timer.lap("parse");

    SynthResult synth = synth_sequence(scene, path, cfg.sensor, cfg.noise);
    timer.lap("synthesize");

    fs::create_directories(out_dir);
    ManifestBuilder manifest("synth", cfg.noise.seed);
    manifest.j["config"] = config_to_json(cfg);
    manifest.j["scene"] = scene_json;
    manifest.j["path"] = path_json;
    manifest.j["frames"] = path.frame_count();

    json files;
    files["gt"] = json::array();
    files["raw_clean"] = json::array();
    files["raw_noisy"] = json::array();
    files["correspondence"] = json::array();

    const size_t n_freqs = cfg.sensor.mod_freqs.size();
    for (int t = 0; t < path.frame_count(); ++t) {
        std::string gt_name = frame_name("gt_depth", t);
        write_frd(out_dir / gt_name, frd_from_depth(synth.gt[t]));
        manifest.add_output(out_dir / gt_name);
        files["gt"].push_back(gt_name);

        json clean_row = json::array(), noisy_row = json::array();
        for (size_t f = 0; f < n_freqs; ++f) {
            std::string cn = raw_name("raw_clean", f, t);
            std::string nn = raw_name("raw_noisy", f, t);
            write_frd(out_dir / cn, frd_from_raw(synth.clean[t][f]));
            write_frd(out_dir / nn, frd_from_raw(synth.noisy[t][f]));
            manifest.add_output(out_dir / cn);
            manifest.add_output(out_dir / nn);
            clean_row.push_back(cn);
            noisy_row.push_back(nn);
        }
        files["raw_clean"].push_back(clean_row);
        files["raw_noisy"].push_back(noisy_row);
    }
    for (size_t t = 0; t < synth.correspondence.size(); ++t) {
        std::string cn = frame_name("corr", static_cast<int>(t + 1));
        write_frd(out_dir / cn, frd_from_correspondence(synth.correspondence[t]));
        manifest.add_output(out_dir / cn);
        files["correspondence"].push_back(cn);
    }
    manifest.j["files"] = files;
    timer.lap("write");
    manifest.write(out_dir / "manifest.json", timer);
    std::cout << "synth: wrote " << path.frame_count() << " frames to " << out_dir.string() << "\n";
    return 0;
}

// --- denoise -------------------------------------------------------------------

json load_manifest(const fs::path& dir) {
    fs::path p = dir / "manifest.json";
    if (!fs::exists(p)) throw MissingInputError("no manifest.json in " + dir.string());
    return parse_json_file(p);
}

int cmd_denoise(const fs::path& in_dir, const fs::path& out_dir, const std::string& mode_name,
                const std::string& solver_name, bool force_phi_zero, bool trace,
                const json& user_cfg, uint64_t seed, bool seed_set) {
    StageTimer timer;
    json in_manifest = load_manifest(in_dir);
    // Precedence: defaults < input manifest < user config; the sensor that
    // produced the data stays authoritative for decoding it.
    PipelineConfig cfg;
    if (in_manifest.contains("config")) apply_config_json(in_manifest["config"], cfg);
    if (!user_cfg.is_null()) apply_config_json(user_cfg, cfg);
    if (in_manifest.contains("config") && in_manifest["config"].contains("sensor")) {
        json sensor_only = {{"sensor", in_manifest["config"]["sensor"]}};
        apply_config_json(sensor_only, cfg);
    }
    if (seed_set) cfg.noise.seed = seed;

    DenoiseMode mode = mode_name == "single" ? DenoiseMode::Single : DenoiseMode::Fused;
    SolveMethod method = solver_name == "direct" ? SolveMethod::Direct : SolveMethod::Unrolled;

    const json& files = in_manifest.at("files");
    std::vector<std::vector<RawFrame>> noisy;
    ManifestBuilder manifest("denoise", cfg.noise.seed);
    for (const json& row : files.at("raw_noisy")) {
        std::vector<RawFrame> frame;
        for (size_t f = 0; f < row.size(); ++f) {
            fs::path p = in_dir / row[f].get<std::string>();
            if (!fs::exists(p)) throw MissingInputError("missing input " + p.string());
            frame.push_back(raw_from_frd(read_frd(p), static_cast<int>(f)));
            manifest.add_input(p);
        }
        noisy.push_back(std::move(frame));
    }
    timer.lap("read");

    DenoiseResult result = denoise_sequence(noisy, cfg, mode, method, force_phi_zero, trace);
    timer.lap("denoise");

    fs::create_directories(out_dir);
    manifest.j["config"] = config_to_json(cfg);
    manifest.j["mode"] = mode_name;
    manifest.j["solver"] = solver_name;
    manifest.j["force_phi_zero"] = force_phi_zero;
    json out_files = json::array();
    for (size_t t = 0; t < result.depth.size(); ++t) {
        std::string name = frame_name("denoised", static_cast<int>(t));
        write_frd(out_dir / name, frd_from_depth(result.depth[t]));
        manifest.add_output(out_dir / name);
        out_files.push_back(name);
    }
    manifest.j["files"] = {{"denoised", out_files}};

    if (trace) {
        std::ofstream csv(out_dir / "trace.csv");
        csv.precision(12);
        csv << "frame,freq,outer_iter,step_objective,input_objective\n";
        const size_t n_freqs = cfg.sensor.mod_freqs.size();
        for (size_t i = 0; i < result.traces.size(); ++i) {
            const DenoiseTrace& tr = result.traces[i];
            for (size_t r = 0; r < tr.step_objective.size(); ++r)
                csv << i / n_freqs << ',' << i % n_freqs << ',' << r + 1 << ','
                    << tr.step_objective[r] << ',' << tr.input_objective[r] << '\n';
        }
        manifest.add_output(out_dir / "trace.csv");
    }
    timer.lap("write");
    manifest.write(out_dir / "manifest.json", timer);
    std::cout << "denoise: wrote " << result.depth.size() << " frames to " << out_dir.string()
              << "\n";
    return 0;
}

// --- eval ----------------------------------------------------------------------

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path,
             bool want_tepe, int xt_row) {
    StageTimer timer;
    json gt_manifest = load_manifest(gt_dir);
    json pred_manifest = load_manifest(pred_dir);
    ManifestBuilder manifest("eval", 0);

    std::vector<DepthFrame> gt, pred;
    for (const json& name : gt_manifest.at("files").at("gt")) {
        fs::path p = gt_dir / name.get<std::string>();
        if (!fs::exists(p)) throw MissingInputError("missing " + p.string());
        gt.push_back(depth_from_frd(read_frd(p)));
        manifest.add_input(p);
    }
    for (const json& name : pred_manifest.at("files").at("denoised")) {
        fs::path p = pred_dir / name.get<std::string>();
        if (!fs::exists(p)) throw MissingInputError("missing " + p.string());
        pred.push_back(depth_from_frd(read_frd(p)));
        manifest.add_input(p);
    }

    std::vector<Correspondence> corr;
    if (want_tepe) {
        if (!gt_manifest.at("files").contains("correspondence") ||
            gt_manifest["files"]["correspondence"].size() + 1 != gt.size())
            throw MissingInputError("eval --tepe: correspondence files missing from GT directory");
        for (const json& name : gt_manifest["files"]["correspondence"]) {
            fs::path p = gt_dir / name.get<std::string>();
            if (!fs::exists(p)) throw MissingInputError("missing " + p.string());
            corr.push_back(correspondence_from_frd(read_frd(p)));
        }
    }

    EvalReport rep = evaluate_sequence(pred, gt, want_tepe ? &corr : nullptr);
    json j;
    j["frames"] = json::array();
    for (size_t t = 0; t < rep.frame_mae.size(); ++t)
        j["frames"].push_back({{"mae", rep.frame_mae[t]},
                               {"absrel", rep.frame_absrel[t]},
                               {"delta1", rep.frame_delta1[t]},
                               {"valid_pixels", rep.frame_valid_pixels[t]}});
    j["mean_mae"] = rep.mean_mae;
    j["mean_absrel"] = rep.mean_absrel;
    j["mean_delta1"] = rep.mean_delta1;
    if (rep.has_tepe) {
        j["tepe"] = rep.sequence_tepe;
        j["pair_tepe"] = rep.pair_tepe;
    }

    std::ofstream out(report_path);
    out << j.dump(2) << '\n';
    out.close();
    manifest.add_output(report_path);

    if (xt_row >= 0) {
        auto write_slice = [&](const std::vector<DepthFrame>& seq, const char* name) {
            RasterD slice = xt_slice(seq, xt_row);
            FrdImage img;
            img.width = static_cast<uint32_t>(slice.width());
            img.height = static_cast<uint32_t>(slice.height());
            img.channels = 1;
            img.data.resize(slice.size());
            for (size_t i = 0; i < slice.size(); ++i) img.data[i] = static_cast<float>(slice[i]);
            fs::path p = report_path.parent_path() / name;
            write_frd(p, img);
            manifest.add_output(p);
        };
        write_slice(pred, "xt_pred.frd");
        write_slice(gt, "xt_gt.frd");
    }
    timer.lap("eval");
    manifest.write(report_path.parent_path() / "eval_manifest.json", timer);

    std::cout << "eval: MAE " << rep.mean_mae << " AbsRel " << rep.mean_absrel << " delta1 "
              << rep.mean_delta1;
    if (rep.has_tepe) std::cout << " TEPE " << rep.sequence_tepe;
    std::cout << "\n";
    return 0;
}

// --- noise-sim -------------------------------------------------------------------

int cmd_noise_sim(std::vector<double> gammas, int freq_index, uint64_t samples, int bins,
                  const fs::path& out_csv, const PipelineConfig& cfg) {
    StageTimer timer;
    ManifestBuilder manifest("noise-sim", cfg.noise.seed);
    std::vector<double> unique;
    for (double g : gammas) {
        if (std::find(unique.begin(), unique.end(), g) != unique.end()) {
            std::cerr << "noise-sim: warning: duplicate gamma " << g << " ignored\n";
            continue;
        }
        if (!(g > 0.0)) throw DomainError("noise-sim: gamma must be > 0");
        unique.push_back(g);
    }
    if (unique.empty()) throw DomainError("noise-sim: need at least one gamma");

    const double f_m = cfg.sensor.mod_freqs.at(freq_index);
    const double jac = depth_noise_phase_jacobian(f_m);
    std::ofstream csv(out_csv);
    csv << "gamma,n_d,pdf_exact,pdf_approx,empirical_density\n";
    csv.precision(12);
    for (double gamma : unique) {
        NoiseSpec spec;
        spec.sigma = gamma;  // amplitude 1
        spec.seed = cfg.noise.seed;
        const double depth = 0.5 * cfg.sensor.unambiguous_range(freq_index);
        DepthNoiseHistogram hist =
            monte_carlo_depth_noise(depth, 1.0, spec, cfg.sensor, freq_index, samples, bins);
        const double width = hist.bin_width();
        for (size_t b = 0; b < hist.counts.size(); ++b) {
            double center = hist.bin_center(b);
            // Empirical density in the same phase-domain units as the pdfs.
            double density = static_cast<double>(hist.counts[b]) /
                             (static_cast<double>(hist.total) * width * jac);
            csv << gamma << ',' << center << ',' << depth_noise_pdf_exact(center, gamma, f_m)
                << ',' << depth_noise_pdf_approx(center, gamma, f_m) << ',' << density << '\n';
        }
    }
    csv.close();
    manifest.add_output(out_csv);
    timer.lap("simulate");
    fs::path manifest_path = out_csv.parent_path().empty()
                                 ? fs::path("noise_sim_manifest.json")
                                 : out_csv.parent_path() / "noise_sim_manifest.json";
    manifest.write(manifest_path, timer);
    std::cout << "noise-sim: wrote " << out_csv.string() << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Motion-invariant graph-fusion ToF depth denoising pipeline"};
    app.require_subcommand(1);

    std::string config_file;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool trace = false;
    app.add_option("--config", config_file, "JSON configuration file");
    app.add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
    app.add_flag("--trace", trace, "emit per-iteration objective trace");

    auto* synth = app.add_subcommand("synth", "render a scene and synthesize raw ToF sequences");
    std::string scene_file, path_file, out_dir;
    synth->add_option("--scene", scene_file, "scene spec JSON (default: built-in demo scene)");
    synth->add_option("--path", path_file, "camera path spec JSON");
    synth->add_option("--out", out_dir, "output directory")->required();

    auto* denoise = app.add_subcommand("denoise", "denoise a synthesized sequence");
    std::string in_dir, dn_out, mode = "fused", solver = "unrolled";
    bool force_phi_zero = false;
    denoise->add_option("--in", in_dir, "synth output directory")->required();
    denoise->add_option("--out", dn_out, "output directory")->required();
    denoise->add_option("--mode", mode, "single | fused")
        ->check(CLI::IsMember({"single", "fused"}));
    denoise->add_option("--solver", solver, "unrolled | direct")
        ->check(CLI::IsMember({"unrolled", "direct"}));
    denoise->add_flag("--force-phi-zero", force_phi_zero,
                      "fused machinery with zero mapping confidence");

    auto* eval = app.add_subcommand("eval", "evaluate denoised depth against ground truth");
    std::string pred_dir, gt_dir, report = "report.json";
    bool want_tepe = false;
    int xt_row = -1;
    eval->add_option("--pred", pred_dir, "denoise output directory")->required();
    eval->add_option("--gt", gt_dir, "synth output directory")->required();
    eval->add_option("--out", report, "report JSON path");
    eval->add_flag("--tepe", want_tepe, "also compute TEPE (needs correspondence files)");
    eval->add_option("--xt-row", xt_row, "emit x-t slices of this row as FRD rasters");

    auto* noise_sim = app.add_subcommand("noise-sim", "depth-noise pdf curves and histogram");
    std::vector<double> gammas{0.05};
    int freq_index = 0;
    uint64_t samples = 1000000;
    int bins = 101;
    std::string csv_out = "noise_sim.csv";
    noise_sim->add_option("--gamma", gammas, "gamma = sigma / amplitude values");
    noise_sim->add_option("--freq-index", freq_index, "modulation frequency index");
    noise_sim->add_option("--samples", samples, "Monte-Carlo sample count");
    noise_sim->add_option("--bins", bins, "histogram bin count");
    noise_sim->add_option("--out", csv_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
        json user_cfg;
        PipelineConfig cfg;
        if (!config_file.empty()) {
            user_cfg = parse_json_file(config_file);
            apply_config_json(user_cfg, cfg);
        }
        if (seed_set) cfg.noise.seed = seed;

        if (synth->parsed()) return cmd_synth(scene_file, path_file, out_dir, cfg);
        if (denoise->parsed())
            return cmd_denoise(in_dir, dn_out, mode, solver, force_phi_zero, trace, user_cfg,
                               seed, seed_set);
        if (eval->parsed()) return cmd_eval(pred_dir, gt_dir, report, want_tepe, xt_row);
        if (noise_sim->parsed())
            return cmd_noise_sim(gammas, freq_index, samples, bins, csv_out, cfg);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const MissingInputError& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const StructuralError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tofgraph
