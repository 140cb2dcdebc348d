#include "tofgraph/glr_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tofgraph/linalg.hpp"

namespace tofgraph {

void SolverState::refresh_amplitude() {
    if (!amplitude.same_shape(x_i)) amplitude = RasterD(x_i.width(), x_i.height());
    const int w = x_i.width(), h = x_i.height();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            amplitude.at(x, y) = std::hypot(x_i.at(x, y), x_q.at(x, y));
}

RasterD prior_weight(const SolverState& state, Component comp, const SolverConfig& cfg) {
    cfg.validate();
    const RasterD& denom_src = comp == Component::I ? state.x_q : state.x_i;
    const int w = state.x_i.width(), h = state.x_i.height();
    const double n_pixels = static_cast<double>(state.amplitude.size());
    const double eps = cfg.resolve_clamp(det_sum(state.amplitude) / n_pixels);

    RasterD lam(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double denom = std::max(std::abs(denom_src.at(x, y)), eps);
            double ratio = state.amplitude.at(x, y) / denom;
            lam.at(x, y) = 2.0 * cfg.lambda * ratio * ratio;
        }
    }
    return lam;
}

namespace {

void check_finite(const RasterD& x, const char* where) {
    const int w = x.width(), h = x.height();
    const long long none = std::numeric_limits<long long>::max();
    long long bad = none;
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
            if (!std::isfinite(x.at(xx, y))) {
                long long idx = static_cast<long long>(y) * w + xx;
                if (idx < bad) bad = idx;
            }
        }
    }
    if (bad != none) {
        std::ostringstream msg;
        msg << where << ": non-finite value at pixel (" << bad % w << ", " << bad / w << ")";
        throw NumericError(msg.str());
    }
}

// Contraction guard: denominators 1 + Lambda D must strictly dominate the
// weighted row sums (equal to Lambda D), which only fails on non-finite or
// negative data.
void check_contraction(const RasterD& lambda_diag, const PixelGraph& g) {
    const int w = g.width, h = g.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double ld = lambda_diag.at(x, y) * g.degree.at(x, y);
            if (!(lambda_diag.at(x, y) >= 0.0) || !std::isfinite(ld) || !(1.0 + ld > ld))
                throw NumericError("solver: contraction precondition violated");
        }
}

}  // namespace

RasterD unrolled_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                                 const PixelGraph& graph, int inner_iters) {
    require_same_shape(x_prev_outer, lambda_diag, "unrolled_component_solve");
    require_same_shape(x_prev_outer, graph.degree, "unrolled_component_solve");
    check_finite(x_prev_outer, "unrolled_component_solve");
    check_contraction(lambda_diag, graph);

    const int w = graph.width, h = graph.height;
    RasterD x = x_prev_outer;
    RasterD ax(w, h);
    for (int p = 0; p < inner_iters; ++p) {
        graph.adjacency_apply(x, ax);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            for (int xx = 0; xx < w; ++xx) {
                double lam = lambda_diag.at(xx, y);
                x.at(xx, y) = (x_prev_outer.at(xx, y) + lam * ax.at(xx, y)) /
                              (1.0 + lam * graph.degree.at(xx, y));
            }
        }
        check_finite(x, "unrolled_component_solve");
    }
    return x;
}

namespace {

RasterD dense_direct_solve(const RasterD& b, const RasterD& lambda_diag, const PixelGraph& g) {
    const size_t n = b.size();
    std::vector<double> a = dense_laplacian(g);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < n; ++c) a[r * n + c] *= lambda_diag[r];
        a[r * n + r] += 1.0;
    }
    std::vector<double> x = lu_solve(std::move(a), std::vector<double>(b.data(), b.data() + n));
    RasterD out(b.width(), b.height());
    std::copy(x.begin(), x.end(), out.data());
    return out;
}

// Jacobi-preconditioned CG on (Lambda^-1 + L) x = Lambda^-1 b, restricted to
// pixels with Lambda > 0; pixels with Lambda == 0 are pinned to x = b
// exactly and their coupling moves to the right-hand side.
RasterD cg_direct_solve(const RasterD& b, const RasterD& lambda_diag, const PixelGraph& g,
                        double tol) {
    const int w = g.width, h = g.height;
    const size_t n = b.size();
    RasterD x(w, h, 0.0);
    MaskRaster pinned(w, h, 0);
    for (size_t i = 0; i < n; ++i)
        if (lambda_diag[i] == 0.0) {
            pinned[i] = 1;
            x[i] = b[i];
        }

    auto apply_spd = [&](const RasterD& in, RasterD& out) {
        g.laplacian_apply(in, out);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                size_t i = static_cast<size_t>(y) * w + xx;
                if (pinned[i]) {
                    out[i] = 0.0;
                } else {
                    out[i] += in[i] / lambda_diag[i];
                }
            }
    };

    // rhs = Lambda^-1 b + (coupling to pinned pixels).
    RasterD pinned_vals(w, h, 0.0);
    for (size_t i = 0; i < n; ++i)
        if (pinned[i]) pinned_vals[i] = b[i];
    RasterD coupling(w, h);
    g.adjacency_apply(pinned_vals, coupling);
    RasterD rhs(w, h, 0.0);
    for (size_t i = 0; i < n; ++i)
        if (!pinned[i]) rhs[i] = b[i] / lambda_diag[i] + coupling[i];

    const double b_norm = std::sqrt(det_sum_squares(b));
    if (b_norm == 0.0) return RasterD(w, h, 0.0);
    const double target = tol * b_norm;

    RasterD r(w, h, 0.0), z(w, h, 0.0), p(w, h, 0.0), ap(w, h, 0.0);
    // x starts at 0 on free pixels; r = rhs - A*0 adjusted for pinned coupling
    // already folded into rhs.
    r = rhs;
    auto precond = [&](const RasterD& rin, RasterD& zout) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                size_t i = static_cast<size_t>(y) * w + xx;
                zout[i] = pinned[i] ? 0.0 : rin[i] / (1.0 / lambda_diag[i] + g.degree[i]);
            }
    };
    auto orig_residual_norm = [&](const RasterD& rin) {
        // Original-system residual: r_orig = Lambda * r_spd on free pixels,
        // exactly zero on pinned pixels.
        double s = 0.0;
        std::vector<double> rows(h, 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int xx = 0; xx < w; ++xx) {
                size_t i = static_cast<size_t>(y) * w + xx;
                if (!pinned[i]) {
                    double ro = lambda_diag[i] * rin[i];
                    acc += ro * ro;
                }
            }
            rows[y] = acc;
        }
        for (int y = 0; y < h; ++y) s += rows[y];
        return std::sqrt(s);
    };

    precond(r, z);
    p = z;
    double rz = det_dot(r, z);
    const long long max_iters = 10LL * static_cast<long long>(n);
    long long it = 0;
    while (orig_residual_norm(r) > target) {
        if (++it > max_iters)
            throw NumericError("direct_component_solve: CG failed to converge (broken graph?)");
        apply_spd(p, ap);
        double p_ap = det_dot(p, ap);
        if (p_ap <= 0.0)
            throw NumericError("direct_component_solve: system lost positive definiteness");
        double alpha = rz / p_ap;
        for (size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        precond(r, z);
        double rz_new = det_dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    for (size_t i = 0; i < n; ++i)
        if (pinned[i]) x[i] = b[i];
    return x;
}

}  // namespace

RasterD direct_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                               const PixelGraph& graph, double tol, DirectMethod method) {
    require_same_shape(x_prev_outer, lambda_diag, "direct_component_solve");
    require_same_shape(x_prev_outer, graph.degree, "direct_component_solve");
    check_finite(x_prev_outer, "direct_component_solve");
    check_contraction(lambda_diag, graph);

    DirectMethod chosen = method;
    if (chosen == DirectMethod::Auto)
        chosen = x_prev_outer.size() <= 1024 ? DirectMethod::Dense : DirectMethod::CG;
    if (chosen == DirectMethod::Dense && x_prev_outer.size() > 4096)
        chosen = DirectMethod::CG;  // dense oracle is only offered up to 4096 pixels

    RasterD x = chosen == DirectMethod::Dense
                    ? dense_direct_solve(x_prev_outer, lambda_diag, graph)
                    : cg_direct_solve(x_prev_outer, lambda_diag, graph, tol);

    // Verify (I + Lambda L) x = b to the requested tolerance.
    RasterD lx(graph.width, graph.height);
    graph.laplacian_apply(x, lx);
    RasterD resid(graph.width, graph.height);
    for (size_t i = 0; i < x.size(); ++i)
        resid[i] = x_prev_outer[i] - (x[i] + lambda_diag[i] * lx[i]);
    double b_norm = std::sqrt(det_sum_squares(x_prev_outer));
    double r_norm = std::sqrt(det_sum_squares(resid));
    if (b_norm > 0.0 && r_norm > std::max(tol, 1e-9) * b_norm)
        throw NumericError("direct_component_solve: residual check failed");
    check_finite(x, "direct_component_solve");
    return x;
}

RawFrame map_denoise_frame(const RawFrame& noisy, const PixelGraph& graph_i,
                           const PixelGraph& graph_q, const SolverConfig& cfg, SolveMethod method,
                           DenoiseTrace* trace) {
    cfg.validate();
    if (graph_i.width != noisy.width || graph_i.height != noisy.height ||
        graph_q.width != noisy.width || graph_q.height != noisy.height)
        throw StructuralError("map_denoise_frame: graph dimensions do not match frame");

    SolverState state;
    state.x_i = noisy.i_raster;
    state.x_q = noisy.q_raster;
    state.refresh_amplitude();

    auto solve = [&](const RasterD& b, const RasterD& lam, const PixelGraph& g) {
        return method == SolveMethod::Unrolled
                   ? unrolled_component_solve(b, lam, g, cfg.inner_iters)
                   : direct_component_solve(b, lam, g, cfg.oracle_tol);
    };

    for (int r = 0; r < cfg.outer_iters; ++r) {
        state.outer_index = r + 1;
        // Both prior weights come from the iteration-start state.
        RasterD lam_i = prior_weight(state, Component::I, cfg);
        RasterD lam_q = prior_weight(state, Component::Q, cfg);
        RasterD next_i = solve(state.x_i, lam_i, graph_i);
        RasterD next_q = solve(state.x_q, lam_q, graph_q);
        if (trace) {
            trace->step_objective.push_back(objective_value(
                next_i, next_q, state.x_i, state.x_q, state.amplitude, graph_i, graph_q,
                cfg.lambda));
            trace->input_objective.push_back([&] {
                SolverState probe;
                probe.x_i = next_i;
                probe.x_q = next_q;
                probe.refresh_amplitude();
                return objective_value(next_i, next_q, noisy.i_raster, noisy.q_raster,
                                       probe.amplitude, graph_i, graph_q, cfg.lambda);
            }());
        }
        state.x_i = std::move(next_i);
        state.x_q = std::move(next_q);
        state.refresh_amplitude();
    }

    RawFrame out(noisy.width, noisy.height, noisy.freq_index);
    out.i_raster = state.x_i;
    out.q_raster = state.x_q;
    return out;
}

double objective_value(const RasterD& x_i, const RasterD& x_q, const RasterD& y_i,
                       const RasterD& y_q, const RasterD& x_a, const PixelGraph& graph_i,
                       const PixelGraph& graph_q, double lambda) {
    require_same_shape(x_i, x_q, "objective_value");
    require_same_shape(x_i, y_i, "objective_value");
    require_same_shape(x_i, y_q, "objective_value");
    require_same_shape(x_i, x_a, "objective_value");

    RasterD resid(x_i.width(), x_i.height());
    for (size_t i = 0; i < resid.size(); ++i) {
        double amp = std::max(std::abs(x_a[i]), 1e-12);
        resid[i] = (x_q[i] * y_i[i] - x_i[i] * y_q[i]) / amp;
    }
    double fidelity = 0.5 * det_sum_squares(resid);
    double prior = graph_i.quadratic_form(x_i) + graph_q.quadratic_form(x_q);
    return fidelity + lambda * prior;
}

}  // namespace tofgraph
