#pragma once

#include "tofgraph/core.hpp"
#include "tofgraph/graph_core.hpp"
#include "tofgraph/tof_imaging.hpp"

// MAP denoiser: per-pixel prior weighting from the noise model, alternating
// I/Q optimization, the per-component linear system (I + Lambda L) x = b and
// its unrolled fixed-point iteration, plus a direct-solve oracle.

namespace tofgraph {

struct SolverConfig {
    double lambda = 1.0;      // prior weight (sigma / sigma_L)^2
    int outer_iters = 2;      // R
    int inner_iters = 3;      // P
    double oracle_tol = 1e-10;  // relative residual for the direct solve
    // Lower clamp on |x_i|, |x_q| in the prior weight. <= 0 selects
    // q_clamp_scale * mean amplitude per frame.
    double q_clamp = 0.0;
    double q_clamp_scale = 1e-3;

    void validate() const {
        if (!(lambda > 0.0)) throw DomainError("SolverConfig: lambda must be > 0");
        if (outer_iters < 1 || inner_iters < 1)
            throw DomainError("SolverConfig: iteration counts must be >= 1");
        if (!(q_clamp > 0.0) && !(q_clamp_scale > 0.0))
            throw DomainError("SolverConfig: clamp must resolve to > 0");
    }
    double resolve_clamp(double mean_amplitude) const {
        double c = q_clamp > 0.0 ? q_clamp : q_clamp_scale * mean_amplitude;
        return c > 0.0 ? c : 1e-12;
    }
};

enum class Component { I, Q };
enum class SolveMethod { Unrolled, Direct };
enum class DirectMethod { Auto, Dense, CG };

struct SolverState {
    RasterD x_i;
    RasterD x_q;
    RasterD amplitude;  // sqrt(x_i^2 + x_q^2), refreshed once per outer step
    int outer_index = 0;

    void refresh_amplitude();
};

// Lambda = 2 lambda (amplitude / max(|other component|, eps))^2, where the
// other component is q when solving for i and vice versa.
RasterD prior_weight(const SolverState& state, Component comp, const SolverConfig& cfg);

// P iterations of x_{p+1}(m) = (b(m) + Lambda(m) sum_n w(m,n) x_p(n)) /
// (1 + Lambda(m) D(m)) starting from x_0 = b = x_prev_outer. Throws
// NumericError naming the first offending pixel on a non-finite intermediate.
RasterD unrolled_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                                 const PixelGraph& graph, int inner_iters);

// Solves (I + Lambda L) x = x_prev_outer exactly: dense LU up to 4096 pixels,
// otherwise Jacobi-preconditioned CG on the SPD rescaled system
// (Lambda^-1 + L). Verifies the relative residual against tol.
RasterD direct_component_solve(const RasterD& x_prev_outer, const RasterD& lambda_diag,
                               const PixelGraph& graph, double tol,
                               DirectMethod method = DirectMethod::Auto);

// Objective trace of one frame denoise, one entry per outer iteration.
struct DenoiseTrace {
    // Objective of the exact subproblem each outer step minimizes (previous
    // iterate as anchor); provably non-increasing in direct mode.
    std::vector<double> step_objective;
    // Objective against the original noisy input, amplitude from the current
    // state. Diagnostic only.
    std::vector<double> input_objective;
};

// Alternating scheme: per outer iteration, refresh the amplitude and both
// prior weights from the iteration-start state, then solve each component's
// linear system with the previous iterate as input.
RawFrame map_denoise_frame(const RawFrame& noisy, const PixelGraph& graph_i,
                           const PixelGraph& graph_q, const SolverConfig& cfg, SolveMethod method,
                           DenoiseTrace* trace = nullptr);

// (1/2) |X_a^-1 (x_q . y_i - x_i . y_q)|^2 + lambda (x_i' L_i x_i + x_q' L_q x_q),
// the MAP objective with sigma = 1 folded into lambda.
double objective_value(const RasterD& x_i, const RasterD& x_q, const RasterD& y_i,
                       const RasterD& y_q, const RasterD& x_a, const PixelGraph& graph_i,
                       const PixelGraph& graph_q, double lambda);

}  // namespace tofgraph
