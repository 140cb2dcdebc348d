#pragma once

#include <array>
#include <iosfwd>

#include "tofgraph/core.hpp"
#include "tofgraph/tof_imaging.hpp"

// Intra-frame, inter-frame, mapped and fused pixel graphs with
// feature-kernel and attention-style edge weights plus mapping confidence.

namespace tofgraph {

// Fixed scan order of the 8-neighborhood, used everywhere a neighbor sum is
// taken so results are independent of thread count.
inline constexpr int kNeighborDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
inline constexpr int kNeighborDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

// Sparse non-negative symmetric adjacency on the 8-neighborhood grid.
// Symmetry is structural: each undirected edge is stored once, on the plane
// of its canonical direction (E, S, SE, SW) at the base pixel.
struct PixelGraph {
    int width = 0;
    int height = 0;
    std::array<RasterD, 4> w;  // E(+1,0), S(0,+1), SE(+1,+1), SW(-1,+1)
    RasterD degree;

    PixelGraph() = default;
    PixelGraph(int w_, int h_)
        : width(w_), height(h_),
          w{RasterD(w_, h_, 0.0), RasterD(w_, h_, 0.0), RasterD(w_, h_, 0.0),
            RasterD(w_, h_, 0.0)},
          degree(w_, h_, 0.0) {}

    // Weight of the edge from (x, y) to its k-th neighbor in scan order;
    // zero when the neighbor is out of bounds.
    double neighbor_weight(int x, int y, int k) const;
    // Mutable access to the canonical slot owning edge ((x,y),(x+dx,y+dy));
    // returns nullptr when out of bounds. dx, dy in {-1, 0, 1}.
    double* edge_slot(int x, int y, int dx, int dy);
    double edge_weight(int x, int y, int dx, int dy) const;

    // degree(m) = sum_n w(m, n), accumulated in scan order.
    void recompute_degrees();
    // out(m) = sum_n w(m, n) x(n)
    void adjacency_apply(const RasterD& x, RasterD& out) const;
    // out(m) = degree(m) x(m) - sum_n w(m, n) x(n)
    void laplacian_apply(const RasterD& x, RasterD& out) const;
    // x' L x through the operator form.
    double quadratic_form(const RasterD& x) const;
};

// Mapping weights from each current-frame pixel to a q x q previous-frame
// neighborhood centered at the same coordinate, plus the per-pixel mapping
// confidence diagonal.
struct InterFrameGraph {
    int width = 0;
    int height = 0;
    int q = 7;  // odd
    std::vector<double> weights;  // [pixel][ (dy+q/2)*q + (dx+q/2) ]
    RasterD phi;

    InterFrameGraph() = default;
    InterFrameGraph(int w, int h, int q_)
        : width(w), height(h), q(q_),
          weights(static_cast<size_t>(w) * h * q_ * q_, 0.0), phi(w, h, 1.0) {}

    double* row(int x, int y) {
        return weights.data() + (static_cast<size_t>(y) * width + x) * q * q;
    }
    const double* row(int x, int y) const {
        return weights.data() + (static_cast<size_t>(y) * width + x) * q * q;
    }
};

// Per-pixel unit-norm feature vectors.
struct FeatureField {
    int width = 0;
    int height = 0;
    int dim = 0;
    std::vector<double> values;  // [pixel][channel]

    FeatureField() = default;
    FeatureField(int w, int h, int c)
        : width(w), height(h), dim(c), values(static_cast<size_t>(w) * h * c, 0.0) {}

    double* at(int x, int y) { return values.data() + (static_cast<size_t>(y) * width + x) * dim; }
    const double* at(int x, int y) const {
        return values.data() + (static_cast<size_t>(y) * width + x) * dim;
    }
};

// Query/key matrices for the attention-style inter-frame scores, row-major
// dim x dim. Defaults to identity.
struct AttentionParams {
    int dim = 0;
    std::vector<double> Q;
    std::vector<double> K;

    static AttentionParams identity(int dim);
};

// Geometric features: window patches of horizontal/vertical depth gradients
// and of amplitude, each patch mean-removed, concatenated and normalized to
// unit length (zero vectors stay zero). Depending only on differences makes
// the features invariant to a constant depth offset. C = 3 * window^2.
FeatureField compute_features(const DepthFrame& frame, int window = 3);
// Same, from raw data through the depth/amplitude reconstruction.
FeatureField compute_features(const RawFrame& raw, const SensorModel& model, int window = 3);

// w(m, n) = exp(-|F(m) - F(n)|^2 / (2 sigma_f^2)) on the 8-neighborhood.
PixelGraph intra_graph(const FeatureField& feat, double sigma_f);

// Softmax over the q x q neighborhood of scores (Q F_t(m))' (K F_prev(k));
// out-of-bounds neighbors are excluded before the softmax and stored as 0.
InterFrameGraph inter_graph(const FeatureField& feat_t, const FeatureField& feat_prev,
                            const AttentionParams& params, int q);

// phi(m) = exp(-min_k |F_t(m) - F_prev(k)|^2 / (2 sigma_c^2)) over the q x q
// in-bounds neighborhood.
RasterD mapping_confidence(const FeatureField& feat_t, const FeatureField& feat_prev,
                           const InterFrameGraph& inter, double sigma_c);

// Transports the previous intra-frame graph across the inter-frame graph:
// W_hat(m,n) = sum_{k,l} w_inter(m,k) (W_prev + I)(k,l) w_inter(n,l),
// evaluated on the current frame's 8-neighborhood support, diagonal
// discarded.
PixelGraph map_graph(const PixelGraph& prev, const InterFrameGraph& inter);

// w_fused(m,n) = (phi(m) + phi(n))/2 * w_mapped(m,n) + w_cur(m,n); degrees
// recomputed.
PixelGraph fuse_graphs(const PixelGraph& mapped, const PixelGraph& cur, const RasterD& phi);

// Dense N x N adjacency (test and oracle support, tiny sizes only).
std::vector<double> dense_adjacency(const PixelGraph& g);
std::vector<double> dense_laplacian(const PixelGraph& g);

// Debug dump: one "m,n,weight" line per undirected edge, linear pixel
// indices, canonical direction order.
void dump_graph_csv(const PixelGraph& g, std::ostream& out);

// Throws if symmetry-by-construction invariants are violated: negative or
// non-finite weights, or degrees inconsistent with weights.
void validate_graph(const PixelGraph& g);

}  // namespace tofgraph
