#include "tofgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tofgraph {

namespace {

template <typename Fn>
void for_each_joint_valid(const DepthFrame& pred, const DepthFrame& gt, Fn fn) {
    require_same_shape(pred.depth, gt.depth, "metrics");
    for (int y = 0; y < gt.height(); ++y)
        for (int x = 0; x < gt.width(); ++x)
            if (pred.valid.at(x, y) && gt.valid.at(x, y)) fn(pred.depth.at(x, y), gt.depth.at(x, y));
}

// Bilinear read that requires all four taps valid; returns false otherwise.
bool sample_bilinear(const DepthFrame& f, double x, double y, double& out) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    if (x0 < 0 || y0 < 0 || x0 + 1 > f.width() - 1 || y0 + 1 > f.height() - 1) {
        // Allow exact hits on the last row/column.
        if (x < 0.0 || y < 0.0 || x > f.width() - 1.0 || y > f.height() - 1.0) return false;
        x0 = std::min(x0, f.width() - 2);
        y0 = std::min(y0, f.height() - 2);
    }
    double fx = x - x0, fy = y - y0;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            if (!f.valid.at(x0 + dx, y0 + dy)) return false;
    double v00 = f.depth.at(x0, y0), v10 = f.depth.at(x0 + 1, y0);
    double v01 = f.depth.at(x0, y0 + 1), v11 = f.depth.at(x0 + 1, y0 + 1);
    out = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
    return true;
}

}  // namespace

double mae(const DepthFrame& pred, const DepthFrame& gt) {
    double sum = 0.0;
    uint64_t count = 0;
    for_each_joint_valid(pred, gt, [&](double p, double g) {
        sum += std::abs(p - g);
        ++count;
    });
    if (count == 0) throw DomainError("mae: no jointly valid pixels");
    return sum / static_cast<double>(count);
}

double absrel(const DepthFrame& pred, const DepthFrame& gt) {
    double sum = 0.0;
    uint64_t count = 0;
    for_each_joint_valid(pred, gt, [&](double p, double g) {
        if (!(g > 0.0)) throw DomainError("absrel: gt must be > 0 on valid pixels");
        sum += std::abs(p - g) / g;
        ++count;
    });
    if (count == 0) throw DomainError("absrel: no jointly valid pixels");
    return sum / static_cast<double>(count);
}

double delta1(const DepthFrame& pred, const DepthFrame& gt) {
    uint64_t hits = 0, count = 0;
    for_each_joint_valid(pred, gt, [&](double p, double g) {
        if (!(g > 0.0)) throw DomainError("delta1: gt must be > 0 on valid pixels");
        double ratio = std::max(p / g, g / p);
        if (ratio < 1.25) ++hits;
        ++count;
    });
    if (count == 0) throw DomainError("delta1: no jointly valid pixels");
    return static_cast<double>(hits) / static_cast<double>(count);
}

double tepe(const std::vector<DepthFrame>& pred, const std::vector<DepthFrame>& gt,
            const std::vector<Correspondence>& corr) {
    if (pred.size() != gt.size() || pred.size() < 2)
        throw StructuralError("tepe: need aligned sequences of length >= 2");
    if (corr.size() != pred.size() - 1)
        throw StructuralError("tepe: need one correspondence per consecutive frame pair");

    double sum = 0.0;
    uint64_t count = 0;
    for (size_t t = 1; t < pred.size(); ++t) {
        const Correspondence& c = corr[t - 1];
        const DepthFrame& p_cur = pred[t];
        const DepthFrame& p_prev = pred[t - 1];
        const DepthFrame& g_cur = gt[t];
        const DepthFrame& g_prev = gt[t - 1];
        require_same_shape(p_cur.depth, c.prev_x, "tepe");
        for (int y = 0; y < p_cur.height(); ++y) {
            for (int x = 0; x < p_cur.width(); ++x) {
                if (!c.valid.at(x, y) || c.occluded.at(x, y)) continue;
                if (!p_cur.valid.at(x, y) || !g_cur.valid.at(x, y)) continue;
                double px = c.prev_x.at(x, y), py = c.prev_y.at(x, y);
                double p_warp, g_warp;
                if (!sample_bilinear(p_prev, px, py, p_warp)) continue;
                if (!sample_bilinear(g_prev, px, py, g_warp)) continue;
                double d_pred = p_cur.depth.at(x, y) - p_warp;
                double d_gt = g_cur.depth.at(x, y) - g_warp;
                sum += std::abs(d_pred - d_gt);
                ++count;
            }
        }
    }
    if (count == 0) throw DomainError("tepe: no usable pixel pairs");
    return sum / static_cast<double>(count);
}

RasterD xt_slice(const std::vector<DepthFrame>& seq, int row) {
    if (seq.empty()) throw StructuralError("xt_slice: empty sequence");
    const int w = seq[0].width();
    if (row < 0 || row >= seq[0].height()) throw DomainError("xt_slice: row out of bounds");
    RasterD slice(w, static_cast<int>(seq.size()));
    for (size_t t = 0; t < seq.size(); ++t)
        for (int x = 0; x < w; ++x) slice.at(x, static_cast<int>(t)) = seq[t].depth.at(x, row);
    return slice;
}

EvalReport evaluate_sequence(const std::vector<DepthFrame>& pred,
                             const std::vector<DepthFrame>& gt,
                             const std::vector<Correspondence>* corr) {
    if (pred.size() != gt.size() || pred.empty())
        throw StructuralError("evaluate_sequence: sequence lengths differ");
    EvalReport rep;
    for (size_t t = 0; t < pred.size(); ++t) {
        rep.frame_mae.push_back(mae(pred[t], gt[t]));
        rep.frame_absrel.push_back(absrel(pred[t], gt[t]));
        rep.frame_delta1.push_back(delta1(pred[t], gt[t]));
        uint64_t count = 0;
        for (int y = 0; y < gt[t].height(); ++y)
            for (int x = 0; x < gt[t].width(); ++x)
                if (pred[t].valid.at(x, y) && gt[t].valid.at(x, y)) ++count;
        rep.frame_valid_pixels.push_back(count);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    rep.mean_mae = mean(rep.frame_mae);
    rep.mean_absrel = mean(rep.frame_absrel);
    rep.mean_delta1 = mean(rep.frame_delta1);
    if (corr != nullptr && pred.size() >= 2) {
        rep.sequence_tepe = tepe(pred, gt, *corr);
        for (size_t t = 1; t < pred.size(); ++t) {
            std::vector<DepthFrame> p{pred[t - 1], pred[t]};
            std::vector<DepthFrame> g{gt[t - 1], gt[t]};
            std::vector<Correspondence> c{(*corr)[t - 1]};
            rep.pair_tepe.push_back(tepe(p, g, c));
        }
        rep.has_tepe = true;
    } else {
        rep.sequence_tepe = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

}  // namespace tofgraph
