#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "chargrid/charset.hpp"
#include "chargrid/geometry.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/raster.hpp"
#include "chargrid/spatial_index.hpp"

namespace chargrid {

struct PixelIndex {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

/// A box hypothesis emitted by one pixel of the box mask.
struct CandidateBox {
    PixelIndex source;
    Rect rect;
    double score;
};

struct CharBox {
    Rect rect;
    double score = 0.0;
    ClassIndex symbol_index = kBackground;  // 0 until labeled
    PixelIndex source{};
};

struct ExtractStats {
    std::size_t dropped_nonfinite = 0;
};

/// One candidate per pixel with box_mask >= tau, in row-major order.
inline std::vector<CandidateBox> extract_candidates(const NetworkOutput& out, double tau,
                                                    ExtractStats* stats = nullptr) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("extract_candidates: tau must be in (0,1)");
    out.validate();
    std::vector<CandidateBox> cands;
    const Shape shape = out.shape();
    for (std::size_t i = 0; i < shape.rows; ++i) {
        for (std::size_t j = 0; j < shape.cols; ++j) {
            const double score = out.box_mask(i, j);
            if (!(score >= tau)) continue;
            const double cx = sample_x(j) + out.box_dx(i, j);
            const double cy = sample_y(i) + out.box_dy(i, j);
            const double w = std::exp(out.box_logw(i, j));
            const double h = std::exp(out.box_logh(i, j));
            if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h) ||
                !(w > 0.0) || !(h > 0.0)) {
                if (stats) ++stats->dropped_nonfinite;
                continue;
            }
            cands.push_back({{i, j}, Rect(cx, cy, w, h), score});
        }
    }
    return cands;
}

/// Keeps only candidates lying on directed cycles of the "points at my
/// predicted center" graph (its 1-core). Every vertex has out-degree <= 1, so
/// repeatedly peeling in-degree-0 vertices leaves exactly the cycles.
/// Input order is preserved.
inline std::vector<CandidateBox> graphcore_filter(std::span<const CandidateBox> cands, Shape shape) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = cands.size();
    if (n >= kNone) throw std::invalid_argument("graphcore_filter: too many candidates");

    std::vector<std::uint32_t> at_pixel(shape.size(), kNone);
    for (std::size_t v = 0; v < n; ++v) {
        const PixelIndex p = cands[v].source;
        if (p.row >= shape.rows || p.col >= shape.cols) {
            throw std::invalid_argument("graphcore_filter: candidate outside grid");
        }
        auto& slot = at_pixel[p.row * shape.cols + p.col];
        if (slot != kNone) throw std::invalid_argument("graphcore_filter: duplicate source pixel");
        slot = static_cast<std::uint32_t>(v);
    }

    std::vector<std::uint32_t> next(n, kNone);
    std::vector<std::uint32_t> in_degree(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto px = pixel_at(cands[v].rect.cx(), cands[v].rect.cy(), shape);
        if (!px) continue;
        const std::uint32_t target = at_pixel[px->first * shape.cols + px->second];
        if (target == kNone) continue;
        next[v] = target;
        ++in_degree[target];
    }

    std::vector<std::uint32_t> stack;
    std::vector<bool> removed(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        if (in_degree[v] == 0) stack.push_back(static_cast<std::uint32_t>(v));
    }
    while (!stack.empty()) {
        const std::uint32_t v = stack.back();
        stack.pop_back();
        removed[v] = true;
        const std::uint32_t t = next[v];
        if (t != kNone && --in_degree[t] == 0) stack.push_back(t);
    }

    std::vector<CandidateBox> kept;
    for (std::size_t v = 0; v < n; ++v) {
        if (!removed[v]) kept.push_back(cands[v]);
    }
    return kept;
}

namespace detail {

inline std::vector<std::uint32_t> nms_order(std::span<const CandidateBox> cands) {
    std::vector<std::uint32_t> order(cands.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<std::uint32_t>(k);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (cands[a].score != cands[b].score) return cands[a].score > cands[b].score;
        return cands[a].source < cands[b].source;
    });
    return order;
}

inline CharBox to_char_box(const CandidateBox& c) { return {c.rect, c.score, kBackground, c.source}; }

inline void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("nms: theta must be in (0,1)");
}

}  // namespace detail

/// Greedy class-agnostic NMS. Boxes are visited by descending score (ties in
/// row-major source order); a box is dropped if its IoU with any kept box
/// exceeds theta. Kept boxes are looked up through a bucket grid.
inline std::vector<CharBox> nms(std::span<const CandidateBox> cands, double theta) {
    detail::check_theta(theta);
    std::vector<Rect> rects;
    rects.reserve(cands.size());
    for (const auto& c : cands) rects.push_back(c.rect);
    SpatialIndex index(rects);

    std::vector<CharBox> kept;
    for (const std::uint32_t k : detail::nms_order(cands)) {
        bool suppressed = false;
        index.for_each_candidate(rects[k], [&](std::uint32_t other) {
            if (!suppressed && iou(rects[k], rects[other]) > theta) suppressed = true;
        });
        if (suppressed) continue;
        index.insert(k);
        kept.push_back(detail::to_char_box(cands[k]));
    }
    return kept;
}

/// Same contract as nms() by plain pairwise comparison against every kept box.
inline std::vector<CharBox> nms_bruteforce(std::span<const CandidateBox> cands, double theta) {
    detail::check_theta(theta);
    std::vector<CharBox> kept;
    for (const std::uint32_t k : detail::nms_order(cands)) {
        const Rect& r = cands[k].rect;
        bool suppressed = false;
        for (const CharBox& b : kept) {
            if (iou(r, b.rect) > theta) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(detail::to_char_box(cands[k]));
    }
    return kept;
}

}  // namespace chargrid
