#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "chargrid/geometry.hpp"

namespace chargrid {

/// Uniform bucket grid over a fixed set of rects. Reports every inserted rect
/// that may have a positive-area intersection with a query rect; rects that
/// share interior area always share at least one bucket.
class SpatialIndex {
public:
    /// `cell_size` <= 0 picks the median of the rects' larger side.
    explicit SpatialIndex(std::span<const Rect> rects, double cell_size = 0.0)
        : rects_(rects), stamp_(rects.size(), 0) {
        if (rects.empty()) return;
        double l = rects[0].left(), t = rects[0].top(), r = rects[0].right(), b = rects[0].bottom();
        for (const Rect& x : rects) {
            l = std::min(l, x.left());
            t = std::min(t, x.top());
            r = std::max(r, x.right());
            b = std::max(b, x.bottom());
        }
        if (!(cell_size > 0.0)) {
            std::vector<double> sides;
            sides.reserve(rects.size());
            for (const Rect& x : rects) sides.push_back(std::max(x.w(), x.h()));
            auto mid = sides.begin() + static_cast<std::ptrdiff_t>(sides.size() / 2);
            std::nth_element(sides.begin(), mid, sides.end());
            cell_size = *mid;
        }
        // Keep the bucket count linear in the number of rects.
        const double max_cells = 4.0 * static_cast<double>(rects.size()) + 16.0;
        while (std::ceil((r - l) / cell_size + 1.0) * std::ceil((b - t) / cell_size + 1.0) > max_cells) {
            cell_size *= 2.0;
        }
        cell_ = cell_size;
        x0_ = l;
        y0_ = t;
        nx_ = static_cast<std::size_t>(std::floor((r - l) / cell_)) + 1;
        ny_ = static_cast<std::size_t>(std::floor((b - t) / cell_)) + 1;
        buckets_.resize(nx_ * ny_);
    }

    void insert(std::uint32_t id) {
        const Range g = range_of(rects_[id]);
        if (g.cells() > kMaxCellsPerRect) {
            oversize_.push_back(id);
            return;
        }
        for (std::size_t y = g.y0; y <= g.y1; ++y) {
            for (std::size_t x = g.x0; x <= g.x1; ++x) buckets_[y * nx_ + x].push_back(id);
        }
    }

    /// Calls f(id) once for each inserted rect sharing a bucket with `query`.
    template <class F>
    void for_each_candidate(const Rect& query, F&& f) {
        if (buckets_.empty()) return;
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
        auto visit = [&](std::uint32_t id) {
            if (stamp_[id] == epoch_) return;
            stamp_[id] = epoch_;
            f(id);
        };
        for (std::uint32_t id : oversize_) visit(id);
        const Range g = range_of(query);
        for (std::size_t y = g.y0; y <= g.y1; ++y) {
            for (std::size_t x = g.x0; x <= g.x1; ++x) {
                for (std::uint32_t id : buckets_[y * nx_ + x]) visit(id);
            }
        }
    }

private:
    static constexpr std::size_t kMaxCellsPerRect = 64;

    struct Range {
        std::size_t x0, x1, y0, y1;
        std::size_t cells() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
    };

    std::size_t cell_index(double v, double origin, std::size_t n) const {
        const double c = std::floor((v - origin) / cell_);
        return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n - 1)));
    }

    Range range_of(const Rect& r) const {
        return {cell_index(r.left(), x0_, nx_), cell_index(r.right(), x0_, nx_),
                cell_index(r.top(), y0_, ny_), cell_index(r.bottom(), y0_, ny_)};
    }

    std::span<const Rect> rects_;
    double cell_ = 1.0, x0_ = 0.0, y0_ = 0.0;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::uint32_t>> buckets_;
    std::vector<std::uint32_t> oversize_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

}  // namespace chargrid
