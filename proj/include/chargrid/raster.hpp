#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

#include "chargrid/geometry.hpp"
#include "chargrid/grid.hpp"

namespace chargrid {

/// Half-open block of pixel indices [row_begin, row_end) x [col_begin, col_end).
struct PixelBlock {
    std::size_t row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;

    bool empty() const { return row_begin >= row_end || col_begin >= col_end; }
    std::size_t count() const { return empty() ? 0 : (row_end - row_begin) * (col_end - col_begin); }
};

namespace detail {

// First index k in [0, n] with k + 0.5 >= lo, and first with k + 0.5 >= hi.
inline std::pair<std::size_t, std::size_t> sampled_range(double lo, double hi, std::size_t n) {
    const double limit = static_cast<double>(n);
    const double b = std::clamp(std::ceil(lo - 0.5), 0.0, limit);
    const double e = std::clamp(std::ceil(hi - 0.5), 0.0, limit);
    return {static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
}

}  // namespace detail

/// Pixels of a grid whose sample points lie inside the rect.
inline PixelBlock sampled_pixels(const Rect& r, Shape shape) {
    const auto [rb, re] = detail::sampled_range(r.top(), r.bottom(), shape.rows);
    const auto [cb, ce] = detail::sampled_range(r.left(), r.right(), shape.cols);
    return {rb, re, cb, ce};
}

/// Pixel whose unit square contains the point, if it is inside the grid.
inline std::optional<std::pair<std::size_t, std::size_t>> pixel_at(double x, double y, Shape shape) {
    if (!(x >= 0.0) || !(y >= 0.0)) return std::nullopt;
    const double j = std::floor(x);
    const double i = std::floor(y);
    if (i >= static_cast<double>(shape.rows) || j >= static_cast<double>(shape.cols)) return std::nullopt;
    return std::pair{static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
}

inline double sample_x(std::size_t j) { return static_cast<double>(j) + 0.5; }
inline double sample_y(std::size_t i) { return static_cast<double>(i) + 0.5; }

}  // namespace chargrid
