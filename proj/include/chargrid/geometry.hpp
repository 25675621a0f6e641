#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chargrid {

/// Axis-aligned rectangle stored as center + size, in output-grid pixels.
///
/// x grows with the column index, y with the row index. Pixel (i, j) covers
/// [j, j+1) x [i, i+1) and samples at (j + 0.5, i + 0.5).
class Rect {
public:
    Rect(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
        if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h) ||
            !std::isfinite(cx) || !std::isfinite(cy)) {
            throw std::invalid_argument("Rect: degenerate or non-finite rect (cx=" +
                                        std::to_string(cx) + ", cy=" + std::to_string(cy) +
                                        ", w=" + std::to_string(w) + ", h=" + std::to_string(h) +
                                        ")");
        }
    }

    static Rect from_corners(double left, double top, double right, double bottom) {
        return Rect(0.5 * (left + right), 0.5 * (top + bottom), right - left, bottom - top);
    }

    double cx() const { return cx_; }
    double cy() const { return cy_; }
    double w() const { return w_; }
    double h() const { return h_; }

    double left() const { return cx_ - 0.5 * w_; }
    double right() const { return cx_ + 0.5 * w_; }
    double top() const { return cy_ - 0.5 * h_; }
    double bottom() const { return cy_ + 0.5 * h_; }
    double area() const { return w_ * h_; }

    /// Half-open containment test: [left, right) x [top, bottom).
    bool contains_point(double x, double y) const {
        return x >= left() && x < right() && y >= top() && y < bottom();
    }

    bool contains(const Rect& o) const {
        return o.left() >= left() && o.right() <= right() && o.top() >= top() &&
               o.bottom() <= bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;

private:
    double cx_, cy_, w_, h_;
};

inline double intersection_area(const Rect& a, const Rect& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

inline double iou(const Rect& a, const Rect& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

/// Intersection area over the area of the smaller rect.
inline double overlap_fraction_of_smaller(const Rect& a, const Rect& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return std::min(1.0, inter / std::min(a.area(), b.area()));
}

inline Rect bounding_box(const Rect& a, const Rect& b) {
    return Rect::from_corners(std::min(a.left(), b.left()), std::min(a.top(), b.top()),
                              std::max(a.right(), b.right()), std::max(a.bottom(), b.bottom()));
}

/// Transposes x and y (the 90 degree page rotation used by the generator).
inline Rect transposed(const Rect& r) { return Rect(r.cy(), r.cx(), r.h(), r.w()); }

}  // namespace chargrid
