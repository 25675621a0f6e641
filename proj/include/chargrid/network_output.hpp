#pragma once

#include <array>
#include <stdexcept>
#include <string_view>

#include "chargrid/grid.hpp"

namespace chargrid {

/// The eight per-pixel maps a chargrid model predicts.
///
///   chars     S    character class per pixel, 0 = background
///   box_mask  B_c  probability that a character box covers the pixel
///   box_dx/dy X_c, Y_c  offset from the pixel sample point to the box center
///   box_logw/logh  W_c, H_c  natural log of box width / height
///   word_dx/dy X_w, Y_w  sign-log offset to the word center
struct NetworkOutput {
    ClassGrid chars;
    RealGrid box_mask;
    RealGrid box_dx;
    RealGrid box_dy;
    RealGrid box_logw;
    RealGrid box_logh;
    RealGrid word_dx;
    RealGrid word_dy;

    NetworkOutput() = default;

    explicit NetworkOutput(Shape shape)
        : chars(shape), box_mask(shape), box_dx(shape), box_dy(shape), box_logw(shape),
          box_logh(shape), word_dx(shape), word_dy(shape) {}

    Shape shape() const { return chars.shape(); }

    void validate() const {
        const Shape s = shape();
        for (const RealGrid* g : real_grids()) {
            if (g->shape() != s) throw std::invalid_argument("NetworkOutput: grid shapes differ");
        }
    }

    std::array<const RealGrid*, 7> real_grids() const {
        return {&box_mask, &box_dx, &box_dy, &box_logw, &box_logh, &word_dx, &word_dy};
    }
    std::array<RealGrid*, 7> real_grids() {
        return {&box_mask, &box_dx, &box_dy, &box_logw, &box_logh, &word_dx, &word_dy};
    }

    /// File-name tags of the real grids, in real_grids() order.
    static constexpr std::array<std::string_view, 7> real_grid_tags{"Bc", "Xc", "Yc", "Wc",
                                                                    "Hc", "Xw", "Yw"};
    static constexpr std::string_view chars_tag = "S";
};

}  // namespace chargrid
