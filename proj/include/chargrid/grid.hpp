#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace chargrid {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense row-major 2-D array.
template <class T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    explicit Grid(Shape shape, T fill = T{}) : shape_(shape), values_(shape.size(), fill) {}
    Grid(Shape shape, std::vector<T> values) : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw std::invalid_argument("Grid: value count does not match rows * cols");
        }
    }

    Shape shape() const { return shape_; }
    std::size_t rows() const { return shape_.rows; }
    std::size_t cols() const { return shape_.cols; }
    std::size_t size() const { return values_.size(); }

    T& operator()(std::size_t i, std::size_t j) { return values_[i * shape_.cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return values_[i * shape_.cols + j]; }

    T& at(std::size_t i, std::size_t j) {
        if (i >= shape_.rows || j >= shape_.cols) throw std::out_of_range("Grid::at");
        return (*this)(i, j);
    }
    const T& at(std::size_t i, std::size_t j) const {
        if (i >= shape_.rows || j >= shape_.cols) throw std::out_of_range("Grid::at");
        return (*this)(i, j);
    }

    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Shape shape_{};
    std::vector<T> values_;
};

using ClassGrid = Grid<std::uint16_t>;
using RealGrid = Grid<double>;

}  // namespace chargrid
