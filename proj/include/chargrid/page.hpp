#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chargrid/charset.hpp"
#include "chargrid/geometry.hpp"
#include "chargrid/grid.hpp"

namespace chargrid {

struct WordAnnotation {
    std::string text;
    Rect rect;

    WordAnnotation(std::string t, Rect r) : text(std::move(t)), rect(r) {
        if (text.empty()) throw std::invalid_argument("WordAnnotation: empty text");
    }
    friend bool operator==(const WordAnnotation&, const WordAnnotation&) = default;
};

struct CharAnnotation {
    ClassIndex symbol_index;
    Rect rect;
    std::size_t word_id;

    friend bool operator==(const CharAnnotation&, const CharAnnotation&) = default;
};

/// Annotation-level document: words plus the character boxes derived from them.
class GroundTruthPage {
public:
    GroundTruthPage(Shape shape, std::vector<WordAnnotation> words, std::vector<CharAnnotation> chars)
        : shape_(shape), words_(std::move(words)), chars_(std::move(chars)) {
        constexpr double eps = 1e-9;
        for (const auto& c : chars_) {
            if (c.word_id >= words_.size()) {
                throw std::invalid_argument("GroundTruthPage: char references missing word " +
                                            std::to_string(c.word_id));
            }
            if (c.symbol_index == kBackground) {
                throw std::invalid_argument("GroundTruthPage: char with background class");
            }
            const Rect& r = c.rect;
            if (r.left() < -eps || r.top() < -eps || r.right() > double(shape_.cols) + eps ||
                r.bottom() > double(shape_.rows) + eps) {
                throw std::invalid_argument("GroundTruthPage: char box outside page bounds");
            }
        }
    }

    Shape shape() const { return shape_; }
    const std::vector<WordAnnotation>& words() const { return words_; }
    const std::vector<CharAnnotation>& chars() const { return chars_; }

    friend bool operator==(const GroundTruthPage&, const GroundTruthPage&) = default;

private:
    Shape shape_;
    std::vector<WordAnnotation> words_;
    std::vector<CharAnnotation> chars_;
};

}  // namespace chargrid
