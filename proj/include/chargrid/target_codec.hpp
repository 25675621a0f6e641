#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "chargrid/charset.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/page.hpp"
#include "chargrid/raster.hpp"

namespace chargrid {

/// Sign-log compression of a word-center offset: sign(d) * log(|d| + 1).
inline double encode_word_offset(double delta) {
    return std::copysign(std::log1p(std::fabs(delta)), delta);
}

/// Inverse of encode_word_offset: sign(v) * (exp(|v|) - 1).
inline double decode_word_offset(double v) {
    return std::copysign(std::expm1(std::fabs(v)), v);
}

/// Relative advance width per class index. Defaults to 1 for every symbol.
class WidthTable {
public:
    explicit WidthTable(const Charset& charset) : widths_(charset.size() + 1, 1.0) {}

    void set(const Charset& charset, std::string_view symbol, double width) {
        if (!(width > 0.0) || !std::isfinite(width)) {
            throw std::invalid_argument("WidthTable: width must be positive");
        }
        const ClassIndex idx = charset.index_of(symbol);
        if (idx == charset.unknown_index() && symbol != charset.unknown_glyph()) {
            throw std::invalid_argument("WidthTable: symbol not in charset");
        }
        widths_.at(idx) = width;
    }

    double width(ClassIndex index) const { return widths_.at(index); }

private:
    std::vector<double> widths_;
};

/// Splits a word box horizontally into per-character boxes whose widths are
/// proportional to the symbols' relative widths. The boxes abut and exactly
/// cover the word box.
inline std::vector<CharAnnotation> approximate_char_boxes(const WordAnnotation& word,
                                                          const WidthTable& widths,
                                                          const Charset& charset,
                                                          std::size_t word_id = 0) {
    const std::vector<ClassIndex> symbols = charset.encode(word.text);
    if (symbols.empty()) throw std::invalid_argument("approximate_char_boxes: empty text");

    double total = 0.0;
    for (ClassIndex s : symbols) total += widths.width(s);

    const Rect& r = word.rect;
    std::vector<CharAnnotation> out;
    out.reserve(symbols.size());
    double acc = 0.0;
    double x0 = r.left();
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        acc += widths.width(symbols[k]);
        const double x1 = k + 1 == symbols.size() ? r.right() : r.left() + r.w() * (acc / total);
        out.push_back({symbols[k], Rect::from_corners(x0, r.top(), x1, r.bottom()), word_id});
        x0 = x1;
    }
    return out;
}

/// Builds a page from word annotations, deriving char boxes by proportional split.
inline GroundTruthPage make_page(Shape shape, std::vector<WordAnnotation> words,
                                 const Charset& charset, const WidthTable& widths) {
    std::vector<CharAnnotation> chars;
    for (std::size_t w = 0; w < words.size(); ++w) {
        auto boxes = approximate_char_boxes(words[w], widths, charset, w);
        chars.insert(chars.end(), boxes.begin(), boxes.end());
    }
    return GroundTruthPage(shape, std::move(words), std::move(chars));
}

struct EncodeReport {
    /// Indices of chars that cover no pixel sample point and cannot be decoded.
    std::vector<std::size_t> unsampled_chars;
};

/// Rasterises a page into the training targets. Pixels whose sample point
/// lies inside a char box take that box's values; later chars overwrite
/// earlier ones. Everything else is zero.
inline NetworkOutput encode_page(const GroundTruthPage& page, const Charset& charset,
                                 EncodeReport* report = nullptr) {
    NetworkOutput out(page.shape());
    const auto& words = page.words();
    const auto& chars = page.chars();
    for (std::size_t c = 0; c < chars.size(); ++c) {
        const CharAnnotation& ch = chars[c];
        if (ch.symbol_index > charset.unknown_index()) {
            throw std::invalid_argument("encode_page: class index " +
                                        std::to_string(ch.symbol_index) + " outside charset");
        }
        const Rect& box = ch.rect;
        const Rect& word = words[ch.word_id].rect;
        const PixelBlock px = sampled_pixels(box, page.shape());
        if (px.empty()) {
            if (report) report->unsampled_chars.push_back(c);
            continue;
        }
        const double logw = std::log(box.w());
        const double logh = std::log(box.h());
        for (std::size_t i = px.row_begin; i < px.row_end; ++i) {
            const double y = sample_y(i);
            for (std::size_t j = px.col_begin; j < px.col_end; ++j) {
                const double x = sample_x(j);
                out.chars(i, j) = ch.symbol_index;
                out.box_mask(i, j) = 1.0;
                out.box_dx(i, j) = box.cx() - x;
                out.box_dy(i, j) = box.cy() - y;
                out.box_logw(i, j) = logw;
                out.box_logh(i, j) = logh;
                out.word_dx(i, j) = encode_word_offset(word.cx() - x);
                out.word_dy(i, j) = encode_word_offset(word.cy() - y);
            }
        }
    }
    return out;
}

}  // namespace chargrid
