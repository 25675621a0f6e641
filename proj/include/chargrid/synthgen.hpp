#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chargrid/charset.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/page.hpp"
#include "chargrid/random.hpp"
#include "chargrid/target_codec.hpp"

namespace chargrid {

struct PageConfig {
    Shape shape{64, 256};
    int columns = 1;
    double char_w = 4.0;
    double char_h = 6.0;
    std::pair<int, int> word_len{3, 5};
    std::pair<int, int> words_per_line{1, 64};
    double line_spacing = 0.5;  // blank space between lines, in char heights
    int rotation = 0;           // 0 or 90
    std::uint64_t seed = 0;

    void validate() const {
        auto bad = [](const std::string& what) { throw std::invalid_argument("PageConfig: " + what); };
        if (columns < 1 || columns > 3) bad("columns must be 1..3");
        if (!(char_w >= 1.0) || !(char_h >= 1.0)) bad("char size must be >= 1 pixel");
        if (word_len.first < 1 || word_len.first > word_len.second) bad("bad word_len range");
        if (words_per_line.first < 1 || words_per_line.first > words_per_line.second) {
            bad("bad words_per_line range");
        }
        if (!(line_spacing >= 0.0)) bad("line_spacing must be >= 0");
        if (rotation != 0 && rotation != 90) bad("rotation must be 0 or 90");
    }
};

struct NoiseConfig {
    double reg_sigma = 0.0;
    double mask_flip_p = 0.0;
    double bc_jitter_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(reg_sigma >= 0.0) || !(bc_jitter_sigma >= 0.0)) {
            throw std::invalid_argument("NoiseConfig: sigmas must be >= 0");
        }
        if (!(mask_flip_p >= 0.0 && mask_flip_p < 1.0)) {
            throw std::invalid_argument("NoiseConfig: mask_flip_p must be in [0,1)");
        }
    }
};

namespace detail {

inline GroundTruthPage transpose_page(const GroundTruthPage& page) {
    std::vector<WordAnnotation> words;
    for (const auto& w : page.words()) words.emplace_back(w.text, transposed(w.rect));
    std::vector<CharAnnotation> chars;
    for (const auto& c : page.chars()) chars.push_back({c.symbol_index, transposed(c.rect), c.word_id});
    return GroundTruthPage({page.shape().cols, page.shape().rows}, std::move(words), std::move(chars));
}

}  // namespace detail

/// Lays out random words on a page: columns left to right, lines top to
/// bottom within each column, words left to right within each line. Word
/// edges sit on whole pixels and neighbouring words are at least 1.5 char
/// widths apart. A 90 degree page transposes every annotation and the shape.
inline GroundTruthPage generate_page(const PageConfig& cfg, const Charset& charset) {
    cfg.validate();
    const double rows = static_cast<double>(cfg.shape.rows);
    const double cols = static_cast<double>(cfg.shape.cols);
    const double margin_x = std::ceil(cfg.char_w);
    const double margin_y = std::ceil(0.5 * cfg.char_h);
    const double gutter = std::ceil(2.0 * cfg.char_w);
    const double word_gap = std::ceil(1.5 * cfg.char_w);
    const double col_width =
        std::floor((cols - 2.0 * margin_x - (cfg.columns - 1) * gutter) / cfg.columns);
    const double pitch = cfg.char_h * (1.0 + cfg.line_spacing);
    const double min_word = cfg.word_len.first * cfg.char_w;

    std::size_t n_lines = 0;
    if (rows - 2.0 * margin_y >= cfg.char_h) {
        n_lines = static_cast<std::size_t>(std::floor((rows - 2.0 * margin_y - cfg.char_h) / pitch)) + 1;
    }
    if (n_lines == 0 || !(col_width >= min_word)) {
        throw std::invalid_argument("degenerate layout");
    }

    Rng rng(cfg.seed, 0);
    const std::size_t n_symbols = charset.printable_count();
    std::vector<WordAnnotation> words;
    for (int c = 0; c < cfg.columns; ++c) {
        const double col_left = margin_x + c * (col_width + gutter);
        const double col_right = col_left + col_width;
        for (std::size_t line = 0; line < n_lines; ++line) {
            const double top = std::round(margin_y + static_cast<double>(line) * pitch);
            const auto n_words = rng.between(cfg.words_per_line.first, cfg.words_per_line.second);
            double x = col_left;
            for (std::int64_t k = 0; k < n_words; ++k) {
                const auto len = rng.between(cfg.word_len.first, cfg.word_len.second);
                const double width = static_cast<double>(len) * cfg.char_w;
                if (x + width > col_right) break;
                std::string text;
                for (std::int64_t s = 0; s < len; ++s) {
                    text += charset.printable()[rng.below(n_symbols)];
                }
                words.emplace_back(std::move(text), Rect::from_corners(x, top, x + width, top + cfg.char_h));
                x = std::ceil(x + width + word_gap);
            }
        }
    }

    GroundTruthPage page = make_page(cfg.shape, std::move(words), charset, WidthTable(charset));
    if (cfg.rotation == 90) return detail::transpose_page(page);
    return page;
}

/// Adds tensor-space noise to an encoded page. Each grid draws from its own
/// stream so the underlying draws do not depend on the noise magnitudes.
inline NetworkOutput corrupt_output(const NetworkOutput& in, const NoiseConfig& noise,
                                    const Charset& charset) {
    noise.validate();
    NetworkOutput out = in;

    RealGrid* regression[] = {&out.box_dx, &out.box_dy, &out.box_logw,
                              &out.box_logh, &out.word_dx, &out.word_dy};
    if (noise.reg_sigma > 0.0) {
        for (std::uint64_t g = 0; g < std::size(regression); ++g) {
            Rng rng(noise.seed, 1 + g);
            for (double& v : regression[g]->values()) v += noise.reg_sigma * rng.normal();
        }
    }
    if (noise.mask_flip_p > 0.0) {
        Rng rng(noise.seed, 7);
        for (ClassIndex& s : out.chars.values()) {
            if (s == kBackground) continue;
            if (rng.uniform() < noise.mask_flip_p) {
                s = static_cast<ClassIndex>(1 + rng.below(charset.size()));
            }
        }
    }
    if (noise.bc_jitter_sigma > 0.0) {
        Rng rng(noise.seed, 8);
        for (double& v : out.box_mask.values()) {
            v = std::clamp(v + noise.bc_jitter_sigma * rng.normal(), 0.0, 1.0);
        }
    }
    return out;
}

/// Seed of page `index` in a corpus generated from `seed`.
inline std::uint64_t page_seed(std::uint64_t seed, std::uint64_t index) {
    return derive_seed(seed, 0x1000 + index);
}

}  // namespace chargrid
