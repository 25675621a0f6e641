#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chargrid/charset.hpp"
#include "chargrid/detector_decode.hpp"
#include "chargrid/geometry.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/raster.hpp"
#include "chargrid/spatial_index.hpp"
#include "chargrid/target_codec.hpp"

namespace chargrid {

struct Word {
    std::string text;
    Rect rect;
    std::vector<std::size_t> char_indices;  // reading order
};

struct WordProposal {
    std::size_t char_index;
    Rect rect;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

class UnsampleableBox : public std::runtime_error {
public:
    UnsampleableBox() : std::runtime_error("unsampleable box") {}
};

/// Majority class of the chargrid over the pixels sampled by the box,
/// ignoring background. Ties go to the smaller index; no votes (or a box
/// entirely off the grid) gives the unknown index. `outside` is set when
/// the box samples no pixel at all.
inline ClassIndex assign_class(const CharBox& box, const ClassGrid& chars, const Charset& charset,
                               bool* outside = nullptr) {
    const PixelBlock px = sampled_pixels(box.rect, chars.shape());
    if (outside) *outside = px.empty();
    std::vector<std::uint32_t> votes(charset.size() + 1, 0);
    for (std::size_t i = px.row_begin; i < px.row_end; ++i) {
        for (std::size_t j = px.col_begin; j < px.col_end; ++j) {
            const ClassIndex c = chars(i, j);
            if (c != kBackground && c < votes.size()) ++votes[c];
        }
    }
    ClassIndex best = charset.unknown_index();
    std::uint32_t best_votes = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > best_votes) {
            best_votes = votes[c];
            best = static_cast<ClassIndex>(c);
        }
    }
    return best;
}

namespace detail {

inline double median(std::vector<double>& v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace detail

/// Component-wise median of the word centers decoded at every pixel sampled
/// by the box.
inline Point predicted_word_center(const CharBox& box, const RealGrid& word_dx, const RealGrid& word_dy) {
    const PixelBlock px = sampled_pixels(box.rect, word_dx.shape());
    if (px.empty()) throw UnsampleableBox();
    std::vector<double> xs, ys;
    xs.reserve(px.count());
    ys.reserve(px.count());
    for (std::size_t i = px.row_begin; i < px.row_end; ++i) {
        for (std::size_t j = px.col_begin; j < px.col_end; ++j) {
            xs.push_back(sample_x(j) + decode_word_offset(word_dx(i, j)));
            ys.push_back(sample_y(i) + decode_word_offset(word_dy(i, j)));
        }
    }
    return {detail::median(xs), detail::median(ys)};
}

/// Bounding box of the char rect and its point reflection through `center`.
inline WordProposal word_proposal(const CharBox& box, Point center, std::size_t char_index = 0) {
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
        throw std::invalid_argument("word_proposal: non-finite center");
    }
    const Rect& r = box.rect;
    const Rect mirrored(2.0 * center.x - r.cx(), 2.0 * center.y - r.cy(), r.w(), r.h());
    return {char_index, bounding_box(r, mirrored)};
}

/// Connected components of the graph linking chars whose proposals overlap by
/// more than half of the smaller proposal. Components hold sorted indices and
/// are ordered by the (top, left) corner of their members' bounding box.
inline std::vector<std::vector<std::size_t>> cluster_words(std::span<const CharBox> boxes,
                                                           std::span<const WordProposal> proposals) {
    if (boxes.size() != proposals.size()) {
        throw std::invalid_argument("cluster_words: need one proposal per box");
    }
    const std::size_t n = proposals.size();
    std::vector<Rect> rects;
    rects.reserve(n);
    for (const auto& p : proposals) rects.push_back(p.rect);

    std::vector<std::vector<std::uint32_t>> adjacency(n);
    SpatialIndex index(rects);
    for (std::size_t a = 0; a < n; ++a) {
        index.for_each_candidate(rects[a], [&](std::uint32_t b) {
            if (overlap_fraction_of_smaller(rects[a], rects[b]) > 0.5) {
                adjacency[a].push_back(b);
                adjacency[b].push_back(static_cast<std::uint32_t>(a));
            }
        });
        index.insert(static_cast<std::uint32_t>(a));
    }

    std::vector<std::vector<std::size_t>> components;
    std::vector<bool> seen(n, false);
    std::vector<std::uint32_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> comp;
        seen[s] = true;
        stack.push_back(static_cast<std::uint32_t>(s));
        while (!stack.empty()) {
            const std::uint32_t v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (std::uint32_t u : adjacency[v]) {
                if (!seen[u]) {
                    seen[u] = true;
                    stack.push_back(u);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }

    struct Key {
        double top, left;
        std::size_t first;
    };
    std::vector<Key> keys;
    keys.reserve(components.size());
    for (const auto& comp : components) {
        double top = boxes[comp[0]].rect.top(), left = boxes[comp[0]].rect.left();
        for (std::size_t k : comp) {
            top = std::min(top, boxes[k].rect.top());
            left = std::min(left, boxes[k].rect.left());
        }
        keys.push_back({top, left, comp[0]});
    }
    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Key& ka = keys[a];
        const Key& kb = keys[b];
        if (ka.top != kb.top) return ka.top < kb.top;
        if (ka.left != kb.left) return ka.left < kb.left;
        return ka.first < kb.first;
    });
    std::vector<std::vector<std::size_t>> sorted;
    sorted.reserve(components.size());
    for (std::size_t k : order) sorted.push_back(std::move(components[k]));
    return sorted;
}

/// Orders a cluster along the principal axis of its char centers (oriented
/// left-to-right, or top-to-bottom for vertical axes) and spells the word.
inline Word assemble_word(std::span<const std::size_t> cluster, std::span<const CharBox> boxes,
                          const Charset& charset) {
    if (cluster.empty()) throw std::invalid_argument("assemble_word: empty cluster");

    double mx = 0.0, my = 0.0;
    for (std::size_t k : cluster) {
        mx += boxes[k].rect.cx();
        my += boxes[k].rect.cy();
    }
    const double n = static_cast<double>(cluster.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t k : cluster) {
        const double dx = boxes[k].rect.cx() - mx;
        const double dy = boxes[k].rect.cy() - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Major eigenvector of [[sxx, sxy], [sxy, syy]].
    const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    double ax = std::cos(angle), ay = std::sin(angle);
    constexpr double kAxisEps = 1e-12;
    if (ax < -kAxisEps || (std::fabs(ax) <= kAxisEps && ay < 0.0)) {
        ax = -ax;
        ay = -ay;
    }

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(cluster.size());
    for (std::size_t k : cluster) {
        ranked.emplace_back(boxes[k].rect.cx() * ax + boxes[k].rect.cy() * ay, k);
    }
    std::sort(ranked.begin(), ranked.end());

    Word word{{}, boxes[ranked[0].second].rect, {}};
    for (const auto& [proj, k] : ranked) {
        const ClassIndex c = boxes[k].symbol_index == kBackground ? charset.unknown_index()
                                                                   : boxes[k].symbol_index;
        word.text += charset.symbol(c);
        word.rect = bounding_box(word.rect, boxes[k].rect);
        word.char_indices.push_back(k);
    }
    return word;
}

struct DecodeOptions {
    double tau = 0.5;
    double theta = 0.5;
    bool graphcore = true;
};

/// Per-stage counters collected while decoding one page.
struct DecodeReport {
    std::size_t candidates = 0;
    std::size_t dropped_nonfinite = 0;
    std::size_t after_graphcore = 0;
    std::size_t char_boxes = 0;
    std::size_t boxes_outside_grid = 0;
    std::size_t unsampleable_boxes = 0;
    std::size_t words = 0;
};

struct DecodedPage {
    std::vector<Word> words;
    std::vector<CharBox> chars;
    DecodeReport report;
};

/// Full post-processing: candidates, Graphcore, NMS, labeling, word proposals,
/// clustering and word assembly.
inline DecodedPage decode_page(const NetworkOutput& out, const Charset& charset,
                               const DecodeOptions& opt = {}) {
    DecodedPage page;
    DecodeReport& rep = page.report;

    ExtractStats stats;
    std::vector<CandidateBox> cands = extract_candidates(out, opt.tau, &stats);
    rep.candidates = cands.size();
    rep.dropped_nonfinite = stats.dropped_nonfinite;
    if (opt.graphcore) cands = graphcore_filter(cands, out.shape());
    rep.after_graphcore = cands.size();

    page.chars = nms(cands, opt.theta);
    rep.char_boxes = page.chars.size();

    std::vector<WordProposal> proposals;
    proposals.reserve(page.chars.size());
    for (std::size_t k = 0; k < page.chars.size(); ++k) {
        CharBox& box = page.chars[k];
        bool outside = false;
        box.symbol_index = assign_class(box, out.chars, charset, &outside);
        if (outside) ++rep.boxes_outside_grid;
        Point center{box.rect.cx(), box.rect.cy()};
        try {
            center = predicted_word_center(box, out.word_dx, out.word_dy);
            if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
                center = {box.rect.cx(), box.rect.cy()};
                ++rep.unsampleable_boxes;
            }
        } catch (const UnsampleableBox&) {
            ++rep.unsampleable_boxes;
        }
        proposals.push_back(word_proposal(box, center, k));
    }

    for (const auto& cluster : cluster_words(page.chars, proposals)) {
        page.words.push_back(assemble_word(cluster, page.chars, charset));
    }
    rep.words = page.words.size();
    return page;
}

}  // namespace chargrid
