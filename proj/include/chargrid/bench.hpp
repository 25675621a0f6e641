#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <tuple>
#include <vector>

#include "chargrid/detector_decode.hpp"
#include "chargrid/synthgen.hpp"
#include "chargrid/target_codec.hpp"

namespace chargrid {

/// Set equality of two box lists, matching rects within `tol` per coordinate.
inline bool rect_sets_equal(std::span<const CharBox> a, std::span<const CharBox> b, double tol = 1e-6) {
    if (a.size() != b.size()) return false;
    auto sorted = [](std::span<const CharBox> boxes) {
        std::vector<Rect> r;
        r.reserve(boxes.size());
        for (const auto& x : boxes) r.push_back(x.rect);
        std::sort(r.begin(), r.end(), [](const Rect& p, const Rect& q) {
            return std::tuple(p.cx(), p.cy(), p.w(), p.h()) < std::tuple(q.cx(), q.cy(), q.w(), q.h());
        });
        return r;
    };
    const auto ra = sorted(a);
    const auto rb = sorted(b);
    for (std::size_t k = 0; k < ra.size(); ++k) {
        if (std::fabs(ra[k].cx() - rb[k].cx()) > tol || std::fabs(ra[k].cy() - rb[k].cy()) > tol ||
            std::fabs(ra[k].w() - rb[k].w()) > tol || std::fabs(ra[k].h() - rb[k].h()) > tol) {
            return false;
        }
    }
    return true;
}

struct BenchRow {
    std::size_t n_candidates = 0;
    std::size_t n_after_graphcore = 0;
    double t_graphcore_nms = 0.0;  // seconds
    double t_bruteforce_nms = 0.0;
    bool outputs_equal = false;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    void write_csv(std::ostream& os) const {
        os << "n_candidates,n_after_graphcore,t_graphcore_nms,t_bruteforce_nms,outputs_equal\n";
        for (const auto& r : rows) {
            os << r.n_candidates << ',' << r.n_after_graphcore << ',' << r.t_graphcore_nms << ','
               << r.t_bruteforce_nms << ',' << (r.outputs_equal ? "true" : "false") << '\n';
        }
    }
};

struct BenchOptions {
    int repetitions = 5;
    double tau = 0.5;
    double theta = 0.5;
    std::size_t page_cols = 512;
};

/// Clean-encoding candidates of a one-column synthetic page grown line by
/// line until it yields at least `target` candidates. Adding rows only
/// appends lines, so the smallest such page is found by stepping upward from
/// an estimate.
inline std::vector<CandidateBox> synthesize_candidates(std::size_t target, std::uint64_t seed,
                                                       const Charset& charset, double tau,
                                                       std::size_t cols, Shape* shape_out = nullptr) {
    PageConfig cfg;
    cfg.columns = 1;
    cfg.words_per_line = {64, 64};
    cfg.seed = seed;
    const std::size_t base = static_cast<std::size_t>(2.0 * std::ceil(cfg.char_h / 2.0) + cfg.char_h);
    const auto pitch = static_cast<std::size_t>(std::ceil(cfg.char_h * (1.0 + cfg.line_spacing)));
    auto candidates_for = [&](std::size_t lines) {
        cfg.shape = {base + (lines - 1) * pitch, cols};
        return extract_candidates(encode_page(generate_page(cfg, charset), charset), tau);
    };

    const std::size_t per_line = std::max<std::size_t>(1, candidates_for(1).size());
    std::size_t lines = std::max<std::size_t>(1, target / per_line);
    while (lines > 1 && candidates_for(lines).size() >= target) --lines;
    for (;; ++lines) {
        std::vector<CandidateBox> cands = candidates_for(lines);
        if (cands.size() >= target) {
            if (shape_out) *shape_out = cfg.shape;
            return cands;
        }
    }
}

/// Times Graphcore + NMS against brute-force NMS on clean candidate sets of
/// the requested sizes. Times are medians over the repetitions.
inline BenchReport bench_filtering(std::span<const std::size_t> sizes, std::uint64_t seed,
                                   const Charset& charset, const BenchOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const int reps = std::max(1, opt.repetitions);

    BenchReport report;
    for (const std::size_t target : sizes) {
        Shape shape;
        const auto cands = synthesize_candidates(target, seed, charset, opt.tau, opt.page_cols, &shape);

        BenchRow row;
        row.n_candidates = cands.size();
        std::vector<double> t_fast, t_brute;
        std::vector<CharBox> fast, brute;
        for (int r = 0; r < reps; ++r) {
            auto t0 = clock::now();
            const auto core = graphcore_filter(cands, shape);
            fast = nms(core, opt.theta);
            auto t1 = clock::now();
            brute = nms_bruteforce(cands, opt.theta);
            auto t2 = clock::now();
            row.n_after_graphcore = core.size();
            t_fast.push_back(std::chrono::duration<double>(t1 - t0).count());
            t_brute.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        row.t_graphcore_nms = median(t_fast);
        row.t_bruteforce_nms = median(t_brute);
        row.outputs_equal = rect_sets_equal(fast, brute);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace chargrid
