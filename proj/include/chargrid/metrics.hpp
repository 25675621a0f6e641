#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "chargrid/geometry.hpp"
#include "chargrid/page.hpp"
#include "chargrid/word_assembly.hpp"

namespace chargrid {

/// Unicode NFC normalisation of a UTF-8 string.
inline std::string nfc(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    const icu::UnicodeString dst = norm->normalize(src, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFC normalisation failed");
    std::string out;
    dst.toUTF8String(out);
    return out;
}

inline std::string fold_case(std::string_view text) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    s.foldCase();
    std::string out;
    s.toUTF8String(out);
    return out;
}

struct MatchOptions {
    bool ignore_case = false;
};

struct MatchResult {
    std::size_t n_matched = 0;
    std::size_t n_unmatched_pred = 0;
    std::size_t n_unmatched_gt = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred, gt)
};

/// One-to-one matching of predicted to ground-truth words. A pair is eligible
/// when the normalised strings are identical and the boxes share positive
/// area; eligible pairs are taken greedily by descending intersection area
/// (ties: smaller pred index, then smaller gt index).
inline MatchResult match_words(std::span<const WordAnnotation> pred, std::span<const WordAnnotation> gt,
                               const MatchOptions& opt = {}) {
    auto key = [&](const std::string& s) { return opt.ignore_case ? fold_case(nfc(s)) : nfc(s); };

    std::unordered_map<std::string, std::vector<std::size_t>> gt_by_text;
    for (std::size_t g = 0; g < gt.size(); ++g) gt_by_text[key(gt[g].text)].push_back(g);

    struct Eligible {
        double area;
        std::size_t p, g;
    };
    std::vector<Eligible> eligible;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        const auto it = gt_by_text.find(key(pred[p].text));
        if (it == gt_by_text.end()) continue;
        for (std::size_t g : it->second) {
            const double a = intersection_area(pred[p].rect, gt[g].rect);
            if (a > 0.0) eligible.push_back({a, p, g});
        }
    }
    std::sort(eligible.begin(), eligible.end(), [](const Eligible& a, const Eligible& b) {
        if (a.area != b.area) return a.area > b.area;
        return std::tie(a.p, a.g) < std::tie(b.p, b.g);
    });

    MatchResult m;
    std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
    for (const auto& e : eligible) {
        if (pred_used[e.p] || gt_used[e.g]) continue;
        pred_used[e.p] = gt_used[e.g] = true;
        m.pairs.emplace_back(e.p, e.g);
    }
    m.n_matched = m.pairs.size();
    m.n_unmatched_pred = pred.size() - m.n_matched;
    m.n_unmatched_gt = gt.size() - m.n_matched;
    return m;
}

inline std::vector<WordAnnotation> as_annotations(std::span<const Word> words) {
    std::vector<WordAnnotation> out;
    out.reserve(words.size());
    for (const auto& w : words) out.emplace_back(w.text, w.rect);
    return out;
}

inline MatchResult match_words(std::span<const Word> pred, std::span<const WordAnnotation> gt,
                               const MatchOptions& opt = {}) {
    const auto annotations = as_annotations(pred);
    return match_words(std::span<const WordAnnotation>(annotations), gt, opt);
}

/// N_m / (N_m + N_u + N_g); an empty page scores 1.
inline double wrr_document(const MatchResult& m) {
    const std::size_t total = m.n_matched + m.n_unmatched_pred + m.n_unmatched_gt;
    if (total == 0) return 1.0;
    return static_cast<double>(m.n_matched) / static_cast<double>(total);
}

struct DocumentScore {
    MatchResult match;
    std::size_t gt_word_count;
};

/// Per-document WRR averaged with weights equal to each document's
/// ground-truth word count.
inline double wrr_corpus(std::span<const DocumentScore> docs) {
    double num = 0.0;
    std::size_t den = 0;
    for (const auto& d : docs) {
        if (d.match.n_matched + d.match.n_unmatched_gt != d.gt_word_count) {
            throw std::invalid_argument("wrr_corpus: match counts inconsistent with gt word count");
        }
        num += static_cast<double>(d.gt_word_count) * wrr_document(d.match);
        den += d.gt_word_count;
    }
    if (den == 0) return 1.0;
    return num / static_cast<double>(den);
}

struct CorpusReport {
    struct Row {
        std::string doc_id;
        MatchResult match;
        double wrr;
    };
    std::vector<Row> per_document;
    double corpus_wrr = 1.0;
};

struct EvalDocument {
    std::string doc_id;
    std::vector<WordAnnotation> pred;
    std::vector<WordAnnotation> gt;
};

inline CorpusReport evaluate_corpus(std::span<const EvalDocument> docs, const MatchOptions& opt = {}) {
    CorpusReport report;
    std::vector<DocumentScore> scores;
    for (const auto& d : docs) {
        MatchResult m = match_words(std::span<const WordAnnotation>(d.pred),
                                    std::span<const WordAnnotation>(d.gt), opt);
        const double w = wrr_document(m);
        scores.push_back({m, d.gt.size()});
        report.per_document.push_back({d.doc_id, std::move(m), w});
    }
    report.corpus_wrr = wrr_corpus(scores);
    return report;
}

}  // namespace chargrid
