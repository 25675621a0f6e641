#pragma once

// JSON and directory formats used by the command-line tool.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chargrid/grid_io.hpp"
#include "chargrid/metrics.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/page.hpp"
#include "chargrid/synthgen.hpp"
#include "chargrid/target_codec.hpp"
#include "chargrid/word_assembly.hpp"

namespace chargrid {

using nlohmann::json;

inline json rect_fields(const Rect& r) { return {{"cx", r.cx()}, {"cy", r.cy()}, {"w", r.w()}, {"h", r.h()}}; }

inline Rect rect_from_json(const json& j) {
    return Rect(j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("w").get<double>(),
                j.at("h").get<double>());
}

inline json word_to_json(const std::string& text, const Rect& r) {
    json j = {{"text", text}};
    j.update(rect_fields(r));
    return j;
}

inline WordAnnotation word_from_json(const json& j) {
    return WordAnnotation(j.at("text").get<std::string>(), rect_from_json(j));
}

inline json words_to_json(std::span<const WordAnnotation> words) {
    json arr = json::array();
    for (const auto& w : words) arr.push_back(word_to_json(w.text, w.rect));
    return arr;
}

inline std::vector<WordAnnotation> words_from_json(const json& arr) {
    std::vector<WordAnnotation> out;
    for (const auto& j : arr) out.push_back(word_from_json(j));
    return out;
}

struct NamedPage {
    std::string doc_id;
    GroundTruthPage page;
};

/// {"doc_id", "shape": [rows, cols], "words": [...], "chars": [...]}. The
/// optional "chars" array carries {"text", "word", cx, cy, w, h}; without it
/// char boxes are derived from the words by proportional split.
inline json page_to_json(const std::string& doc_id, const GroundTruthPage& page, const Charset& charset) {
    json chars = json::array();
    for (const auto& c : page.chars()) {
        json jc = {{"text", charset.symbol(c.symbol_index)}, {"word", c.word_id}};
        jc.update(rect_fields(c.rect));
        chars.push_back(std::move(jc));
    }
    return {{"doc_id", doc_id},
            {"shape", {page.shape().rows, page.shape().cols}},
            {"words", words_to_json(page.words())},
            {"chars", std::move(chars)}};
}

inline NamedPage page_from_json(const json& j, const Charset& charset, const WidthTable& widths) {
    const auto shape_arr = j.at("shape");
    const Shape shape{shape_arr.at(0).get<std::size_t>(), shape_arr.at(1).get<std::size_t>()};
    std::string doc_id = j.at("doc_id").get<std::string>();
    auto words = words_from_json(j.at("words"));
    if (!j.contains("chars")) return {std::move(doc_id), make_page(shape, std::move(words), charset, widths)};
    std::vector<CharAnnotation> chars;
    for (const auto& jc : j.at("chars")) {
        chars.push_back({charset.index_of(jc.at("text").get<std::string>()), rect_from_json(jc),
                         jc.at("word").get<std::size_t>()});
    }
    return {std::move(doc_id), GroundTruthPage(shape, std::move(words), std::move(chars))};
}

inline json decoded_to_json(const std::string& doc_id, const DecodedPage& page, bool emit_chars,
                            const Charset& charset) {
    json words = json::array();
    for (const auto& w : page.words) {
        json jw = word_to_json(w.text, w.rect);
        if (emit_chars) {
            json chars = json::array();
            for (std::size_t k : w.char_indices) {
                const CharBox& c = page.chars[k];
                json jc = word_to_json(charset.symbol(c.symbol_index == kBackground ? charset.unknown_index()
                                                                                     : c.symbol_index),
                                       c.rect);
                jc["score"] = c.score;
                chars.push_back(std::move(jc));
            }
            jw["chars"] = std::move(chars);
        }
        words.push_back(std::move(jw));
    }
    return {{"doc_id", doc_id}, {"words", std::move(words)}};
}

inline std::vector<json> read_json_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline PageConfig page_config_from_json(const json& j, PageConfig cfg = {}) {
    cfg.shape.rows = j.value("rows", cfg.shape.rows);
    cfg.shape.cols = j.value("cols", cfg.shape.cols);
    cfg.columns = j.value("columns", cfg.columns);
    cfg.char_w = j.value("char_w", cfg.char_w);
    cfg.char_h = j.value("char_h", cfg.char_h);
    if (j.contains("word_len")) cfg.word_len = {j["word_len"].at(0), j["word_len"].at(1)};
    if (j.contains("words_per_line")) cfg.words_per_line = {j["words_per_line"].at(0), j["words_per_line"].at(1)};
    cfg.line_spacing = j.value("line_spacing", cfg.line_spacing);
    cfg.rotation = j.value("rotation", cfg.rotation);
    cfg.validate();
    return cfg;
}

inline NoiseConfig noise_config_from_json(const json& j) {
    NoiseConfig n;
    n.reg_sigma = j.value("reg_sigma", 0.0);
    n.mask_flip_p = j.value("mask_flip_p", 0.0);
    n.bc_jitter_sigma = j.value("bc_jitter_sigma", 0.0);
    n.seed = j.value("seed", std::uint64_t{0});
    n.validate();
    return n;
}

inline json corpus_report_to_json(const CorpusReport& r) {
    json docs = json::array();
    for (const auto& row : r.per_document) {
        docs.push_back({{"doc_id", row.doc_id},
                        {"n_matched", row.match.n_matched},
                        {"n_unmatched_pred", row.match.n_unmatched_pred},
                        {"n_unmatched_gt", row.match.n_unmatched_gt},
                        {"wrr", row.wrr},
                        {"pairs", row.match.pairs}});
    }
    return {{"corpus_wrr", r.corpus_wrr}, {"documents", std::move(docs)}};
}

inline void write_per_doc_csv(const CorpusReport& r, std::ostream& os) {
    os << "doc_id,n_matched,n_unmatched_pred,n_unmatched_gt,wrr\n";
    for (const auto& row : r.per_document) {
        std::ostringstream wrr;
        wrr << std::setprecision(17) << row.wrr;
        os << row.doc_id << ',' << row.match.n_matched << ',' << row.match.n_unmatched_pred << ','
           << row.match.n_unmatched_gt << ',' << wrr.str() << '\n';
    }
}

inline std::filesystem::path grid_path(const std::filesystem::path& dir, const std::string& page_id,
                                       std::string_view tag) {
    return dir / (page_id + "." + std::string(tag) + ".cgrd");
}

/// Writes `<page_id>.{S,Bc,Xc,Yc,Wc,Hc,Xw,Yw}.cgrd` into `dir`.
inline void write_output(const std::filesystem::path& dir, const std::string& page_id, const NetworkOutput& out) {
    grid_write(out.chars, grid_path(dir, page_id, NetworkOutput::chars_tag));
    const auto grids = out.real_grids();
    for (std::size_t k = 0; k < grids.size(); ++k) {
        grid_write(*grids[k], grid_path(dir, page_id, NetworkOutput::real_grid_tags[k]));
    }
}

/// Error raised for a specific grid file, carrying its path.
class GridFileError : public std::runtime_error {
public:
    GridFileError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(path.string() + ": " + what), path_(path) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline NetworkOutput read_output(const std::filesystem::path& dir, const std::string& page_id) {
    auto load = [&]<class T>(std::string_view tag, Grid<T>& dst) {
        const auto path = grid_path(dir, page_id, tag);
        if (!std::filesystem::exists(path)) throw GridFileError(path, "missing file");
        try {
            dst = grid_read<T>(path);
        } catch (const FormatError& e) {
            throw GridFileError(path, e.what());
        }
    };
    NetworkOutput out;
    load(NetworkOutput::chars_tag, out.chars);
    const auto grids = out.real_grids();
    for (std::size_t k = 0; k < grids.size(); ++k) load(NetworkOutput::real_grid_tags[k], *grids[k]);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw GridFileError(dir / page_id, e.what());
    }
    return out;
}

/// Page ids of every `<page_id>.S.cgrd` in `dir`, sorted.
inline std::vector<std::string> list_pages(const std::filesystem::path& dir) {
    const std::string suffix = "." + std::string(NetworkOutput::chars_tag) + ".cgrd";
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix)) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace chargrid
