// chargrid: synth / encode / decode / eval / bench over CGRD tensors and
// JSON-lines page files.
//
// Exit codes: 0 ok, 1 usage, 2 I/O or format error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chargrid/chargrid.hpp"
#include "chargrid/io.hpp"

namespace fs = std::filesystem;
using namespace chargrid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

struct GlobalOptions {
    std::string charset_path;
    std::size_t threads = 1;
    std::uint64_t seed = 0;
};

class IoFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

Charset load_charset(const GlobalOptions& g) {
    if (g.charset_path.empty()) return Charset::english();
    try {
        return Charset::load(g.charset_path);
    } catch (const std::exception& e) {
        throw IoFailure(g.charset_path + ": " + e.what());
    }
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure(path + ": " + e.what());
    }
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw IoFailure("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<NamedPage> load_pages(const std::string& path, const Charset& charset) {
    std::vector<NamedPage> pages;
    const WidthTable widths(charset);
    std::vector<nlohmann::json> lines;
    try {
        lines = read_json_lines(path);
    } catch (const std::exception& e) {
        throw IoFailure(e.what());
    }
    for (const auto& j : lines) {
        try {
            pages.push_back(page_from_json(j, charset, widths));
        } catch (const std::exception& e) {
            throw IoFailure(path + ": bad page: " + e.what());
        }
    }
    return pages;
}

std::string page_id(std::size_t index) {
    std::ostringstream os;
    os << "page_" << std::setw(5) << std::setfill('0') << index;
    return os.str();
}

void encode_pages(const std::vector<NamedPage>& pages, const fs::path& out_dir, const Charset& charset,
                  const std::optional<NoiseConfig>& noise, std::size_t threads) {
    ensure_dir(out_dir);
    std::vector<std::size_t> unsampled(pages.size(), 0);
    parallel_for(pages.size(), threads, [&](std::size_t k) {
        EncodeReport report;
        NetworkOutput out = encode_page(pages[k].page, charset, &report);
        if (noise) {
            NoiseConfig n = *noise;
            n.seed = derive_seed(noise->seed, k);
            out = corrupt_output(out, n, charset);
        }
        write_output(out_dir, pages[k].doc_id, out);
        unsampled[k] = report.unsampled_chars.size();
    });
    for (std::size_t k = 0; k < pages.size(); ++k) {
        if (unsampled[k]) {
            std::cerr << pages[k].doc_id << ": " << unsampled[k] << " char box(es) cover no pixel sample\n";
        }
    }
}

int run_synth(const GlobalOptions& g, std::size_t n_pages, const std::string& config_path,
              const std::string& noise_path, const std::string& out) {
    const Charset charset = load_charset(g);
    PageConfig base;
    if (!config_path.empty()) base = page_config_from_json(load_json(config_path));
    std::optional<NoiseConfig> noise;
    if (!noise_path.empty()) noise = noise_config_from_json(load_json(noise_path));

    std::vector<std::optional<NamedPage>> generated(n_pages);
    parallel_for(n_pages, g.threads, [&](std::size_t k) {
        PageConfig cfg = base;
        cfg.seed = page_seed(g.seed, k);
        generated[k] = NamedPage{page_id(k), generate_page(cfg, charset)};
    });
    std::vector<NamedPage> pages;
    std::vector<std::string> lines;
    for (auto& p : generated) {
        lines.push_back(page_to_json(p->doc_id, p->page, charset).dump());
        pages.push_back(std::move(*p));
    }
    const fs::path dir(out);
    ensure_dir(dir);
    write_lines(dir / "pages.jsonl", lines);

    nlohmann::json meta = {{"prng", kPrngId}, {"seed", g.seed}, {"pages", n_pages},
                           {"config", config_path.empty() ? nlohmann::json() : load_json(config_path)}};
    if (noise) meta["noise"] = load_json(noise_path);
    write_lines(dir / "meta.json", {meta.dump(1)});

    encode_pages(pages, dir, charset, noise, g.threads);
    return kExitOk;
}

int run_encode(const GlobalOptions& g, const std::string& in, const std::string& out, const std::string& noise_path) {
    const Charset charset = load_charset(g);
    std::optional<NoiseConfig> noise;
    if (!noise_path.empty()) noise = noise_config_from_json(load_json(noise_path));
    encode_pages(load_pages(in, charset), out, charset, noise, g.threads);
    return kExitOk;
}

struct DecodeFlags {
    DecodeOptions options;
    bool emit_chars = false;
};

/// Decodes every page in `in_dir` and writes one JSON line per page.
int run_pipeline_files(const GlobalOptions& g, const fs::path& in_dir, const fs::path& out_path,
                       const DecodeFlags& flags) {
    const Charset charset = load_charset(g);
    if (!fs::is_directory(in_dir)) throw IoFailure("not a directory: " + in_dir.string());
    const auto ids = list_pages(in_dir);
    std::vector<std::string> lines(ids.size());
    std::vector<DecodeReport> reports(ids.size());
    parallel_for(ids.size(), g.threads, [&](std::size_t k) {
        const NetworkOutput out = read_output(in_dir, ids[k]);
        const DecodedPage page = decode_page(out, charset, flags.options);
        lines[k] = decoded_to_json(ids[k], page, flags.emit_chars, charset).dump();
        reports[k] = page.report;
    });
    write_lines(out_path, lines);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const DecodeReport& r = reports[k];
        if (r.dropped_nonfinite || r.boxes_outside_grid || r.unsampleable_boxes) {
            std::cerr << ids[k] << ": dropped_nonfinite=" << r.dropped_nonfinite
                      << " boxes_outside_grid=" << r.boxes_outside_grid
                      << " unsampleable_boxes=" << r.unsampleable_boxes << '\n';
        }
    }
    return kExitOk;
}

std::map<std::string, std::vector<WordAnnotation>> load_words_by_doc(const std::string& path) {
    std::map<std::string, std::vector<WordAnnotation>> docs;
    std::vector<nlohmann::json> lines;
    try {
        lines = read_json_lines(path);
        for (const auto& j : lines) {
            const auto id = j.at("doc_id").get<std::string>();
            if (docs.contains(id)) throw std::runtime_error("duplicate doc_id " + id);
            docs[id] = words_from_json(j.at("words"));
        }
    } catch (const std::exception& e) {
        throw IoFailure(path + ": " + e.what());
    }
    return docs;
}

int run_eval(const std::string& pred_path, const std::string& gt_path, const std::string& out,
             const std::string& per_doc, bool ignore_case) {
    auto preds = load_words_by_doc(pred_path);
    const auto gts = load_words_by_doc(gt_path);
    std::vector<EvalDocument> docs;
    for (const auto& [id, gt] : gts) {
        auto it = preds.find(id);
        docs.push_back({id, it == preds.end() ? std::vector<WordAnnotation>{} : std::move(it->second), gt});
        if (it != preds.end()) preds.erase(it);
    }
    // predictions for documents without ground truth count as unmatched
    for (auto& [id, pred] : preds) docs.push_back({id, std::move(pred), {}});

    const CorpusReport report = evaluate_corpus(docs, {.ignore_case = ignore_case});
    const std::string body = corpus_report_to_json(report).dump(1);
    if (out.empty()) {
        std::cout << body << '\n';
    } else {
        write_lines(out, {body});
    }
    if (!per_doc.empty()) {
        std::ofstream csv(per_doc, std::ios::binary | std::ios::trunc);
        if (!csv) throw IoFailure("cannot write " + per_doc);
        write_per_doc_csv(report, csv);
    }
    std::cerr << "corpus_wrr=" << report.corpus_wrr << '\n';
    return kExitOk;
}

int run_bench(const GlobalOptions& g, const std::vector<std::size_t>& sizes, int reps, const std::string& out) {
    const Charset charset = load_charset(g);
    const BenchReport report = bench_filtering(sizes, g.seed, charset, {.repetitions = reps});
    if (out.empty()) {
        report.write_csv(std::cout);
    } else {
        std::ofstream csv(out, std::ios::binary | std::ios::trunc);
        if (!csv) throw IoFailure("cannot write " + out);
        report.write_csv(csv);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chargrid OCR post-processing: synthetic pages, target encoding, decoding and WRR evaluation"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--charset", g.charset_path, "Charset JSON file ({\"symbols\": [...], \"unknown\": ...})");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1, 256));
    app.add_option("--seed", g.seed, "Random seed");

    std::size_t n_pages = 10;
    std::string config_path, noise_path, out, in;
    auto* synth = app.add_subcommand("synth", "Generate ground-truth pages and their encoded tensors");
    synth->add_option("--pages", n_pages, "Number of pages")->required();
    synth->add_option("--config", config_path, "Page layout JSON");
    synth->add_option("--noise", noise_path, "Tensor noise JSON");
    synth->add_option("--out", out, "Output directory")->required();

    auto* encode = app.add_subcommand("encode", "Encode page JSON-lines into CGRD tensors");
    encode->add_option("--in", in, "Pages JSON-lines")->required();
    encode->add_option("--out", out, "Output directory")->required();
    encode->add_option("--noise", noise_path, "Tensor noise JSON");

    DecodeFlags flags;
    auto* decode = app.add_subcommand("decode", "Decode CGRD tensors into words");
    decode->add_option("--in", in, "Directory of <page_id>.<grid>.cgrd files")->required();
    decode->add_option("--out", out, "Output JSON-lines")->required();
    decode->add_option("--tau", flags.options.tau, "Box-mask threshold")->check(CLI::Range(0.0, 1.0));
    decode->add_option("--theta", flags.options.theta, "NMS IoU threshold")->check(CLI::Range(0.0, 1.0));
    bool no_graphcore = false;
    decode->add_flag("--no-graphcore", no_graphcore, "Run NMS on all candidates");
    decode->add_flag("--emit-chars", flags.emit_chars, "Include member char boxes per word");

    std::string pred_path, gt_path, per_doc;
    bool ignore_case = false;
    auto* eval = app.add_subcommand("eval", "Word recognition rate of predictions against ground truth");
    eval->add_option("--pred", pred_path, "Prediction JSON-lines")->required();
    eval->add_option("--gt", gt_path, "Ground-truth JSON-lines")->required();
    eval->add_option("--out", out, "CorpusReport JSON (stdout if omitted)");
    eval->add_option("--per-doc", per_doc, "Per-document CSV");
    eval->add_flag("--ignore-case", ignore_case, "Case-insensitive string comparison");

    std::vector<std::size_t> sizes{1000, 10000, 100000};
    int reps = 5;
    auto* bench = app.add_subcommand("bench", "Time Graphcore+NMS against brute-force NMS");
    bench->add_option("--sizes", sizes, "Target candidate counts")->delimiter(',');
    bench->add_option("--reps", reps, "Repetitions per size (median reported)")->check(CLI::PositiveNumber);
    bench->add_option("--out", out, "BenchReport CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    flags.options.graphcore = !no_graphcore;
    if (decode->parsed() && !(flags.options.tau > 0.0 && flags.options.tau < 1.0 &&
                              flags.options.theta > 0.0 && flags.options.theta < 1.0)) {
        std::cerr << "--tau and --theta must lie strictly between 0 and 1\n" << app.help();
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(g, n_pages, config_path, noise_path, out);
        if (encode->parsed()) return run_encode(g, in, out, noise_path);
        if (decode->parsed()) return run_pipeline_files(g, in, out, flags);
        if (eval->parsed()) return run_eval(pred_path, gt_path, out, per_doc, ignore_case);
        if (bench->parsed()) return run_bench(g, sizes, reps, out);
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const GridFileError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
