#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace chargrid {

using ClassIndex = std::uint16_t;

inline constexpr ClassIndex kBackground = 0;

/// Splits a UTF-8 string into code points. Malformed bytes come back as
/// one-byte pieces so they can still be mapped (to the unknown symbol).
inline std::vector<std::string> utf8_code_points(std::string_view text) {
    std::vector<std::string> out;
    std::size_t k = 0;
    while (k < text.size()) {
        const auto lead = static_cast<unsigned char>(text[k]);
        std::size_t len = 1;
        if (lead >= 0xF0 && lead < 0xF8) len = 4;
        else if (lead >= 0xE0) len = lead < 0xF0 ? 3 : 1;
        else if (lead >= 0xC0) len = 2;
        if (k + len > text.size()) len = 1;
        for (std::size_t c = 1; c < len; ++c) {
            if ((static_cast<unsigned char>(text[k + c]) & 0xC0) != 0x80) {
                len = 1;
                break;
            }
        }
        out.emplace_back(text.substr(k, len));
        k += len;
    }
    return out;
}

/// Ordered symbol table. Index 0 is background, 1..N-1 are printable
/// symbols and the last index N is the unknown token.
class Charset {
public:
    Charset(std::vector<std::string> printable, std::string unknown_glyph)
        : symbols_(std::move(printable)), unknown_glyph_(std::move(unknown_glyph)) {
        if (symbols_.empty()) throw std::invalid_argument("Charset: no printable symbols");
        if (symbols_.size() + 1 > 0xFFFF) throw std::invalid_argument("Charset: too many symbols");
        for (std::size_t k = 0; k < symbols_.size(); ++k) {
            if (utf8_code_points(symbols_[k]).size() != 1) {
                throw std::invalid_argument("Charset: symbol '" + symbols_[k] +
                                            "' is not a single code point");
            }
            if (!index_.emplace(symbols_[k], static_cast<ClassIndex>(k + 1)).second) {
                throw std::invalid_argument("Charset: duplicate symbol '" + symbols_[k] + "'");
            }
        }
    }

    /// Number of non-background classes, including unknown.
    std::size_t size() const { return symbols_.size() + 1; }
    std::size_t printable_count() const { return symbols_.size(); }
    ClassIndex unknown_index() const { return static_cast<ClassIndex>(symbols_.size() + 1); }

    ClassIndex index_of(std::string_view symbol) const {
        const auto it = index_.find(std::string(symbol));
        return it == index_.end() ? unknown_index() : it->second;
    }

    bool contains(std::string_view symbol) const { return index_.contains(std::string(symbol)); }

    const std::string& symbol(ClassIndex index) const {
        if (index == kBackground || index > unknown_index()) {
            throw std::out_of_range("Charset::symbol: index " + std::to_string(index));
        }
        return index == unknown_index() ? unknown_glyph_ : symbols_[index - 1];
    }

    std::vector<ClassIndex> encode(std::string_view text) const {
        std::vector<ClassIndex> out;
        for (const auto& cp : utf8_code_points(text)) out.push_back(index_of(cp));
        return out;
    }

    const std::vector<std::string>& printable() const { return symbols_; }
    const std::string& unknown_glyph() const { return unknown_glyph_; }

    /// 26 lower, 26 upper, 10 digits, 26 punctuation marks and unknown: 89 classes.
    static Charset english() {
        std::vector<std::string> s;
        for (char c = 'a'; c <= 'z'; ++c) s.emplace_back(1, c);
        for (char c = 'A'; c <= 'Z'; ++c) s.emplace_back(1, c);
        for (char c = '0'; c <= '9'; ++c) s.emplace_back(1, c);
        for (char c : std::string_view("!\"#$%&'()*+,-./:;<=>?@[]_|")) s.emplace_back(1, c);
        return Charset(std::move(s), "\xEF\xBF\xBD");
    }

    /// {"symbols": [...], "unknown": "..."}
    static Charset from_json(const nlohmann::json& j) {
        return Charset(j.at("symbols").get<std::vector<std::string>>(),
                       j.value("unknown", std::string("\xEF\xBF\xBD")));
    }

    static Charset load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open charset file " + path.string());
        return from_json(nlohmann::json::parse(in));
    }

    nlohmann::json to_json() const { return {{"symbols", symbols_}, {"unknown", unknown_glyph_}}; }

private:
    std::vector<std::string> symbols_;
    std::string unknown_glyph_;
    std::unordered_map<std::string, ClassIndex> index_;
};

}  // namespace chargrid
