#pragma once

// CGRD binary grid files (little-endian):
//   "CGRD" | u32 version=1 | u32 rows | u32 cols | u8 dtype | row-major payload
// dtype 0 stores class indices as u16, dtype 1 stores reals as f32.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "chargrid/grid.hpp"

namespace chargrid {

enum class DType : std::uint8_t { class_index = 0, real = 1 };

class FormatError : public std::runtime_error {
public:
    enum class Kind { bad_magic, bad_version, bad_dtype, truncated_header, truncated_payload,
                      length_mismatch, io };

    FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

namespace detail {

inline constexpr char kMagic[4] = {'C', 'G', 'R', 'D'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 1;

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
           std::uint32_t{p[3]} << 24;
}

template <class T>
constexpr DType dtype_of() {
    if constexpr (std::is_same_v<T, std::uint16_t>) {
        return DType::class_index;
    } else {
        static_assert(std::is_same_v<T, double>, "CGRD supports u16 class grids and real grids");
        return DType::real;
    }
}

}  // namespace detail

/// Serialises a grid. Real values are narrowed to f32.
template <class T>
std::vector<std::uint8_t> encode_grid(const Grid<T>& g) {
    if (g.rows() > std::numeric_limits<std::uint32_t>::max() ||
        g.cols() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("encode_grid: shape exceeds u32");
    }
    constexpr DType dtype = detail::dtype_of<T>();
    std::vector<std::uint8_t> out;
    const std::size_t elem = dtype == DType::class_index ? 2 : 4;
    out.reserve(detail::kHeaderBytes + elem * g.size());
    out.insert(out.end(), std::begin(detail::kMagic), std::end(detail::kMagic));
    detail::put_u32(out, detail::kVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(g.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(g.cols()));
    out.push_back(static_cast<std::uint8_t>(dtype));
    for (const T v : g.values()) {
        if constexpr (dtype == DType::class_index) {
            out.push_back(static_cast<std::uint8_t>(v & 0xFF));
            out.push_back(static_cast<std::uint8_t>(v >> 8));
        } else {
            detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    return out;
}

/// Reads the dtype byte of a CGRD buffer after validating the header.
inline DType peek_dtype(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), detail::kMagic, 4) != 0) {
        throw FormatError(FormatError::Kind::bad_magic, "bad magic");
    }
    if (bytes.size() < detail::kHeaderBytes) {
        throw FormatError(FormatError::Kind::truncated_header, "truncated header");
    }
    const std::uint32_t version = detail::get_u32(bytes.data() + 4);
    if (version != detail::kVersion) {
        throw FormatError(FormatError::Kind::bad_version,
                          "unsupported version " + std::to_string(version));
    }
    const std::uint8_t dtype = bytes[16];
    if (dtype > 1) {
        throw FormatError(FormatError::Kind::bad_dtype, "unknown dtype " + std::to_string(dtype));
    }
    return static_cast<DType>(dtype);
}

template <class T>
Grid<T> decode_grid(const std::vector<std::uint8_t>& bytes) {
    constexpr DType want = detail::dtype_of<T>();
    const DType have = peek_dtype(bytes);
    if (have != want) {
        throw FormatError(FormatError::Kind::bad_dtype, "dtype mismatch: expected " +
                                                            std::to_string(int(want)) + ", got " +
                                                            std::to_string(int(have)));
    }
    const Shape shape{detail::get_u32(bytes.data() + 8), detail::get_u32(bytes.data() + 12)};
    const std::size_t elem = want == DType::class_index ? 2 : 4;
    const std::size_t payload = bytes.size() - detail::kHeaderBytes;
    if (payload % elem != 0) {
        throw FormatError(FormatError::Kind::truncated_payload, "truncated payload");
    }
    if (payload / elem != shape.size()) {
        throw FormatError(FormatError::Kind::length_mismatch,
                          "length mismatch: header declares " + std::to_string(shape.size()) +
                              " values, payload holds " + std::to_string(payload / elem));
    }
    std::vector<T> values(shape.size());
    const std::uint8_t* p = bytes.data() + detail::kHeaderBytes;
    for (std::size_t k = 0; k < values.size(); ++k, p += elem) {
        if constexpr (want == DType::class_index) {
            values[k] = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        } else {
            values[k] = static_cast<double>(std::bit_cast<float>(detail::get_u32(p)));
        }
    }
    return Grid<T>(shape, std::move(values));
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class T>
void grid_write(const Grid<T>& g, const std::filesystem::path& path) {
    const auto bytes = encode_grid(g);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError(FormatError::Kind::io, "write failed: " + path.string());
}

template <class T>
Grid<T> grid_read(const std::filesystem::path& path) {
    return decode_grid<T>(read_file_bytes(path));
}

}  // namespace chargrid
