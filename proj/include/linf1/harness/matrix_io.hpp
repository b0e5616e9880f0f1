#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "linf1/matrix.hpp"

namespace linf1::harness {

enum class MatrixFormat { csv, raw };

/// Malformed matrix file. The message carries the path and line or byte
/// offset of the problem.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kRawMagic[4] = {'L', '1', 'I', 'N'};
inline constexpr std::size_t kRawHeaderBytes = 4 + 2 * sizeof(std::uint64_t);

/// ".csv" (any case) selects CSV, everything else the raw binary format.
inline MatrixFormat format_from_path(const std::string& path)
{
    if (path.size() >= 4) {
        std::string ext = path.substr(path.size() - 4);
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".csv") return MatrixFormat::csv;
    }
    return MatrixFormat::raw;
}

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) noexcept
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// One row per line, comma-separated decimal floats, no header.
inline Matrix parse_csv(std::string_view text, const std::string& origin = "<csv>")
{
    std::vector<double> data;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        std::size_t count = 0;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            std::string_view field =
                line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - start);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
                field.remove_prefix(1);
            }
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
                field.remove_suffix(1);
            }
            if (!field.empty() && field.front() == '+') field.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
                !std::isfinite(v)) {
                throw ParseError(origin + ":" + std::to_string(line_no) + ": bad number '" +
                                 std::string(field) + "' in column " + std::to_string(count + 1));
            }
            data.push_back(v);
            ++count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " columns, found " + std::to_string(count));
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(origin + ": no data rows");
    return Matrix(rows, cols, std::move(data));
}

/// Values are written with 17 significant digits, enough to round-trip.
inline std::string format_csv(const Matrix& A)
{
    std::string out;
    char buf[32];
    for (std::size_t m = 0; m < A.rows(); ++m) {
        for (std::size_t i = 0; i < A.cols(); ++i) {
            const int n = std::snprintf(buf, sizeof buf, "%.17g", A(m, i));
            if (i) out.push_back(',');
            out.append(buf, static_cast<std::size_t>(n));
        }
        out.push_back('\n');
    }
    return out;
}

/// "L1IN", rows and cols as little-endian u64, then rows*cols little-endian
/// IEEE-754 doubles in row-major order.
inline Matrix parse_raw(std::string_view bytes, const std::string& origin = "<raw>")
{
    if (bytes.size() < kRawHeaderBytes) {
        throw ParseError(origin + ": truncated header (" + std::to_string(bytes.size()) + " bytes)");
    }
    if (std::memcmp(bytes.data(), kRawMagic, 4) != 0) {
        throw ParseError(origin + ": bad magic at offset 0, expected \"L1IN\"");
    }
    std::uint64_t dims[2];
    std::memcpy(dims, bytes.data() + 4, sizeof dims);
    const std::uint64_t rows = detail::to_le(dims[0]);
    const std::uint64_t cols = detail::to_le(dims[1]);
    constexpr std::uint64_t max_elems = std::numeric_limits<std::size_t>::max() / sizeof(double);
    if (rows != 0 && cols > max_elems / rows) {
        throw std::invalid_argument(origin + ": dimensions " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " overflow");
    }
    const std::uint64_t n = rows * cols;
    const std::size_t payload = bytes.size() - kRawHeaderBytes;
    if (payload != n * sizeof(double)) {
        throw ParseError(origin + ": payload at offset " + std::to_string(kRawHeaderBytes) +
                         " has " + std::to_string(payload) + " bytes, header implies " +
                         std::to_string(n * sizeof(double)));
    }
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t w;
        std::memcpy(&w, bytes.data() + kRawHeaderBytes + i * 8, 8);
        data[i] = std::bit_cast<double>(detail::to_le(w));
    }
    return Matrix(rows, cols, std::move(data));
}

inline std::string format_raw(const Matrix& A)
{
    std::string out(kRawHeaderBytes + A.size() * 8, '\0');
    std::memcpy(out.data(), kRawMagic, 4);
    const std::uint64_t dims[2] = {detail::to_le(A.rows()), detail::to_le(A.cols())};
    std::memcpy(out.data() + 4, dims, sizeof dims);
    const auto d = A.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::uint64_t w = detail::to_le(std::bit_cast<std::uint64_t>(d[i]));
        std::memcpy(out.data() + kRawHeaderBytes + i * 8, &w, 8);
    }
    return out;
}

inline Matrix read_matrix(const std::string& path, MatrixFormat format)
{
    const std::string bytes = detail::read_file(path);
    return format == MatrixFormat::csv ? parse_csv(bytes, path) : parse_raw(bytes, path);
}

inline Matrix read_matrix(const std::string& path) { return read_matrix(path, format_from_path(path)); }

inline void write_matrix(const std::string& path, const Matrix& A, MatrixFormat format)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const std::string bytes = format == MatrixFormat::csv ? format_csv(A) : format_raw(A);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_matrix(const std::string& path, const Matrix& A)
{
    write_matrix(path, A, format_from_path(path));
}

}  // namespace linf1::harness
