#pragma once

// Feature vector interchange: CSV with one value per line, or a binary file
// holding a little-endian uint64 count followed by that many little-endian
// IEEE-754 doubles.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "image_io.hpp"

namespace gradpres {

namespace detail {

template <class T>
T to_little_endian(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

} // namespace detail

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_features_csv(const std::filesystem::path& path, std::span<const double> values) {
    write_atomically(path, [&](const std::filesystem::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp.string(), "cannot open for writing");
        for (double v : values) out << format_double(v) << '\n';
        if (!out) throw IoError(tmp.string(), "write failed");
    });
}

inline void write_features_binary(const std::filesystem::path& path,
                                  std::span<const double> values) {
    write_atomically(path, [&](const std::filesystem::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp.string(), "cannot open for writing");
        const auto n = detail::to_little_endian(std::uint64_t(values.size()));
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        for (double v : values) {
            const auto bits = detail::to_little_endian(std::bit_cast<std::uint64_t>(v));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
        if (!out) throw IoError(tmp.string(), "write failed");
    });
}

inline std::vector<double> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t used = 0;
        try {
            values.push_back(std::stod(line, &used));
        } catch (const std::exception&) {
            throw IoError(path.string(), "bad CSV value '" + line + "'");
        }
        if (used != line.size() && line.find_first_not_of(" \r\t", used) != std::string::npos) {
            throw IoError(path.string(), "bad CSV value '" + line + "'");
        }
    }
    return values;
}

inline std::vector<double> read_features_binary(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() < 8) throw IoError(path.string(), "missing length prefix");
    std::uint64_t n = 0;
    std::memcpy(&n, bytes.data(), 8);
    n = detail::to_little_endian(n);
    if ((bytes.size() - 8) / 8 != n || (bytes.size() - 8) % 8 != 0) {
        throw IoError(path.string(), "length prefix " + std::to_string(n) +
                                         " does not match payload of " +
                                         std::to_string(bytes.size() - 8) + " bytes");
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes.data() + 8 + 8 * i, 8);
        values[i] = std::bit_cast<double>(detail::to_little_endian(bits));
    }
    return values;
}

/// Dispatches on extension: .bin is binary, anything else is CSV.
inline void write_features(const std::filesystem::path& path, std::span<const double> values) {
    if (path.extension() == ".bin") {
        write_features_binary(path, values);
    } else {
        write_features_csv(path, values);
    }
}

} // namespace gradpres
