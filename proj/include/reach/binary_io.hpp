#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "reach/error.hpp"

namespace reach::io {

static_assert(std::endian::native == std::endian::little,
              "binary model files are written in little-endian byte order");

template <typename T>
    requires std::is_arithmetic_v<T>
void write(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
    requires std::is_arithmetic_v<T>
T read(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw FormatError("unexpected end of binary stream");
    return value;
}

void write_string(std::ostream& out, const std::string& s);
std::string read_string(std::istream& in);

/// Reads a fixed magic tag and throws FormatError on mismatch.
void expect_magic(std::istream& in, const char (&magic)[8]);

/// 64-bit FNV-1a digest, used for dataset and config fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(const std::string& s);
std::string hex_digest(std::uint64_t h);

} // namespace reach::io
