#include "reach/binary_io.hpp"

#include <cstdio>
#include <cstring>

#include "reach/vector_set.hpp"

namespace reach {

VectorSet::VectorSet(int dim) : dim_(dim) {
    if (dim <= 0) throw InvalidArgument("vector dimension must be positive");
}

VectorSet::VectorSet(int dim, std::initializer_list<std::initializer_list<double>> rows) : VectorSet(dim) {
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != dim) throw DimensionError("row length does not match dimension");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

void VectorSet::push_back(std::span<const double> v) {
    if (static_cast<int>(v.size()) != dim_)
        throw DimensionError("expected dimension " + std::to_string(dim_) + ", got " + std::to_string(v.size()));
    data_.insert(data_.end(), v.begin(), v.end());
}

namespace io {

void write_string(std::ostream& out, const std::string& s) {
    write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read<std::uint32_t>(in);
    if (n > (1u << 20)) throw FormatError("string field too long");
    std::string s(n, '\0');
    if (!in.read(s.data(), n)) throw FormatError("unexpected end of binary stream");
    return s;
}

void expect_magic(std::istream& in, const char (&magic)[8]) {
    char buf[8];
    if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0)
        throw FormatError(std::string("bad magic, expected ") + std::string(magic, 7));
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
    auto h = seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hex_digest(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace io
} // namespace reach
