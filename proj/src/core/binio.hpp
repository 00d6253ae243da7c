#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "core/error.hpp"

// Little-endian scalar IO for the project's binary containers. Payload
// arrays are read in bulk and byte-swapped only on big-endian hosts.

namespace zscomp::binio {

inline void fail_short(const std::string& path) {
    raise(ErrorKind::format, "unexpected end of file in " + path);
}

inline void read_bytes(std::istream& in, void* dst, size_t n, const std::string& path) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) fail_short(path);
}

inline uint32_t read_u32(std::istream& in, const std::string& path) {
    uint8_t b[4];
    read_bytes(in, b, 4, path);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

inline uint64_t read_u64(std::istream& in, const std::string& path) {
    uint8_t b[8];
    read_bytes(in, b, 8, path);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | b[i];
    return v;
}

inline void read_f32_array(std::istream& in, float* dst, size_t count, const std::string& path) {
    read_bytes(in, dst, count * sizeof(float), path);
    if constexpr (std::endian::native == std::endian::big) {
        for (size_t i = 0; i < count; ++i) {
            uint32_t raw;
            std::memcpy(&raw, dst + i, 4);
            raw = __builtin_bswap32(raw);
            std::memcpy(dst + i, &raw, 4);
        }
    }
}

inline std::string read_string(std::istream& in, const std::string& path) {
    uint32_t len = read_u32(in, path);
    if (len > (1u << 20)) raise(ErrorKind::format, "label length out of range in " + path);
    std::string s(len, '\0');
    if (len) read_bytes(in, s.data(), len, path);
    return s;
}

inline void write_bytes(std::ostream& out, const void* src, size_t n) {
    out.write(static_cast<const char*>(src), static_cast<std::streamsize>(n));
}

inline void write_u32(std::ostream& out, uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    write_bytes(out, b, 4);
}

inline void write_u64(std::ostream& out, uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
    write_bytes(out, b, 8);
}

inline void write_f32_array(std::ostream& out, const float* src, size_t count) {
    if constexpr (std::endian::native == std::endian::big) {
        std::vector<float> tmp(src, src + count);
        for (size_t i = 0; i < count; ++i) {
            uint32_t raw;
            std::memcpy(&raw, &tmp[i], 4);
            raw = __builtin_bswap32(raw);
            std::memcpy(&tmp[i], &raw, 4);
        }
        write_bytes(out, tmp.data(), count * sizeof(float));
    } else {
        write_bytes(out, src, count * sizeof(float));
    }
}

inline void write_string(std::ostream& out, std::string_view s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io, "cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorKind::io, "cannot open " + path + " for writing");
    return out;
}

inline void check_magic(std::istream& in, const char expect[4], const std::string& path) {
    char m[4];
    read_bytes(in, m, 4, path);
    if (std::memcmp(m, expect, 4) != 0)
        raise(ErrorKind::format, path + " is not a " + std::string(expect, 4) + " file");
}

inline void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) raise(ErrorKind::io, "failed writing " + path);
}

} // namespace zscomp::binio
