#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "structhash/pipeline.hpp"

namespace structhash {

// Parse/format failures carry enough context to locate the bad bytes.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

inline void put_u64_le(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline std::uint32_t get_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ParseError("hash file truncated");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

inline std::uint64_t get_u64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw ParseError("hash file truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

}  // namespace detail

// SHSH hash file, little-endian: magic "SHSH", version u32 = 1, k u32,
// count u64, then count records of ceil(k/64) words each. Bit i of a record
// is the sign bit of hash coordinate i; padding bits are zero.
inline void write_hashes(const std::string& path, const std::vector<BinaryHash>& hashes,
                         std::size_t k) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out.write("SHSH", 4);
    detail::put_u32_le(out, 1);
    detail::put_u32_le(out, static_cast<std::uint32_t>(k));
    detail::put_u64_le(out, static_cast<std::uint64_t>(hashes.size()));
    for (const auto& h : hashes) {
        if (h.k != k) throw std::invalid_argument("write_hashes: inconsistent hash size");
        for (auto w : h.words) detail::put_u64_le(out, w);
    }
    if (!out) throw ParseError("write failed: " + path);
}

inline std::vector<BinaryHash> read_hashes(const std::string& path, std::size_t* k_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "SHSH")
        throw ParseError("bad magic in " + path + " (expected SHSH)");
    const std::uint32_t version = detail::get_u32_le(in);
    if (version != 1)
        throw ParseError("unsupported hash file version " + std::to_string(version));
    const std::uint32_t k = detail::get_u32_le(in);
    const std::uint64_t count = detail::get_u64_le(in);
    const std::size_t words = BinaryHash::words_for(k);
    std::vector<BinaryHash> hashes(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        hashes[i].k = k;
        hashes[i].words.resize(words);
        for (std::size_t w = 0; w < words; ++w) hashes[i].words[w] = detail::get_u64_le(in);
    }
    if (k_out) *k_out = k;
    return hashes;
}

}  // namespace structhash
