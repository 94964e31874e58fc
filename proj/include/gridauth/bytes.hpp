#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "gridauth/counters.hpp"
#include "gridauth/result.hpp"

namespace gridauth {

// All masked protocol values are fixed at W = 32 octets. Heterogeneous
// operands (identities, timestamps, scalars, points) are normalized to
// this width before any XOR combination.
inline constexpr std::size_t kWidth = 32;

using Bytes32 = std::array<std::uint8_t, kWidth>;

inline Bytes32 zero32() { return Bytes32{}; }

// Octet-wise exclusive-or of two W-wide values. The width mismatch case
// is unrepresentable by type; combining anything else goes through
// encode_to32 first.
inline Bytes32 xor32(const Bytes32& a, const Bytes32& b) {
    count_xor();
    Bytes32 out;
    for (std::size_t i = 0; i < kWidth; ++i) out[i] = a[i] ^ b[i];
    return out;
}

namespace hexdetail {

inline char nibble_char(unsigned v) { return v < 10 ? char('0' + v) : char('a' + v - 10); }

inline int nibble_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace hexdetail

inline std::string to_hex(const std::uint8_t* data, std::size_t len) {
    std::string s;
    s.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(hexdetail::nibble_char(data[i] >> 4));
        s.push_back(hexdetail::nibble_char(data[i] & 0x0f));
    }
    return s;
}

inline std::string to_hex(const Bytes32& b) { return to_hex(b.data(), b.size()); }

inline std::string to_hex(const std::vector<std::uint8_t>& v) { return to_hex(v.data(), v.size()); }

inline Result<std::vector<std::uint8_t>> bytes_from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) return Err::WidthMismatch;
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hexdetail::nibble_val(hex[2 * i]);
        int lo = hexdetail::nibble_val(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return Err::WidthMismatch;
        out[i] = std::uint8_t((hi << 4) | lo);
    }
    return out;
}

inline Result<Bytes32> bytes32_from_hex(const std::string& hex) {
    auto v = bytes_from_hex(hex);
    if (!v) return v.error();
    if (v.value().size() != kWidth) return Err::WidthMismatch;
    Bytes32 out;
    std::memcpy(out.data(), v.value().data(), kWidth);
    return out;
}

// 64-bit big-endian, used for timestamps and counters on the wire.
inline void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline std::uint64_t get_u64_be(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

}  // namespace gridauth
