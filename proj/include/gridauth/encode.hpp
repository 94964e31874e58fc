#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridauth/curve.hpp"
#include "gridauth/hash.hpp"
#include "gridauth/uint256.hpp"

namespace gridauth {

// Normalization of heterogeneous operands to the fixed W = 32 octet
// width, so identities, timestamps, scalars and points can be XORed and
// concatenated without length ambiguity. These digests are encoding
// plumbing, not protocol h(.) calls, and stay out of the hash counters.

inline Bytes32 encode_to32(const std::string& identity) {
    return sha256(reinterpret_cast<const std::uint8_t*>(identity.data()), identity.size());
}

// Timestamps and counters: unsigned 64-bit big-endian, left-padded.
inline Bytes32 encode_to32(std::uint64_t v) {
    Bytes32 out{};
    for (int i = 0; i < 8; ++i) out[24 + i] = std::uint8_t(v >> (8 * (7 - i)));
    return out;
}

inline Bytes32 encode_to32(const U256& v) { return u256_to_be(v); }

inline Bytes32 encode_to32(const Scalar& s) { return u256_to_be(s.v); }

inline Bytes32 encode_to32(const Point& pt) {
    if (pt.is_identity()) {
        static const std::string tag = "gridauth:point-at-infinity";
        return sha256(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size());
    }
    std::vector<std::uint8_t> buf;
    buf.reserve(2 * kWidth);
    Bytes32 xb = u256_to_be(pt.x);
    Bytes32 yb = u256_to_be(pt.y);
    buf.insert(buf.end(), xb.begin(), xb.end());
    buf.insert(buf.end(), yb.begin(), yb.end());
    return sha256(buf);
}

}  // namespace gridauth
