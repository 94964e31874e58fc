#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "gridauth/bytes.hpp"
#include "gridauth/counters.hpp"

namespace gridauth {

// Raw SHA-256 digest. Encoding-layer uses; not counted as a protocol hash.
inline Bytes32 sha256(const std::uint8_t* data, std::size_t len) {
    Bytes32 out{};
    unsigned int n = kWidth;
    EVP_Digest(data, len, out.data(), &n, EVP_sha256(), nullptr);
    return out;
}

inline Bytes32 sha256(const std::vector<std::uint8_t>& data) {
    return sha256(data.data(), data.size());
}

// The protocol's one-way function h(.). Every invocation that appears in
// a protocol formula goes through here so the cost reports match a
// by-hand enumeration of those formulas.
inline Bytes32 hash(const std::uint8_t* data, std::size_t len) {
    count_hash();
    return sha256(data, len);
}

inline Bytes32 hash(const std::vector<std::uint8_t>& data) {
    return hash(data.data(), data.size());
}

// h over the concatenation of fixed-width fields. Concatenation is plain
// byte juxtaposition; with every operand already W octets wide there is
// no length ambiguity.
inline Bytes32 hash_fields(std::initializer_list<const Bytes32*> fields) {
    std::vector<std::uint8_t> buf;
    buf.reserve(fields.size() * kWidth);
    for (const Bytes32* f : fields) buf.insert(buf.end(), f->begin(), f->end());
    return hash(buf);
}

}  // namespace gridauth
