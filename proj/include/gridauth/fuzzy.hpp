#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridauth/bytes.hpp"
#include "gridauth/hash.hpp"
#include "gridauth/result.hpp"
#include "gridauth/rng.hpp"

namespace gridauth {

// Code-offset fuzzy extractor: a rho-fold repetition code plus hash
// extraction. gen() enrolls a noisy template into a stable 32-octet key
// and public helper data; rep() reproduces the key from any reading
// within floor((rho-1)/2) bit flips per rho-bit block.

struct FeParams {
    std::size_t n = 640;  // template length in bits, n = rho * k
    std::size_t k = 128;  // secret length in bits
    std::size_t rho = 5;  // repetition factor

    bool valid() const { return k > 0 && rho > 0 && n == k * rho; }
    std::size_t block_tolerance() const { return (rho - 1) / 2; }
    bool operator==(const FeParams&) const = default;
};

// One bit per element, values 0/1.
using BitString = std::vector<std::uint8_t>;

struct BiometricTemplate {
    BitString bits;
};

struct HelperData {
    BitString sketch;  // template XOR codeword, length n
    FeParams params;
};

struct BiometricKey {
    Bytes32 sigma{};
    bool operator==(const BiometricKey&) const = default;
};

namespace fedetail {

// MSB-first bit packing; the secret length k fixes the layout.
inline std::vector<std::uint8_t> pack_bits(const BitString& bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out[i / 8] |= std::uint8_t(0x80u >> (i % 8));
    }
    return out;
}

inline BitString repetition_encode(const BitString& w, std::size_t rho) {
    BitString out;
    out.reserve(w.size() * rho);
    for (std::uint8_t bit : w) out.insert(out.end(), rho, bit);
    return out;
}

inline BitString majority_decode(const BitString& codeword, std::size_t k, std::size_t rho) {
    BitString w(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < rho; ++j) ones += codeword[i * rho + j];
        w[i] = ones * 2 > rho ? 1 : 0;
    }
    return w;
}

inline BitString xor_bits(const BitString& a, const BitString& b) {
    BitString out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

inline BiometricKey extract(const BitString& w) {
    return BiometricKey{hash(pack_bits(w))};
}

}  // namespace fedetail

// Gen: sample a fresh k-bit secret w, publish sketch = B XOR C(w), keep
// sigma = h(w).
inline Result<std::pair<BiometricKey, HelperData>> gen(const BiometricTemplate& b,
                                                       const FeParams& params, Rng& rng) {
    if (!params.valid() || b.bits.size() != params.n) return Err::BadTemplateLength;
    count_rng_draw();
    BitString w = rng.bits(params.k);
    BitString codeword = fedetail::repetition_encode(w, params.rho);
    HelperData helper{fedetail::xor_bits(b.bits, codeword), params};
    return std::make_pair(fedetail::extract(w), std::move(helper));
}

// Rep: offset the reading by the sketch and majority-decode each block.
// Excess noise is not an error here; it yields a different key, which the
// protocol's stored-verifier check catches.
inline Result<BiometricKey> rep(const BiometricTemplate& noisy, const HelperData& helper) {
    const FeParams& params = helper.params;
    if (!params.valid() || noisy.bits.size() != params.n ||
        helper.sketch.size() != params.n)
        return Err::BadTemplateLength;
    BitString codeword = fedetail::xor_bits(noisy.bits, helper.sketch);
    BitString w = fedetail::majority_decode(codeword, params.k, params.rho);
    return fedetail::extract(w);
}

// Hex I/O for templates and sketches: n/4 digits, MSB-first.
inline Result<std::string> bits_to_hex(const BitString& bits) {
    if (bits.size() % 4 != 0) return Err::WidthMismatch;
    std::string out;
    out.reserve(bits.size() / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned v = unsigned(bits[i] << 3 | bits[i + 1] << 2 | bits[i + 2] << 1 | bits[i + 3]);
        out.push_back(hexdetail::nibble_char(v));
    }
    return out;
}

inline Result<BitString> bits_from_hex(const std::string& hex) {
    BitString out;
    out.reserve(hex.size() * 4);
    for (char ch : hex) {
        int v = hexdetail::nibble_val(ch);
        if (v < 0) return Err::WidthMismatch;
        for (int b = 3; b >= 0; --b) out.push_back(std::uint8_t((v >> b) & 1));
    }
    return out;
}

}  // namespace gridauth
