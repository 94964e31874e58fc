#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gridauth {

// Injectable randomness source. mt19937_64 has a standard-mandated output
// sequence, so a fixed seed reproduces identical transcripts on any
// platform. Not a CSPRNG; the harness wants determinism, not entropy.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    void fill(std::uint8_t* out, std::size_t len) {
        std::size_t i = 0;
        while (i < len) {
            std::uint64_t v = eng_();
            for (int b = 7; b >= 0 && i < len; --b) out[i++] = std::uint8_t(v >> (8 * b));
        }
    }

    std::vector<std::uint8_t> bytes(std::size_t len) {
        std::vector<std::uint8_t> out(len);
        fill(out.data(), len);
        return out;
    }

    // A fresh bit string, one bit per element.
    std::vector<std::uint8_t> bits(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = std::uint8_t(eng_() & 1);
        return out;
    }

    // Uniform in [0, bound), bound > 0. Rejection from the low bits.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        std::uint64_t mask = ~std::uint64_t(0);
        if ((bound & (bound - 1)) == 0) return eng_() & (bound - 1);
        std::uint64_t limit = mask - mask % bound;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gridauth
