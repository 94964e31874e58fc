#include <doctest.h>

#include <algorithm>

#include "gridauth/fuzzy.hpp"
#include "gridauth/rng.hpp"

using namespace gridauth;

namespace {

// Exhaustive maximum-likelihood decoder: tries every k-bit secret and
// keeps the codeword closest to the offset. Independent of the library's
// majority-vote path.
BitString ml_decode(const BitString& codeword, std::size_t k, std::size_t rho) {
    BitString best;
    std::size_t best_dist = SIZE_MAX;
    for (std::size_t cand = 0; cand < (std::size_t(1) << k); ++cand) {
        BitString w(k);
        for (std::size_t i = 0; i < k; ++i) w[i] = (cand >> (k - 1 - i)) & 1;
        std::size_t dist = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < rho; ++j) dist += codeword[i * rho + j] != w[i];
        if (dist < best_dist) {
            best_dist = dist;
            best = w;
        }
    }
    return best;
}

BitString apply_error(const BitString& b, std::size_t pattern) {
    BitString out = b;
    for (std::size_t i = 0; i < out.size(); ++i)
        if ((pattern >> i) & 1) out[i] ^= 1;
    return out;
}

}  // namespace

TEST_CASE("gen then rep on the identical template returns the same key") {
    FeParams fe{640, 128, 5};
    Rng rng(701);
    for (int i = 0; i < 20; ++i) {
        BiometricTemplate b{rng.bits(fe.n)};
        auto enrolled = gen(b, fe, rng);
        REQUIRE(enrolled.ok());
        auto back = rep(b, enrolled.value().second);
        REQUIRE(back.ok());
        CHECK(back.value() == enrolled.value().first);
    }
}

TEST_CASE("exhaustive error patterns at n = 12 track the per-block bound") {
    FeParams fe{12, 4, 3};
    Rng rng(702);
    BiometricTemplate b{rng.bits(fe.n)};
    auto enrolled = gen(b, fe, rng);
    REQUIRE(enrolled.ok());
    const BiometricKey& sigma = enrolled.value().first;
    const HelperData& helper = enrolled.value().second;

    for (std::size_t pattern = 0; pattern < (1u << 12); ++pattern) {
        std::size_t worst_block = 0;
        for (std::size_t blk = 0; blk < fe.k; ++blk) {
            std::size_t flips = 0;
            for (std::size_t j = 0; j < fe.rho; ++j) flips += (pattern >> (blk * fe.rho + j)) & 1;
            worst_block = std::max(worst_block, flips);
        }

        BiometricTemplate noisy{apply_error(b.bits, pattern)};
        auto key = rep(noisy, helper);
        REQUIRE(key.ok());

        if (worst_block <= fe.block_tolerance()) {
            // Within tolerance: both the library and the ML oracle recover sigma.
            CHECK(key.value() == sigma);
            BitString offset = fedetail::xor_bits(noisy.bits, helper.sketch);
            CHECK(fedetail::extract(ml_decode(offset, fe.k, fe.rho)) == sigma);
        } else {
            // With rho = 3, two flips in a block always outvote the true bit.
            CHECK(!(key.value() == sigma));
        }
    }
}

TEST_CASE("randomized wide-template recovery inside tolerance") {
    FeParams fe{640, 128, 5};
    Rng rng(703);
    for (int trial = 0; trial < 300; ++trial) {
        BiometricTemplate b{rng.bits(fe.n)};
        auto enrolled = gen(b, fe, rng);
        REQUIRE(enrolled.ok());

        BiometricTemplate noisy = b;
        for (std::size_t blk = 0; blk < fe.k; ++blk) {
            std::size_t flips = rng.below(fe.block_tolerance() + 1);
            for (std::size_t f = 0; f < flips; ++f)
                noisy.bits[blk * fe.rho + rng.below(fe.rho)] ^= 1;
        }
        auto key = rep(noisy, enrolled.value().second);
        REQUIRE(key.ok());
        CHECK(key.value() == enrolled.value().first);
    }
}

TEST_CASE("a block beyond tolerance flips the decoded bit") {
    FeParams fe{640, 128, 5};
    Rng rng(704);
    BiometricTemplate b{rng.bits(fe.n)};
    auto enrolled = gen(b, fe, rng);
    REQUIRE(enrolled.ok());

    // Three distinct flips in one rho=5 block defeat the majority.
    BiometricTemplate noisy = b;
    noisy.bits[0] ^= 1;
    noisy.bits[1] ^= 1;
    noisy.bits[2] ^= 1;
    auto key = rep(noisy, enrolled.value().second);
    REQUIRE(key.ok());
    CHECK(!(key.value() == enrolled.value().first));
}

TEST_CASE("gen and rep are deterministic functions of their inputs") {
    FeParams fe{60, 12, 5};
    Rng seeder(710);
    BiometricTemplate b{seeder.bits(fe.n)};

    Rng r1(99), r2(99);
    auto a = gen(b, fe, r1);
    auto c = gen(b, fe, r2);
    REQUIRE(a.ok());
    REQUIRE(c.ok());
    CHECK(a.value().first == c.value().first);
    CHECK(a.value().second.sketch == c.value().second.sketch);

    auto k1 = rep(b, a.value().second);
    auto k2 = rep(b, a.value().second);
    REQUIRE(k1.ok());
    CHECK(k1.value() == k2.value());
}

TEST_CASE("fresh randomness gives fresh helper data") {
    FeParams fe{60, 12, 5};
    Rng rng(705);
    BiometricTemplate b{rng.bits(fe.n)};
    auto first = gen(b, fe, rng);
    auto second = gen(b, fe, rng);
    REQUIRE(first.ok());
    REQUIRE(second.ok());
    CHECK(first.value().second.sketch != second.value().second.sketch);
}

TEST_CASE("all-zero template exposes the raw codeword") {
    FeParams fe{12, 4, 3};
    Rng rng(706);
    BiometricTemplate zero{BitString(fe.n, 0)};
    auto enrolled = gen(zero, fe, rng);
    REQUIRE(enrolled.ok());
    const BitString& sketch = enrolled.value().second.sketch;
    // sketch = 0 XOR C(w): every block is constant.
    for (std::size_t blk = 0; blk < fe.k; ++blk)
        for (std::size_t j = 1; j < fe.rho; ++j)
            CHECK(sketch[blk * fe.rho + j] == sketch[blk * fe.rho]);
    // And it decodes back to the enrolled key.
    CHECK(rep(zero, enrolled.value().second).value() == enrolled.value().first);
}

TEST_CASE("length and parameter validation") {
    FeParams fe{640, 128, 5};
    Rng rng(707);
    BiometricTemplate short_b{rng.bits(639)};
    auto bad = gen(short_b, fe, rng);
    REQUIRE(!bad.ok());
    CHECK(bad.error() == Err::BadTemplateLength);

    BiometricTemplate b{rng.bits(fe.n)};
    auto enrolled = gen(b, fe, rng);
    REQUIRE(enrolled.ok());
    BiometricTemplate wrong{rng.bits(641)};
    auto r = rep(wrong, enrolled.value().second);
    REQUIRE(!r.ok());
    CHECK(r.error() == Err::BadTemplateLength);

    FeParams inconsistent{640, 128, 4};  // 128*4 != 640
    auto g = gen(b, inconsistent, rng);
    REQUIRE(!g.ok());
    CHECK(g.error() == Err::BadTemplateLength);
}

TEST_CASE("sketch bits look balanced over many enrollments") {
    FeParams fe{640, 128, 5};
    Rng rng(708);
    BiometricTemplate b{rng.bits(fe.n)};
    std::size_t ones = 0, total = 0;
    for (int i = 0; i < 200; ++i) {
        auto enrolled = gen(b, fe, rng);
        REQUIRE(enrolled.ok());
        for (auto bit : enrolled.value().second.sketch) ones += bit;
        total += fe.n;
    }
    double frac = double(ones) / double(total);
    CHECK(frac > 0.47);
    CHECK(frac < 0.53);
}

TEST_CASE("template hex io round trips") {
    Rng rng(709);
    for (int i = 0; i < 50; ++i) {
        BitString bits = rng.bits(4 * (1 + rng.below(200)));
        auto hex = bits_to_hex(bits);
        REQUIRE(hex.ok());
        CHECK(hex.value().size() == bits.size() / 4);
        auto back = bits_from_hex(hex.value());
        REQUIRE(back.ok());
        CHECK(back.value() == bits);
    }
    CHECK(!bits_to_hex(BitString(13, 0)).ok());
    CHECK(!bits_from_hex("0g").ok());
}
