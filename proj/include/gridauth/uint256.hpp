#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <string>

#include "gridauth/bytes.hpp"
#include "gridauth/result.hpp"

namespace gridauth {

// Fixed-width unsigned integers backing the field and group arithmetic.
// Little-endian 64-bit limbs; big-endian only at the byte/hex boundary.

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct U256 {
    std::array<u64, 4> w{};

    static U256 from_u64(u64 v) {
        U256 r;
        r.w[0] = v;
        return r;
    }
    bool is_zero() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }
    bool operator==(const U256&) const = default;
};

struct U512 {
    std::array<u64, 8> w{};

    bool is_zero() const {
        u64 acc = 0;
        for (u64 v : w) acc |= v;
        return acc == 0;
    }
    bool operator==(const U512&) const = default;
};

inline int cmp(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
        if (a.w[i] != b.w[i]) return a.w[i] < b.w[i] ? -1 : 1;
    }
    return 0;
}

inline bool operator<(const U256& a, const U256& b) { return cmp(a, b) < 0; }

// out = a + b, returns carry out of bit 255.
inline bool add_carry(const U256& a, const U256& b, U256& out) {
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = (u128)a.w[i] + b.w[i] + c;
        out.w[i] = (u64)s;
        c = s >> 64;
    }
    return c != 0;
}

// out = a - b (mod 2^256), returns borrow.
inline bool sub_borrow(const U256& a, const U256& b, U256& out) {
    i128 bw = 0;
    for (int i = 0; i < 4; ++i) {
        i128 d = (i128)a.w[i] - b.w[i] - bw;
        out.w[i] = (u64)d;
        bw = d < 0 ? 1 : 0;
    }
    return bw != 0;
}

inline U512 widen(const U256& a) {
    U512 r;
    for (int i = 0; i < 4; ++i) r.w[i] = a.w[i];
    return r;
}

// Schoolbook 4x4 limb product.
inline U512 mul(const U256& a, const U256& b) {
    U512 r;
    for (int i = 0; i < 4; ++i) {
        u128 carry = 0;
        for (int j = 0; j < 4; ++j) {
            u128 cur = (u128)a.w[i] * b.w[j] + r.w[i + j] + carry;
            r.w[i + j] = (u64)cur;
            carry = cur >> 64;
        }
        r.w[i + 4] = (u64)carry;
    }
    return r;
}

inline U512 add512(const U512& a, const U512& b) {
    U512 r;
    u128 c = 0;
    for (int i = 0; i < 8; ++i) {
        u128 s = (u128)a.w[i] + b.w[i] + c;
        r.w[i] = (u64)s;
        c = s >> 64;
    }
    return r;
}

struct DivMod {
    U512 quotient;
    U256 remainder;
};

// Long division of an up-to-512-bit dividend by a nonzero up-to-256-bit
// divisor: single-limb short division, otherwise Knuth algorithm D with
// 64-bit limbs and 128-bit intermediates.
inline DivMod divmod(const U512& u, const U256& v) {
    assert(!v.is_zero());
    DivMod out;

    int n = 4;
    while (n > 1 && v.w[n - 1] == 0) --n;
    constexpr int m = 8;

    if (n == 1) {
        const u64 d = v.w[0];
        u64 rem = 0;
        for (int i = m - 1; i >= 0; --i) {
            u128 cur = ((u128)rem << 64) | u.w[i];
            out.quotient.w[i] = (u64)(cur / d);
            rem = (u64)(cur % d);
        }
        out.remainder.w[0] = rem;
        return out;
    }

    u64 un[m + 1];
    u64 vn[4];
    const int s = std::countl_zero(v.w[n - 1]);
    if (s > 0) {
        for (int i = n - 1; i > 0; --i) vn[i] = (v.w[i] << s) | (v.w[i - 1] >> (64 - s));
        vn[0] = v.w[0] << s;
        un[m] = u.w[m - 1] >> (64 - s);
        for (int i = m - 1; i > 0; --i) un[i] = (u.w[i] << s) | (u.w[i - 1] >> (64 - s));
        un[0] = u.w[0] << s;
    } else {
        for (int i = 0; i < n; ++i) vn[i] = v.w[i];
        for (int i = 0; i < m; ++i) un[i] = u.w[i];
        un[m] = 0;
    }

    constexpr u128 kBase = (u128)1 << 64;
    for (int j = m - n; j >= 0; --j) {
        u128 num = ((u128)un[j + n] << 64) | un[j + n - 1];
        u128 qhat = num / vn[n - 1];
        u128 rhat = num % vn[n - 1];

        while (qhat >= kBase ||
               (u128)(u64)qhat * vn[n - 2] > ((rhat << 64) | un[j + n - 2])) {
            qhat -= 1;
            rhat += vn[n - 1];
            if (rhat >= kBase) break;
        }

        i128 k = 0;
        i128 t = 0;
        for (int i = 0; i < n; ++i) {
            u128 p = (u128)(u64)qhat * vn[i];
            t = (i128)un[i + j] - k - (i128)(u64)p;
            un[i + j] = (u64)t;
            k = (i128)(u64)(p >> 64) - (t >> 64);
        }
        t = (i128)un[j + n] - k;
        un[j + n] = (u64)t;

        out.quotient.w[j] = (u64)qhat;
        if (t < 0) {
            out.quotient.w[j] -= 1;
            u128 carry = 0;
            for (int i = 0; i < n; ++i) {
                u128 sum = (u128)un[i + j] + vn[i] + carry;
                un[i + j] = (u64)sum;
                carry = sum >> 64;
            }
            un[j + n] = (u64)((u128)un[j + n] + carry);
        }
    }

    if (s > 0) {
        for (int i = 0; i < n - 1; ++i)
            out.remainder.w[i] = (un[i] >> s) | (un[i + 1] << (64 - s));
        out.remainder.w[n - 1] = un[n - 1] >> s;
    } else {
        for (int i = 0; i < n; ++i) out.remainder.w[i] = un[i];
    }
    return out;
}

inline U256 mod512(const U512& a, const U256& m) { return divmod(a, m).remainder; }

inline U256 mod(const U256& a, const U256& m) {
    if (cmp(a, m) < 0) return a;
    return mod512(widen(a), m);
}

// Modular helpers; operands already reduced below m.
inline U256 mod_add(const U256& a, const U256& b, const U256& m) {
    U256 s;
    bool carry = add_carry(a, b, s);
    if (carry || cmp(s, m) >= 0) {
        U256 r;
        sub_borrow(s, m, r);
        return r;
    }
    return s;
}

inline U256 mod_sub(const U256& a, const U256& b, const U256& m) {
    U256 d;
    bool borrow = sub_borrow(a, b, d);
    if (borrow) {
        U256 r;
        add_carry(d, m, r);
        return r;
    }
    return d;
}

inline U256 mod_mul(const U256& a, const U256& b, const U256& m) {
    return mod512(mul(a, b), m);
}

inline int bit_length(const U256& a) {
    for (int i = 3; i >= 0; --i) {
        if (a.w[i] != 0) return 64 * i + (64 - std::countl_zero(a.w[i]));
    }
    return 0;
}

inline bool test_bit(const U256& a, int i) {
    return (a.w[i / 64] >> (i % 64)) & 1;
}

inline U256 mod_pow(const U256& base, const U256& exp, const U256& m) {
    U256 result = U256::from_u64(1);
    result = mod(result, m);  // m == 1 collapses everything to 0
    U256 b = mod(base, m);
    for (int i = bit_length(exp) - 1; i >= 0; --i) {
        result = mod_mul(result, result, m);
        if (test_bit(exp, i)) result = mod_mul(result, b, m);
    }
    return result;
}

// Inverse modulo a prime via Fermat: a^(p-2) mod p.
inline U256 mod_inv_prime(const U256& a, const U256& p) {
    U256 pm2;
    sub_borrow(p, U256::from_u64(2), pm2);
    return mod_pow(a, pm2, p);
}

// Miller-Rabin with the first twelve prime bases. Deterministic for all
// 64-bit inputs, overwhelming confidence at 256 bits.
inline bool is_probable_prime(const U256& n) {
    static constexpr u64 kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (cmp(n, U256::from_u64(2)) < 0) return false;
    for (u64 b : kBases) {
        U256 bb = U256::from_u64(b);
        if (n == bb) return true;
        if (mod(n, bb).is_zero()) return false;
    }
    U256 n1;
    sub_borrow(n, U256::from_u64(1), n1);
    U256 d = n1;
    int r = 0;
    while (!test_bit(d, 0)) {
        for (int i = 0; i < 3; ++i) d.w[i] = (d.w[i] >> 1) | (d.w[i + 1] << 63);
        d.w[3] >>= 1;
        ++r;
    }
    for (u64 b : kBases) {
        U256 x = mod_pow(U256::from_u64(b), d, n);
        if (x == U256::from_u64(1) || x == n1) continue;
        bool witness = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mod_mul(x, x, n);
            if (x == n1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

inline Bytes32 u256_to_be(const U256& a) {
    Bytes32 out;
    for (int i = 0; i < 4; ++i) {
        u64 limb = a.w[3 - i];
        for (int b = 0; b < 8; ++b) out[i * 8 + b] = std::uint8_t(limb >> (8 * (7 - b)));
    }
    return out;
}

inline U256 u256_from_be(const Bytes32& in) {
    U256 a;
    for (int i = 0; i < 4; ++i) {
        u64 limb = 0;
        for (int b = 0; b < 8; ++b) limb = (limb << 8) | in[i * 8 + b];
        a.w[3 - i] = limb;
    }
    return a;
}

inline std::string to_hex(const U256& a) {
    std::string full = to_hex(u256_to_be(a));
    std::size_t pos = full.find_first_not_of('0');
    if (pos == std::string::npos) return "0";
    return full.substr(pos);
}

// Lowercase big-endian hex, no prefix, at most 64 digits.
inline Result<U256> u256_from_hex(const std::string& hex) {
    if (hex.empty() || hex.size() > 64) return Err::WidthMismatch;
    std::string padded(64 - hex.size(), '0');
    padded += hex;
    auto bytes = bytes32_from_hex(padded);
    if (!bytes) return bytes.error();
    return u256_from_be(bytes.value());
}

}  // namespace gridauth
