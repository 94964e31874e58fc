#pragma once

#include <optional>
#include <string>

#include "gridauth/counters.hpp"
#include "gridauth/result.hpp"
#include "gridauth/rng.hpp"
#include "gridauth/uint256.hpp"

namespace gridauth {

// Short-Weierstrass curve v^2 = u^3 + c*u + d over F_p, with a generator
// of prime order q. The same parameter block carries both the toy test
// curve and production-width curves.

struct Point {
    U256 x;
    U256 y;
    bool infinity = false;

    static Point identity() {
        Point p;
        p.infinity = true;
        return p;
    }
    bool is_identity() const { return infinity; }
    bool operator==(const Point& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

struct CurveParams {
    std::string name;
    U256 p;  // prime field modulus
    U256 c;  // u-coefficient
    U256 d;  // constant coefficient
    U256 q;  // prime order of the generator's subgroup
    Point g;
};

// Group scalar in [1, q-1].
struct Scalar {
    U256 v;
    bool operator==(const Scalar&) const = default;
};

inline bool on_curve(const Point& pt, const CurveParams& cp) {
    if (pt.is_identity()) return true;
    if (cmp(pt.x, cp.p) >= 0 || cmp(pt.y, cp.p) >= 0) return false;
    U256 lhs = mod_mul(pt.y, pt.y, cp.p);
    U256 x2 = mod_mul(pt.x, pt.x, cp.p);
    U256 rhs = mod_mul(x2, pt.x, cp.p);
    rhs = mod_add(rhs, mod_mul(mod(cp.c, cp.p), pt.x, cp.p), cp.p);
    rhs = mod_add(rhs, mod(cp.d, cp.p), cp.p);
    return lhs == rhs;
}

namespace ecdetail {

// Jacobian coordinates (X, Y, Z), affine (X/Z^2, Y/Z^3); Z = 0 is the
// point at infinity. Keeps the scalar ladder inversion-free.
struct Jac {
    U256 X, Y, Z;
    bool is_identity() const { return Z.is_zero(); }
};

inline Jac jac_identity() {
    Jac j;
    j.X = U256::from_u64(1);
    j.Y = U256::from_u64(1);
    return j;
}

inline Jac to_jac(const Point& p) {
    if (p.is_identity()) return jac_identity();
    Jac j;
    j.X = p.x;
    j.Y = p.y;
    j.Z = U256::from_u64(1);
    return j;
}

inline Jac jac_double(const Jac& j, const CurveParams& cp) {
    const U256& p = cp.p;
    if (j.is_identity() || j.Y.is_zero()) return jac_identity();
    U256 xx = mod_mul(j.X, j.X, p);
    U256 yy = mod_mul(j.Y, j.Y, p);
    U256 yyyy = mod_mul(yy, yy, p);
    U256 zz = mod_mul(j.Z, j.Z, p);
    U256 s = mod_mul(j.X, yy, p);
    s = mod_add(s, s, p);
    s = mod_add(s, s, p);  // 4*X*Y^2
    U256 m = mod_add(mod_add(xx, xx, p), xx, p);
    m = mod_add(m, mod_mul(mod(cp.c, p), mod_mul(zz, zz, p), p), p);  // 3X^2 + c*Z^4
    Jac r;
    r.X = mod_sub(mod_mul(m, m, p), mod_add(s, s, p), p);
    U256 y8 = mod_add(yyyy, yyyy, p);
    y8 = mod_add(y8, y8, p);
    y8 = mod_add(y8, y8, p);  // 8*Y^4
    r.Y = mod_sub(mod_mul(m, mod_sub(s, r.X, p), p), y8, p);
    r.Z = mod_mul(j.Y, j.Z, p);
    r.Z = mod_add(r.Z, r.Z, p);
    return r;
}

// Mixed addition with an affine, non-identity point.
inline Jac jac_add_mixed(const Jac& j, const Point& a, const CurveParams& cp) {
    const U256& p = cp.p;
    if (j.is_identity()) return to_jac(a);
    U256 z1z1 = mod_mul(j.Z, j.Z, p);
    U256 u2 = mod_mul(a.x, z1z1, p);
    U256 s2 = mod_mul(a.y, mod_mul(j.Z, z1z1, p), p);
    if (u2 == j.X) {
        if (!(s2 == j.Y)) return jac_identity();
        return jac_double(j, cp);
    }
    U256 h = mod_sub(u2, j.X, p);
    U256 hh = mod_mul(h, h, p);
    U256 hhh = mod_mul(h, hh, p);
    U256 r = mod_sub(s2, j.Y, p);
    U256 v = mod_mul(j.X, hh, p);
    Jac out;
    out.X = mod_sub(mod_sub(mod_mul(r, r, p), hhh, p), mod_add(v, v, p), p);
    out.Y = mod_sub(mod_mul(r, mod_sub(v, out.X, p), p), mod_mul(j.Y, hhh, p), p);
    out.Z = mod_mul(j.Z, h, p);
    return out;
}

inline Point to_affine(const Jac& j, const CurveParams& cp) {
    if (j.is_identity()) return Point::identity();
    const U256& p = cp.p;
    U256 zi = mod_inv_prime(j.Z, p);
    U256 zi2 = mod_mul(zi, zi, p);
    Point out;
    out.x = mod_mul(j.X, zi2, p);
    out.y = mod_mul(j.Y, mod_mul(zi2, zi, p), p);
    return out;
}

// Double-and-add over the raw integer k, no reduction mod q. validate_curve
// needs this to check q*G itself; reducing first would make that vacuous.
inline Point mul_raw(const U256& k, const Point& pt, const CurveParams& cp) {
    if (k.is_zero() || pt.is_identity()) return Point::identity();
    Jac acc = jac_identity();
    for (int i = bit_length(k) - 1; i >= 0; --i) {
        acc = jac_double(acc, cp);
        if (test_bit(k, i)) acc = jac_add_mixed(acc, pt, cp);
    }
    return to_affine(acc, cp);
}

}  // namespace ecdetail

// Full parameter validation: prime field, prime subgroup order, a
// nonsingular equation (4c^3 + 27d^2 != 0 mod p), and a generator that
// lies on the curve with q*G = identity.
inline Result<void> validate_curve(const CurveParams& cp) {
    if (cmp(cp.p, U256::from_u64(3)) <= 0 || !is_probable_prime(cp.p))
        return Err::BadModulus;
    if (!is_probable_prime(cp.q)) return Err::BadOrder;

    const U256& p = cp.p;
    U256 c = mod(cp.c, p);
    U256 d = mod(cp.d, p);
    U256 c3 = mod_mul(mod_mul(c, c, p), c, p);
    U256 disc = mod_mul(U256::from_u64(4), c3, p);
    disc = mod_add(disc, mod_mul(U256::from_u64(27), mod_mul(d, d, p), p), p);
    if (disc.is_zero()) return Err::SingularCurve;

    if (cp.g.is_identity() || !on_curve(cp.g, cp)) return Err::GeneratorOffCurve;
    if (!ecdetail::mul_raw(cp.q, cp.g, cp).is_identity()) return Err::BadOrder;
    return {};
}

inline Point point_negate(const Point& pt, const CurveParams& cp) {
    if (pt.is_identity() || pt.y.is_zero()) return pt;
    Point out = pt;
    out.y = mod_sub(U256{}, pt.y, cp.p);
    return out;
}

// Affine chord-tangent addition.
inline Result<Point> point_add(const Point& a, const Point& b, const CurveParams& cp) {
    if (!on_curve(a, cp) || !on_curve(b, cp)) return Err::PointOffCurve;
    count_point_add();
    if (a.is_identity()) return b;
    if (b.is_identity()) return a;
    const U256& p = cp.p;
    U256 lambda;
    if (a.x == b.x) {
        if (!(a.y == b.y) || a.y.is_zero()) return Point::identity();
        U256 num = mod_mul(a.x, a.x, p);
        num = mod_add(mod_add(num, num, p), num, p);
        num = mod_add(num, mod(cp.c, p), p);
        U256 den = mod_add(a.y, a.y, p);
        lambda = mod_mul(num, mod_inv_prime(den, p), p);
    } else {
        U256 num = mod_sub(b.y, a.y, p);
        U256 den = mod_sub(b.x, a.x, p);
        lambda = mod_mul(num, mod_inv_prime(den, p), p);
    }
    Point out;
    out.x = mod_sub(mod_sub(mod_mul(lambda, lambda, p), a.x, p), b.x, p);
    out.y = mod_sub(mod_mul(lambda, mod_sub(a.x, out.x, p), p), a.y, p);
    return out;
}

// k*P with k taken mod q; k = 0 maps to the identity.
inline Result<Point> scalar_mul(const U256& k, const Point& pt, const CurveParams& cp) {
    if (!on_curve(pt, cp)) return Err::PointOffCurve;
    count_scalar_mul();
    return ecdetail::mul_raw(mod(k, cp.q), pt, cp);
}

inline Result<Point> scalar_mul(const Scalar& k, const Point& pt, const CurveParams& cp) {
    return scalar_mul(k.v, pt, cp);
}

// Uniform scalar in [1, q-1] by masked rejection sampling.
inline Scalar random_scalar(Rng& rng, const CurveParams& cp) {
    count_rng_draw();
    const int bits = bit_length(cp.q);
    U256 v;
    for (;;) {
        Bytes32 raw;
        rng.fill(raw.data(), raw.size());
        v = u256_from_be(raw);
        for (int i = bits; i < 256; ++i) v.w[i / 64] &= ~(u64(1) << (i % 64));
        if (!v.is_zero() && cmp(v, cp.q) < 0) return Scalar{v};
    }
}

// Built-in profiles. The toy curve y^2 = x^3 + x + 1 over F_23 has group
// order 28; (17,3) generates its prime-order-7 subgroup, which is what
// the q*G = identity invariant requires.
inline CurveParams toy_curve() {
    CurveParams cp;
    cp.name = "toy23";
    cp.p = U256::from_u64(23);
    cp.c = U256::from_u64(1);
    cp.d = U256::from_u64(1);
    cp.q = U256::from_u64(7);
    cp.g.x = U256::from_u64(17);
    cp.g.y = U256::from_u64(3);
    return cp;
}

inline CurveParams secp256k1() {
    auto h = [](const char* s) { return u256_from_hex(s).value(); };
    CurveParams cp;
    cp.name = "secp256k1";
    cp.p = h("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");
    cp.c = U256{};
    cp.d = U256::from_u64(7);
    cp.q = h("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141");
    cp.g.x = h("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
    cp.g.y = h("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8");
    return cp;
}

inline std::optional<CurveParams> builtin_curve(const std::string& name) {
    if (name == "toy23") return toy_curve();
    if (name == "secp256k1") return secp256k1();
    return std::nullopt;
}

}  // namespace gridauth
