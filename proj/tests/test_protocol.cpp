#include <doctest.h>

#include <string>

#include "gridauth/protocol.hpp"
#include "gridauth/rng.hpp"

using namespace gridauth;

namespace {

constexpr FeParams kSmallFe{12, 4, 3};

struct Enrolled {
    SystemParams params;
    ServerState server;
    DeviceStore device;
    BiometricKey sigma;
    Scalar r;
    std::string id = "SM-1001";
    std::string pw = "correct horse battery";
    BiometricTemplate b;
    Rng rng{0};
    std::uint64_t now = 1'700'000'000'000;
};

Enrolled make_enrolled(const CurveParams& curve, std::uint64_t seed,
                       const FeParams& fe = kSmallFe) {
    Enrolled e;
    e.rng = Rng(seed);
    auto st = setup(curve, "CS-01", 1000, e.rng);
    REQUIRE(st.ok());
    e.params = st.value().first;
    e.server = std::move(st.value()).second;

    e.b = BiometricTemplate{e.rng.bits(fe.n)};
    auto req = user_reg_request(e.params, e.id, e.pw, e.b, fe, e.now, e.rng);
    REQUIRE(req.ok());
    e.sigma = req.value().second.sigma;
    e.r = req.value().second.r;
    e.now += 5;
    auto resp = server_reg_respond(e.server, req.value().first, e.now);
    REQUIRE(resp.ok());
    e.now += 5;
    e.device = user_reg_finalize(req.value().second, resp.value());
    return e;
}

}  // namespace

TEST_CASE("setup publishes PK_S = X*G and rejects broken curves") {
    Rng rng(801);
    auto st = setup(toy_curve(), "CS-01", 1000, rng);
    REQUIRE(st.ok());
    const auto& [params, server] = st.value();
    CHECK(params.pk_s == scalar_mul(server.x, params.curve.g, params.curve).value());

    Rng rng2(802);
    auto st2 = setup(toy_curve(), "CS-01", 1000, rng2);
    REQUIRE(st2.ok());
    CHECK(!(st2.value().second.x == server.x));  // fresh secret per seed

    CurveParams singular = toy_curve();
    singular.c = U256{};
    singular.d = U256{};
    auto bad = setup(singular, "CS-01", 1000, rng);
    REQUIRE(!bad.ok());
    CHECK(bad.error() == Err::SingularCurve);
}

TEST_CASE("registration algebra holds exactly") {
    Enrolled e = make_enrolled(toy_curve(), 811);

    const UserRecord* rec = e.server.find_user(e.id);
    REQUIRE(rec != nullptr);

    // R3 XOR R1 = h(ID || X || y)
    Bytes32 id_enc = encode_to32(e.id);
    Bytes32 x_enc = encode_to32(e.server.x);
    Bytes32 y_enc = encode_to32(rec->y);
    Bytes32 r2 = hash_fields({&id_enc, &x_enc, &y_enc});
    CHECK(xor32(rec->r3, rec->r1) == r2);

    // R3 XOR R4 = sigma
    CHECK(xor32(e.device.r3, e.device.r4) == e.sigma.sigma);

    // R1 XOR enc(r) = h(PW || sigma)
    Bytes32 pw_enc = encode_to32(e.pw);
    CHECK(xor32(rec->r1, encode_to32(e.r)) == hash_fields({&pw_enc, &e.sigma.sigma}));

    // Stored R5 is re-derivable from the stored fields plus the password.
    Bytes32 r5 = hash_fields({&id_enc, &pw_enc, &e.device.r4});
    CHECK(r5 == e.device.r5);
}

TEST_CASE("request timestamps equal the injected clock reading") {
    Enrolled e = make_enrolled(toy_curve(), 810);
    BiometricTemplate b2{e.rng.bits(kSmallFe.n)};
    auto req = user_reg_request(e.params, "SM-3003", "pw", b2, kSmallFe, 424242, e.rng);
    REQUIRE(req.ok());
    CHECK(req.value().first.t_rg1 == 424242);

    auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now + 99, e.rng);
    REQUIRE(started.ok());
    CHECK(started.value().first.t1 == e.now + 99);
}

TEST_CASE("device store keeps no bare secrets") {
    Enrolled e = make_enrolled(toy_curve(), 812);
    Bytes32 pw_hash = encode_to32(e.pw);
    for (const Bytes32& field : {e.device.r3, e.device.r4, e.device.r5}) {
        CHECK(!(field == e.sigma.sigma));
        CHECK(!(field == pw_hash));
    }
}

TEST_CASE("registration freshness and duplicate checks") {
    Enrolled e = make_enrolled(toy_curve(), 813);

    BiometricTemplate b2{e.rng.bits(kSmallFe.n)};
    auto req = user_reg_request(e.params, "SM-2002", "pw2", b2, kSmallFe, e.now, e.rng);
    REQUIRE(req.ok());

    // Stale request.
    auto stale = server_reg_respond(e.server, req.value().first,
                                    e.now + e.params.delta_t_ms + 1);
    REQUIRE(!stale.ok());
    CHECK(stale.error() == Err::StaleTimestamp);

    // Future-dated request.
    RegRequest future = req.value().first;
    future.t_rg1 = e.now + 50;
    auto early = server_reg_respond(e.server, future, e.now);
    REQUIRE(!early.ok());
    CHECK(early.error() == Err::StaleTimestamp);

    // In-window accepted, duplicate rejected.
    auto ok = server_reg_respond(e.server, req.value().first, e.now + 5);
    REQUIRE(ok.ok());
    auto dup = server_reg_respond(e.server, req.value().first, e.now + 6);
    REQUIRE(!dup.ok());
    CHECK(dup.error() == Err::DuplicateRegistration);
}

TEST_CASE("honest login agrees on the session key") {
    for (const CurveParams& curve : {toy_curve(), secp256k1()}) {
        Enrolled e = make_enrolled(curve, 814);
        auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
        REQUIRE(started.ok());
        e.now += 5;
        auto answered = server_auth_respond(e.server, started.value().first, e.now, e.rng);
        REQUIRE(answered.ok());
        e.now += 5;
        auto finished =
            user_auth_finalize(e.params, started.value().second, answered.value().first, e.now);
        REQUIRE(finished.ok());
        CHECK(finished.value() == answered.value().second);
    }
}

TEST_CASE("login masked identity is recoverable but never transmitted bare") {
    Enrolled e = make_enrolled(toy_curve(), 815);
    auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
    REQUIRE(started.ok());
    const MsgA1& m1 = started.value().first;
    const PendingSession& pending = started.value().second;

    Bytes32 id_enc = encode_to32(e.id);
    CHECK(xor32(xor32(m1.id_u1, pending.r1), encode_to32(m1.t1)) == id_enc);
    CHECK(!(m1.id_u1 == id_enc));
    CHECK(!(m1.s1 == id_enc));
}

TEST_CASE("device gate rejects wrong password and excess noise") {
    Enrolled e = make_enrolled(toy_curve(), 816);

    auto wrong_pw =
        user_login_start(e.params, e.device, e.id, "wrong-password", e.b, e.now, e.rng);
    REQUIRE(!wrong_pw.ok());
    CHECK(wrong_pw.error() == Err::LocalAuthFailure);

    // Two flips in a rho=3 block exceed the tolerance of one.
    BiometricTemplate noisy = e.b;
    noisy.bits[0] ^= 1;
    noisy.bits[1] ^= 1;
    auto too_noisy = user_login_start(e.params, e.device, e.id, e.pw, noisy, e.now, e.rng);
    REQUIRE(!too_noisy.ok());
    CHECK(too_noisy.error() == Err::LocalAuthFailure);

    // One flip per block stays inside the tolerance.
    BiometricTemplate tolerable = e.b;
    tolerable.bits[0] ^= 1;
    tolerable.bits[5] ^= 1;
    auto fine = user_login_start(e.params, e.device, e.id, e.pw, tolerable, e.now, e.rng);
    CHECK(fine.ok());

    auto wrong_id =
        user_login_start(e.params, e.device, "SM-9999", e.pw, e.b, e.now, e.rng);
    REQUIRE(!wrong_id.ok());
    CHECK(wrong_id.error() == Err::LocalAuthFailure);
}

TEST_CASE("server rejects stale, unknown, tampered and invalid logins") {
    Enrolled e = make_enrolled(toy_curve(), 817);
    auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
    REQUIRE(started.ok());
    const MsgA1& m1 = started.value().first;

    auto stale = server_auth_respond(e.server, m1, e.now + e.params.delta_t_ms + 1, e.rng);
    REQUIRE(!stale.ok());
    CHECK(stale.error() == Err::StaleTimestamp);

    MsgA1 future = m1;
    future.t1 = e.now + 1;
    auto early = server_auth_respond(e.server, future, e.now, e.rng);
    REQUIRE(!early.ok());
    CHECK(early.error() == Err::StaleTimestamp);

    MsgA1 flipped = m1;
    flipped.s1[0] ^= 0x01;
    auto bad_s1 = server_auth_respond(e.server, flipped, e.now, e.rng);
    REQUIRE(!bad_s1.ok());
    CHECK(bad_s1.error() == Err::AuthenticationFailure);

    MsgA1 masked = m1;
    masked.id_u1[3] ^= 0x10;
    auto bad_mask = server_auth_respond(e.server, masked, e.now, e.rng);
    REQUIRE(!bad_mask.ok());
    CHECK(bad_mask.error() == Err::UnknownUser);

    MsgA1 infinity = m1;
    infinity.u_point = Point::identity();
    auto bad_point = server_auth_respond(e.server, infinity, e.now, e.rng);
    REQUIRE(!bad_point.ok());
    CHECK(bad_point.error() == Err::InvalidPoint);

    MsgA1 off_curve = m1;
    off_curve.u_point.y = mod_add(off_curve.u_point.y, U256::from_u64(1), e.params.curve.p);
    auto bad_curve = server_auth_respond(e.server, off_curve, e.now, e.rng);
    REQUIRE(!bad_curve.ok());
    CHECK(bad_curve.error() == Err::InvalidPoint);

    ServerState empty = e.server;
    empty.users.clear();
    auto unknown = server_auth_respond(empty, m1, e.now, e.rng);
    REQUIRE(!unknown.ok());
    CHECK(unknown.error() == Err::UnknownUser);
}

TEST_CASE("user rejects stale or tampered server replies") {
    Enrolled e = make_enrolled(toy_curve(), 818);
    auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
    REQUIRE(started.ok());
    auto answered = server_auth_respond(e.server, started.value().first, e.now, e.rng);
    REQUIRE(answered.ok());
    const MsgA2& m2 = answered.value().first;
    const PendingSession& pending = started.value().second;

    auto stale =
        user_auth_finalize(e.params, pending, m2, e.now + e.params.delta_t_ms + 1);
    REQUIRE(!stale.ok());
    CHECK(stale.error() == Err::StaleTimestamp);

    MsgA2 tampered = m2;
    tampered.id_s1[7] ^= 0x04;
    auto bad = user_auth_finalize(e.params, pending, tampered, e.now);
    REQUIRE(!bad.ok());
    CHECK(bad.error() == Err::AuthenticationFailure);

    MsgA2 flipped = m2;
    flipped.s2[31] ^= 0x80;
    auto bad2 = user_auth_finalize(e.params, pending, flipped, e.now);
    REQUIRE(!bad2.ok());
    CHECK(bad2.error() == Err::AuthenticationFailure);

    MsgA2 infinity = m2;
    infinity.s_point = Point::identity();
    auto bad3 = user_auth_finalize(e.params, pending, infinity, e.now);
    REQUIRE(!bad3.ok());
    CHECK(bad3.error() == Err::InvalidPoint);
}

TEST_CASE("two sessions never share a key") {
    Enrolled e = make_enrolled(toy_curve(), 819);
    SessionKey keys[2];
    for (int i = 0; i < 2; ++i) {
        auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
        REQUIRE(started.ok());
        auto answered = server_auth_respond(e.server, started.value().first, e.now, e.rng);
        REQUIRE(answered.ok());
        keys[i] = answered.value().second;
        e.now += 7;  // fresh timestamps next round
    }
    CHECK(!(keys[0] == keys[1]));
}

TEST_CASE("honest-run key equality across randomized inputs") {
    Rng meta(820);
    for (int trial = 0; trial < 40; ++trial) {
        Enrolled e;
        e.rng = Rng(meta.next_u64());
        e.id = "SM-" + std::to_string(1000 + meta.below(9000));
        e.pw = to_hex(e.rng.bytes(8));

        auto st = setup(toy_curve(), "CS-01", 1000, e.rng);
        REQUIRE(st.ok());
        e.params = st.value().first;
        e.server = std::move(st.value()).second;

        e.b = BiometricTemplate{e.rng.bits(kSmallFe.n)};
        auto req = user_reg_request(e.params, e.id, e.pw, e.b, kSmallFe, e.now, e.rng);
        REQUIRE(req.ok());
        auto resp = server_reg_respond(e.server, req.value().first, e.now + meta.below(900));
        REQUIRE(resp.ok());
        e.device = user_reg_finalize(req.value().second, resp.value());

        std::uint64_t t = e.now + 1000;
        auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, t, e.rng);
        REQUIRE(started.ok());
        t += meta.below(e.params.delta_t_ms);
        auto answered = server_auth_respond(e.server, started.value().first, t, e.rng);
        REQUIRE(answered.ok());
        t += meta.below(e.params.delta_t_ms);
        auto finished =
            user_auth_finalize(e.params, started.value().second, answered.value().first, t);
        REQUIRE(finished.ok());
        CHECK(finished.value() == answered.value().second);
    }
}

TEST_CASE("credential update replaces the working credentials") {
    Enrolled e = make_enrolled(toy_curve(), 821);
    const std::string pw_new = "fresh passphrase";
    BiometricTemplate b_new{e.rng.bits(kSmallFe.n)};
    const std::uint64_t y_before = e.server.find_user(e.id)->y;

    auto req = user_update_request(e.device, e.id, e.pw, e.b, pw_new, b_new, e.now, e.rng);
    REQUIRE(req.ok());
    auto resp = server_update_respond(e.server, req.value().first, e.now + 5);
    REQUIRE(resp.ok());
    DeviceStore updated = user_update_finalize(req.value().second, resp.value());

    // Counter y is unchanged; R2* therefore equals R2, and the stored
    // record satisfies R3* XOR R1* = R2*.
    const UserRecord* rec = e.server.find_user(e.id);
    REQUIRE(rec != nullptr);
    CHECK(rec->y == y_before);
    Bytes32 id_enc = encode_to32(e.id);
    Bytes32 x_enc = encode_to32(e.server.x);
    Bytes32 y_enc = encode_to32(rec->y);
    CHECK(xor32(rec->r3, rec->r1) == hash_fields({&id_enc, &x_enc, &y_enc}));

    // R4* XOR R3* = sigma*.
    CHECK(xor32(updated.r4, updated.r3) == req.value().second.sigma_new.sigma);

    // New credentials authenticate end to end.
    std::uint64_t t = e.now + 100;
    auto started = user_login_start(e.params, updated, e.id, pw_new, b_new, t, e.rng);
    REQUIRE(started.ok());
    auto answered = server_auth_respond(e.server, started.value().first, t + 5, e.rng);
    REQUIRE(answered.ok());
    auto finished =
        user_auth_finalize(e.params, started.value().second, answered.value().first, t + 10);
    REQUIRE(finished.ok());
    CHECK(finished.value() == answered.value().second);

    // Old credentials die at the device gate.
    auto old_creds = user_login_start(e.params, updated, e.id, e.pw, e.b, t, e.rng);
    REQUIRE(!old_creds.ok());
    CHECK(old_creds.error() == Err::LocalAuthFailure);
}

TEST_CASE("update refuses wrong old credentials and leaves state intact") {
    Enrolled e = make_enrolled(toy_curve(), 822);
    BiometricTemplate b_new{e.rng.bits(kSmallFe.n)};

    auto refused = user_update_request(e.device, e.id, "not-the-password", e.b, "new-pw",
                                       b_new, e.now, e.rng);
    REQUIRE(!refused.ok());
    CHECK(refused.error() == Err::LocalAuthFailure);

    // Nothing changed: the old credentials still log in.
    auto started = user_login_start(e.params, e.device, e.id, e.pw, e.b, e.now, e.rng);
    REQUIRE(started.ok());
    auto answered = server_auth_respond(e.server, started.value().first, e.now + 5, e.rng);
    CHECK(answered.ok());
}

TEST_CASE("update for an unknown user is refused") {
    Enrolled e = make_enrolled(toy_curve(), 823);
    UpdateRequest req{"SM-9999", e.device.r3, e.now};
    auto resp = server_update_respond(e.server, req, e.now);
    REQUIRE(!resp.ok());
    CHECK(resp.error() == Err::UnknownUser);

    auto stale = server_update_respond(
        e.server, UpdateRequest{e.id, e.device.r3, e.now},
        e.now + e.params.delta_t_ms + 1);
    REQUIRE(!stale.ok());
    CHECK(stale.error() == Err::StaleTimestamp);
}
