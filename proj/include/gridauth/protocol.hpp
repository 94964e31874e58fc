#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridauth/bytes.hpp"
#include "gridauth/curve.hpp"
#include "gridauth/encode.hpp"
#include "gridauth/fuzzy.hpp"
#include "gridauth/hash.hpp"
#include "gridauth/result.hpp"
#include "gridauth/rng.hpp"

namespace gridauth {

// The four protocol phases as pure transitions over typed messages:
// setup, registration, login/authentication, and credential update.
// Every operation takes explicit clock readings and injected randomness;
// nothing here blocks or touches hidden state. "+" between masked values
// is always the 32-octet XOR.

struct SystemParams {
    CurveParams curve;
    Point pk_s;           // server public key X*G
    std::string hash_id;  // digest selection tag
    std::uint64_t delta_t_ms = 1000;
};

struct UserRecord {
    std::string id;
    Bytes32 r1{};
    Bytes32 r3{};
    std::uint64_t y = 0;
};

// R1 and the plaintext id are retained alongside the stored {R3, y}:
// the server cannot unmask ID_U1 or verify S1 without R1, and cannot
// recompute R2 without the id.
struct ServerState {
    Scalar x;  // server secret
    SystemParams params;
    std::string server_id;
    std::vector<UserRecord> users;
    std::uint64_t next_y = 1;

    const UserRecord* find_user(const std::string& id) const {
        for (const auto& u : users)
            if (u.id == id) return &u;
        return nullptr;
    }
    UserRecord* find_user(const std::string& id) {
        for (auto& u : users)
            if (u.id == id) return &u;
        return nullptr;
    }
};

// Device-side persistence. Neither the password, the biometric key sigma,
// nor h(password) alone is ever stored; the login gate re-derives them.
struct DeviceStore {
    Bytes32 r3{};
    Bytes32 r4{};
    Bytes32 r5{};
    HelperData helper;
    Scalar r;  // registration nonce, reused when R1 is recomputed
    std::string user_id;
};

struct MsgA1 {
    Bytes32 s1{};
    Bytes32 id_u1{};
    Point u_point;  // u*G
    std::uint64_t t1 = 0;
};

struct MsgA2 {
    Bytes32 id_s1{};
    Bytes32 s2{};
    Point s_point;  // s*G
    std::uint64_t t3 = 0;
};

struct SessionKey {
    Bytes32 sk{};
    bool operator==(const SessionKey&) const = default;
};

struct RegRequest {
    std::string id;
    Bytes32 r1{};
    std::uint64_t t_rg1 = 0;
};

struct RegResponse {
    Bytes32 r3{};
    std::uint64_t t = 0;
};

struct UpdateRequest {
    std::string id;
    Bytes32 r1_star{};
    std::uint64_t t_rg1 = 0;
};

struct UpdateResponse {
    Bytes32 r3_star{};
    std::uint64_t t = 0;
};

struct PendingEnrollment {
    BiometricKey sigma;
    HelperData helper;
    Scalar r;
    std::string password;
    std::string id;
};

struct PendingSession {
    Scalar u;
    Bytes32 r1{};
    Bytes32 r3{};
    Bytes32 s1{};
    std::string id;
    std::uint64_t t1 = 0;
};

struct PendingUpdate {
    BiometricKey sigma_new;
    HelperData helper_new;
    std::string password_new;
    std::string id;
    Scalar r;
};

// Accepts timestamps in [now - delta_t, now]; future-dated readings are
// rejected the same as stale ones.
inline bool is_fresh(std::uint64_t now_ms, std::uint64_t t, std::uint64_t delta_t_ms) {
    return t <= now_ms && now_ms - t <= delta_t_ms;
}

// --- Setup -------------------------------------------------------------

inline Result<std::pair<SystemParams, ServerState>> setup(const CurveParams& curve,
                                                          const std::string& server_id,
                                                          std::uint64_t delta_t_ms, Rng& rng) {
    if (auto v = validate_curve(curve); !v) return v.error();
    Scalar x = random_scalar(rng, curve);
    Point pk_s = scalar_mul(x, curve.g, curve).value();
    SystemParams params{curve, pk_s, "sha-256", delta_t_ms};
    ServerState server{x, params, server_id, {}, 1};
    return std::make_pair(params, std::move(server));
}

// --- Registration ------------------------------------------------------

// R1 = h(PW || sigma) XOR enc(r), with fresh r in Z_q*.
inline Result<std::pair<RegRequest, PendingEnrollment>> user_reg_request(
    const SystemParams& params, const std::string& id, const std::string& password,
    const BiometricTemplate& b, const FeParams& fe, std::uint64_t now_ms, Rng& rng) {
    auto enrolled = gen(b, fe, rng);
    if (!enrolled) return enrolled.error();
    auto [sigma, helper] = std::move(enrolled).value();

    Scalar r = random_scalar(rng, params.curve);
    Bytes32 pw_enc = encode_to32(password);
    Bytes32 r1 = xor32(hash_fields({&pw_enc, &sigma.sigma}), encode_to32(r));

    RegRequest req{id, r1, now_ms};
    PendingEnrollment pending{sigma, std::move(helper), r, password, id};
    return std::make_pair(std::move(req), std::move(pending));
}

// R2 = h(ID || X || y), R3 = R2 XOR R1; the record keeps {id, R1, R3, y}.
inline Result<RegResponse> server_reg_respond(ServerState& server, const RegRequest& req,
                                              std::uint64_t now_ms) {
    if (!is_fresh(now_ms, req.t_rg1, server.params.delta_t_ms)) return Err::StaleTimestamp;
    if (server.find_user(req.id) != nullptr) return Err::DuplicateRegistration;

    std::uint64_t y = server.next_y++;
    Bytes32 id_enc = encode_to32(req.id);
    Bytes32 x_enc = encode_to32(server.x);
    Bytes32 y_enc = encode_to32(y);
    Bytes32 r2 = hash_fields({&id_enc, &x_enc, &y_enc});
    Bytes32 r3 = xor32(r2, req.r1);

    server.users.push_back(UserRecord{req.id, req.r1, r3, y});
    return RegResponse{r3, now_ms};
}

// R4 = R3 XOR sigma, R5 = h(ID || PW || R4).
inline DeviceStore user_reg_finalize(const PendingEnrollment& pending, const RegResponse& resp) {
    Bytes32 r4 = xor32(resp.r3, pending.sigma.sigma);
    Bytes32 id_enc = encode_to32(pending.id);
    Bytes32 pw_enc = encode_to32(pending.password);
    Bytes32 r5 = hash_fields({&id_enc, &pw_enc, &r4});
    return DeviceStore{resp.r3, r4, r5, pending.helper, pending.r, pending.id};
}

// --- Login / authentication ---------------------------------------------

namespace protodetail {

// The device gate shared by login and update: reproduce sigma from the
// fresh reading, rebuild R5, and compare against the stored verifier.
inline Result<BiometricKey> device_gate(const DeviceStore& dev, const std::string& id,
                                        const std::string& password,
                                        const BiometricTemplate& noisy) {
    auto sigma = rep(noisy, dev.helper);
    if (!sigma) return sigma.error();
    Bytes32 r4_check = xor32(dev.r3, sigma.value().sigma);
    Bytes32 id_enc = encode_to32(id);
    Bytes32 pw_enc = encode_to32(password);
    Bytes32 r5_check = hash_fields({&id_enc, &pw_enc, &r4_check});
    if (!(r5_check == dev.r5)) return Err::LocalAuthFailure;
    return sigma;
}

}  // namespace protodetail

// S1 = h(ID || R1 || t1), ID_U1 = enc(ID) XOR R1 XOR enc(t1),
// M_A1 = {S1, ID_U1, u*G, t1}.
inline Result<std::pair<MsgA1, PendingSession>> user_login_start(
    const SystemParams& params, const DeviceStore& dev, const std::string& id,
    const std::string& password, const BiometricTemplate& noisy, std::uint64_t now_ms,
    Rng& rng) {
    auto sigma = protodetail::device_gate(dev, id, password, noisy);
    if (!sigma) return sigma.error();

    Scalar u = random_scalar(rng, params.curve);
    std::uint64_t t1 = now_ms;
    Bytes32 pw_enc = encode_to32(password);
    Bytes32 r1 = xor32(hash_fields({&pw_enc, &sigma.value().sigma}), encode_to32(dev.r));
    Bytes32 id_enc = encode_to32(id);
    Bytes32 t1_enc = encode_to32(t1);
    Bytes32 s1 = hash_fields({&id_enc, &r1, &t1_enc});
    Bytes32 id_u1 = xor32(xor32(id_enc, r1), t1_enc);

    MsgA1 m1{s1, id_u1, scalar_mul(u, params.curve.g, params.curve).value(), t1};
    PendingSession pending{u, r1, dev.r3, s1, id, t1};
    return std::make_pair(std::move(m1), std::move(pending));
}

// The id travels masked, so the server unmasks ID_U1 against each stored
// R1 and accepts the record whose id and S1 both check out.
inline Result<std::pair<MsgA2, SessionKey>> server_auth_respond(const ServerState& server,
                                                                const MsgA1& m1,
                                                                std::uint64_t now_ms,
                                                                Rng& rng) {
    const SystemParams& params = server.params;
    if (!is_fresh(now_ms, m1.t1, params.delta_t_ms)) return Err::StaleTimestamp;
    if (m1.u_point.is_identity() || !on_curve(m1.u_point, params.curve))
        return Err::InvalidPoint;

    Bytes32 t1_enc = encode_to32(m1.t1);
    const UserRecord* rec = nullptr;
    Bytes32 id_star{};
    bool id_matched = false;
    for (const auto& candidate : server.users) {
        Bytes32 unmasked = xor32(xor32(m1.id_u1, candidate.r1), t1_enc);
        if (!(unmasked == encode_to32(candidate.id))) continue;
        id_matched = true;
        Bytes32 s1_star = hash_fields({&unmasked, &candidate.r1, &t1_enc});
        if (s1_star == m1.s1) {
            rec = &candidate;
            id_star = unmasked;
            break;
        }
    }
    if (rec == nullptr) return id_matched ? Err::AuthenticationFailure : Err::UnknownUser;

    Scalar s = random_scalar(rng, params.curve);
    std::uint64_t t3 = now_ms;
    Bytes32 t3_enc = encode_to32(t3);
    Bytes32 sid_enc = encode_to32(server.server_id);
    Bytes32 s2 = hash_fields({&sid_enc, &rec->r3, &t3_enc});

    const CurveParams& curve = params.curve;
    Point s_pub = scalar_mul(s, curve.g, curve).value();
    Point dh = scalar_mul(s, m1.u_point, curve).value();
    Point r3g = scalar_mul(u256_from_be(rec->r3), curve.g, curve).value();

    Bytes32 r3g_enc = encode_to32(r3g);
    Bytes32 pks_enc = encode_to32(params.pk_s);
    Bytes32 dh_enc = encode_to32(dh);
    SessionKey sk{hash_fields(
        {&id_star, &sid_enc, &m1.s1, &s2, &r3g_enc, &pks_enc, &dh_enc, &t3_enc})};

    Bytes32 id_s1 = xor32(xor32(sid_enc, rec->r3), t3_enc);
    MsgA2 m2{id_s1, s2, s_pub, t3};
    return std::make_pair(std::move(m2), sk);
}

// Mirror of the server's derivation: same canonical field order, so an
// honest run ends with identical keys on both sides.
inline Result<SessionKey> user_auth_finalize(const SystemParams& params,
                                             const PendingSession& pending, const MsgA2& m2,
                                             std::uint64_t now_ms) {
    if (!is_fresh(now_ms, m2.t3, params.delta_t_ms)) return Err::StaleTimestamp;
    if (m2.s_point.is_identity() || !on_curve(m2.s_point, params.curve))
        return Err::InvalidPoint;

    Bytes32 t3_enc = encode_to32(m2.t3);
    Bytes32 id_s_star = xor32(xor32(m2.id_s1, pending.r3), t3_enc);
    Bytes32 s2_star = hash_fields({&id_s_star, &pending.r3, &t3_enc});
    if (!(s2_star == m2.s2)) return Err::AuthenticationFailure;

    const CurveParams& curve = params.curve;
    Point dh = scalar_mul(pending.u, m2.s_point, curve).value();
    Point r3g = scalar_mul(u256_from_be(pending.r3), curve.g, curve).value();

    Bytes32 id_enc = encode_to32(pending.id);
    Bytes32 r3g_enc = encode_to32(r3g);
    Bytes32 pks_enc = encode_to32(params.pk_s);
    Bytes32 dh_enc = encode_to32(dh);
    return SessionKey{hash_fields(
        {&id_enc, &id_s_star, &pending.s1, &m2.s2, &r3g_enc, &pks_enc, &dh_enc, &t3_enc})};
}

// --- Password and biometric update --------------------------------------

// Same gate as login, then R1* = h(PW* || sigma*) XOR enc(r) with the
// stored registration nonce r and a freshly enrolled biometric.
inline Result<std::pair<UpdateRequest, PendingUpdate>> user_update_request(
    const DeviceStore& dev, const std::string& id, const std::string& password_old,
    const BiometricTemplate& noisy_old, const std::string& password_new,
    const BiometricTemplate& b_new, std::uint64_t now_ms, Rng& rng) {
    auto gate = protodetail::device_gate(dev, id, password_old, noisy_old);
    if (!gate) return gate.error();

    auto enrolled = gen(b_new, dev.helper.params, rng);
    if (!enrolled) return enrolled.error();
    auto [sigma_new, helper_new] = std::move(enrolled).value();

    Bytes32 pw_enc = encode_to32(password_new);
    Bytes32 r1_star = xor32(hash_fields({&pw_enc, &sigma_new.sigma}), encode_to32(dev.r));

    UpdateRequest req{id, r1_star, now_ms};
    PendingUpdate pending{sigma_new, std::move(helper_new), password_new, id, dev.r};
    return std::make_pair(std::move(req), std::move(pending));
}

// R2* = h(ID || X || y) with the user's stored counter y (unchanged), so
// R3* = R2* XOR R1* moves only because R1* does.
inline Result<UpdateResponse> server_update_respond(ServerState& server,
                                                    const UpdateRequest& req,
                                                    std::uint64_t now_ms) {
    if (!is_fresh(now_ms, req.t_rg1, server.params.delta_t_ms)) return Err::StaleTimestamp;
    UserRecord* rec = server.find_user(req.id);
    if (rec == nullptr) return Err::UnknownUser;

    Bytes32 id_enc = encode_to32(req.id);
    Bytes32 x_enc = encode_to32(server.x);
    Bytes32 y_enc = encode_to32(rec->y);
    Bytes32 r2_star = hash_fields({&id_enc, &x_enc, &y_enc});
    Bytes32 r3_star = xor32(r2_star, req.r1_star);

    rec->r1 = req.r1_star;
    rec->r3 = r3_star;
    return UpdateResponse{r3_star, now_ms};
}

inline DeviceStore user_update_finalize(const PendingUpdate& pending,
                                        const UpdateResponse& resp) {
    Bytes32 r4_star = xor32(resp.r3_star, pending.sigma_new.sigma);
    Bytes32 id_enc = encode_to32(pending.id);
    Bytes32 pw_enc = encode_to32(pending.password_new);
    Bytes32 r5_star = hash_fields({&id_enc, &pw_enc, &r4_star});
    return DeviceStore{resp.r3_star, r4_star, r5_star, pending.helper_new, pending.r,
                       pending.id};
}

}  // namespace gridauth
