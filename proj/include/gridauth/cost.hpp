#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gridauth/counters.hpp"
#include "gridauth/protocol.hpp"
#include "gridauth/sim.hpp"
#include "gridauth/wire.hpp"

namespace gridauth {

// Measured per-phase operation counts and exact wire sizes. Counts come
// from the counting hooks in the group-math and hash layers, not from
// estimates; a fixed config reproduces the table exactly.

struct PhaseCost {
    std::string name;
    OpCounters ops;
};

struct MessageSize {
    std::string name;
    std::size_t bytes = 0;
};

struct CostReport {
    std::vector<PhaseCost> phases;
    std::vector<MessageSize> messages;
};

inline Result<CostReport> run_cost_report(const WorldConfig& cfg) {
    CostReport report;
    Rng rng(cfg.seed);
    std::uint64_t now = cfg.start_ms;

    OpCounters setup_ops;
    Result<std::pair<SystemParams, ServerState>> st = Err::BadConfig;
    {
        CountingScope scope(setup_ops);
        st = setup(cfg.curve, cfg.server_id, cfg.delta_t_ms, rng);
    }
    if (!st) return st.error();
    SystemParams params = st.value().first;
    ServerState server = std::move(st.value()).second;
    report.phases.push_back({"setup", setup_ops});

    const std::string password = to_hex(rng.bytes(12));
    BiometricTemplate enrolled{rng.bits(cfg.fe.n)};

    // Registration.
    OpCounters reg_user, reg_server;
    Result<std::pair<RegRequest, PendingEnrollment>> req = Err::BadConfig;
    {
        CountingScope scope(reg_user);
        req = user_reg_request(params, cfg.user_id, password, enrolled, cfg.fe, now, rng);
    }
    if (!req) return req.error();
    now += cfg.hop_latency_ms;
    Result<RegResponse> resp = Err::BadConfig;
    {
        CountingScope scope(reg_server);
        resp = server_reg_respond(server, req.value().first, now);
    }
    if (!resp) return resp.error();
    now += cfg.hop_latency_ms;
    DeviceStore device;
    {
        CountingScope scope(reg_user);
        device = user_reg_finalize(req.value().second, resp.value());
    }
    report.phases.push_back({"registration-user", reg_user});
    report.phases.push_back({"registration-server", reg_server});

    // Login and authentication.
    OpCounters login_start_ops, login_server_ops, login_finalize_ops;
    Result<std::pair<MsgA1, PendingSession>> started = Err::BadConfig;
    {
        CountingScope scope(login_start_ops);
        started = user_login_start(params, device, cfg.user_id, password, enrolled, now, rng);
    }
    if (!started) return started.error();
    now += cfg.hop_latency_ms;
    Result<std::pair<MsgA2, SessionKey>> answered = Err::BadConfig;
    {
        CountingScope scope(login_server_ops);
        answered = server_auth_respond(server, started.value().first, now, rng);
    }
    if (!answered) return answered.error();
    now += cfg.hop_latency_ms;
    Result<SessionKey> finished = Err::BadConfig;
    {
        CountingScope scope(login_finalize_ops);
        finished = user_auth_finalize(params, started.value().second,
                                      answered.value().first, now);
    }
    if (!finished) return finished.error();

    OpCounters login_user_total = login_start_ops;
    login_user_total += login_finalize_ops;
    report.phases.push_back({"login-user-start", login_start_ops});
    report.phases.push_back({"login-server", login_server_ops});
    report.phases.push_back({"login-user-finalize", login_finalize_ops});
    report.phases.push_back({"login-user-total", login_user_total});

    // Credential update.
    OpCounters update_user, update_server;
    const std::string password_new = to_hex(rng.bytes(12));
    BiometricTemplate b_new{rng.bits(cfg.fe.n)};
    Result<std::pair<UpdateRequest, PendingUpdate>> ureq = Err::BadConfig;
    {
        CountingScope scope(update_user);
        ureq = user_update_request(device, cfg.user_id, password, enrolled, password_new,
                                   b_new, now, rng);
    }
    if (!ureq) return ureq.error();
    now += cfg.hop_latency_ms;
    Result<UpdateResponse> uresp = Err::BadConfig;
    {
        CountingScope scope(update_server);
        uresp = server_update_respond(server, ureq.value().first, now);
    }
    if (!uresp) return uresp.error();
    {
        CountingScope scope(update_user);
        device = user_update_finalize(ureq.value().second, uresp.value());
    }
    report.phases.push_back({"update-user", update_user});
    report.phases.push_back({"update-server", update_server});

    report.messages.push_back({"RegRequest", encode_msg(req.value().first).size()});
    report.messages.push_back({"RegResponse", encode_msg(resp.value()).size()});
    report.messages.push_back({"M_A1", encode_msg(started.value().first).size()});
    report.messages.push_back({"M_A2", encode_msg(answered.value().first).size()});
    report.messages.push_back({"UpdateRequest", encode_msg(ureq.value().first).size()});
    report.messages.push_back({"UpdateResponse", encode_msg(uresp.value()).size()});
    return report;
}

inline std::string render_cost_text(const CostReport& r) {
    std::ostringstream os;
    os << "gridauth cost report\n\n";
    os << "phase                 hash  scalar-mul  point-add  xor  rng-draws\n";
    for (const auto& p : r.phases) {
        os << p.name;
        for (std::size_t i = p.name.size(); i < 22; ++i) os << ' ';
        os << p.ops.hashes << "     " << p.ops.scalar_muls << "           "
           << p.ops.point_adds << "          " << p.ops.xors << "    " << p.ops.rng_draws
           << "\n";
    }
    os << "\nmessage sizes (canonical layout, bytes)\n";
    for (const auto& m : r.messages) os << m.name << ": " << m.bytes << "\n";
    return os.str();
}

inline std::string render_cost_kv(const CostReport& r) {
    std::ostringstream os;
    os << "report=gridauth-cost\n";
    for (const auto& p : r.phases) {
        os << "phase=" << p.name << " hash=" << p.ops.hashes
           << " scalar_mul=" << p.ops.scalar_muls << " point_add=" << p.ops.point_adds
           << " xor=" << p.ops.xors << " rng_draws=" << p.ops.rng_draws << "\n";
    }
    for (const auto& m : r.messages) os << "message=" << m.name << " bytes=" << m.bytes << "\n";
    return os.str();
}

}  // namespace gridauth
