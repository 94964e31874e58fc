#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "gridauth/attacks.hpp"
#include "gridauth/cost.hpp"
#include "gridauth/sim.hpp"
#include "gridauth/wire.hpp"

namespace gridauth {

// Command implementations behind the gridauth tool. Each takes the
// resolved configuration and the output streams, returns the process
// exit status, and is deterministic for a fixed seed.

struct CliConfig {
    std::string curve = "secp256k1";  // built-in profile name or JSON file path
    std::uint64_t seed = 1;
    std::uint64_t delta_t_ms = 1000;
    std::uint64_t fe_n = 640;
    std::uint64_t fe_k = 128;
    std::uint64_t fe_rho = 5;
    std::string out;     // report/state output path, empty = stdout only
    std::string format = "text";  // text | kv
    std::string state;   // optional persisted server-state input
};

namespace clidetail {

inline Result<WorldConfig> make_world_config(const CliConfig& cfg) {
    auto curve = load_curve_profile(cfg.curve);
    if (!curve) return curve.error();
    FeParams fe{cfg.fe_n, cfg.fe_k, cfg.fe_rho};
    if (!fe.valid() || fe.n % 4 != 0) return Err::BadConfig;
    WorldConfig wc;
    wc.curve = curve.value();
    wc.delta_t_ms = cfg.delta_t_ms;
    wc.fe = fe;
    wc.seed = cfg.seed;
    return wc;
}

inline int fail(std::ostream& err, const std::string& what, Err e) {
    err << "error: " << what << ": " << err_name(e) << "\n";
    return 1;
}

// Builds the world, optionally on top of a persisted server state.
inline Result<World> make_world(const CliConfig& cfg) {
    auto wc = make_world_config(cfg);
    if (!wc) return wc.error();
    if (!cfg.state.empty()) {
        auto loaded = load_server_state(cfg.state);
        if (!loaded) return loaded.error();
        return World::create(wc.value(), std::move(loaded).value());
    }
    return World::create(wc.value());
}

inline void print_transcript(std::ostream& os, const Transcript& transcript) {
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const TranscriptEntry& e = transcript.at(i);
        const char* arrow = e.dir == Direction::UserToServer ? "->" : "<-";
        const char* channel = e.channel == ChannelKind::Public ? "public" : "secure";
        os << arrow << " " << e.label << " (" << channel << ", " << e.bytes.size()
           << " bytes) at t=" << e.sent_at << "\n";
        if (e.channel != ChannelKind::Public) continue;
        if (e.label == "M_A1") {
            if (auto m = decode_msga1(e.bytes)) os << msg_text(m.value());
        } else if (e.label == "M_A2") {
            if (auto m = decode_msga2(e.bytes)) os << msg_text(m.value());
        }
    }
}

inline bool write_file(const std::string& path, const std::string& content,
                       std::ostream& err) {
    std::ofstream out(path);
    if (!out) {
        err << "error: cannot write " << path << "\n";
        return false;
    }
    out << content;
    return out.good();
}

}  // namespace clidetail

// Setup -> register -> authenticate; prints the transcript and both keys.
inline int cmd_demo(const CliConfig& cfg, std::ostream& os, std::ostream& err) {
    auto world = clidetail::make_world(cfg);
    if (!world) return clidetail::fail(err, "demo setup/registration", world.error());
    World& w = world.value();

    os << "gridauth demo\n";
    os << "curve=" << w.params().curve.name << " seed=" << cfg.seed
       << " delta_t_ms=" << w.params().delta_t_ms << "\n\n";

    auto run = w.run_honest_session();
    if (!run) return clidetail::fail(err, "login/authentication", run.error());

    clidetail::print_transcript(os, w.transcript());
    os << "\nSK_US: " << to_hex(run.value().sk_user.sk) << "\n";
    os << "SK_SU: " << to_hex(run.value().sk_server.sk) << "\n";
    bool match = run.value().sk_user == run.value().sk_server;
    os << (match ? "keys match\n" : "keys DIFFER\n");
    return match ? 0 : 1;
}

// Enroll -> authenticate -> update credentials -> re-authenticate with the
// new ones (must work) -> try the old ones (must fail at the device gate).
inline int cmd_update_demo(const CliConfig& cfg, std::ostream& os, std::ostream& err) {
    auto world = clidetail::make_world(cfg);
    if (!world) return clidetail::fail(err, "setup/registration", world.error());
    World& w = world.value();

    os << "gridauth update demo\n";
    auto before = w.run_honest_session();
    if (!before) return clidetail::fail(err, "pre-update login", before.error());
    os << "login with enrolled credentials: ok\n";

    const std::string old_password = w.password();

    // A wrong old password must stop the update and leave state untouched.
    {
        auto refused = user_update_request(
            w.device(), w.user_id(), old_password + "-wrong", w.fresh_reading(),
            "next-password", BiometricTemplate{w.rng().bits(w.config().fe.n)},
            w.clock().now_ms(), w.rng());
        if (refused.ok() || refused.error() != Err::LocalAuthFailure) {
            err << "error: update with wrong old password was not refused locally\n";
            return 1;
        }
        auto still_works = w.run_honest_session();
        if (!still_works)
            return clidetail::fail(err, "login after refused update", still_works.error());
        os << "update with wrong old password: refused, state unchanged\n";
    }

    std::string new_password = to_hex(w.rng().bytes(12));
    BiometricTemplate new_template{w.rng().bits(w.config().fe.n)};
    if (auto updated = w.run_update(new_password, new_template); !updated)
        return clidetail::fail(err, "credential update", updated.error());
    os << "password and biometric updated\n";

    auto after = w.run_honest_session();
    if (!after) return clidetail::fail(err, "post-update login", after.error());
    if (!(after.value().sk_user == after.value().sk_server)) {
        err << "error: post-update session keys differ\n";
        return 1;
    }
    os << "login with new credentials: ok\n";

    auto old_attempt =
        user_login_start(w.params(), w.device(), w.user_id(), old_password,
                         w.fresh_reading(), w.clock().now_ms(), w.rng());
    if (old_attempt.ok() || old_attempt.error() != Err::LocalAuthFailure) {
        err << "error: old credentials were not rejected after the update\n";
        return 1;
    }
    os << "login with old credentials: rejected (LocalAuthFailure), as expected\n";
    return 0;
}

// Runs the adversary suite; exit 0 iff every pass-expected scenario passes.
inline int cmd_attacks(const CliConfig& cfg, std::ostream& os, std::ostream& err) {
    auto wc = clidetail::make_world_config(cfg);
    if (!wc) return clidetail::fail(err, "configuration", wc.error());

    // A persisted server state supplies the curve and freshness window.
    WorldConfig suite_cfg = wc.value();
    if (!cfg.state.empty()) {
        auto loaded = load_server_state(cfg.state);
        if (!loaded) return clidetail::fail(err, "loading server state", loaded.error());
        suite_cfg.curve = loaded.value().params.curve;
        suite_cfg.delta_t_ms = loaded.value().params.delta_t_ms;
    }
    Result<AttackReport> report = run_attack_suite(suite_cfg);
    if (!report) return clidetail::fail(err, "attack suite", report.error());

    std::string rendered = cfg.format == "kv" ? render_kv(report.value())
                                              : render_text(report.value());
    os << rendered;
    if (!cfg.out.empty() && !clidetail::write_file(cfg.out, rendered, err)) return 1;

    if (!report.value().all_pass()) {
        err << "failed scenarios:\n";
        for (const auto& o : report.value().outcomes)
            if (!o.informational && !o.pass) err << "  " << o.name << "\n";
        return 1;
    }
    return 0;
}

// Instrumented per-phase operation counts and wire sizes.
inline int cmd_bench(const CliConfig& cfg, std::ostream& os, std::ostream& err) {
    auto wc = clidetail::make_world_config(cfg);
    if (!wc) return clidetail::fail(err, "configuration", wc.error());
    auto report = run_cost_report(wc.value());
    if (!report) return clidetail::fail(err, "cost measurement", report.error());
    std::string rendered = cfg.format == "kv" ? render_cost_kv(report.value())
                                              : render_cost_text(report.value());
    os << rendered;
    if (!cfg.out.empty() && !clidetail::write_file(cfg.out, rendered, err)) return 1;
    return 0;
}

// Fresh server state written to --out (default: server.state).
inline int cmd_keygen(const CliConfig& cfg, std::ostream& os, std::ostream& err) {
    auto wc = clidetail::make_world_config(cfg);
    if (!wc) return clidetail::fail(err, "configuration", wc.error());
    Rng rng(cfg.seed);
    auto st = setup(wc.value().curve, wc.value().server_id, cfg.delta_t_ms, rng);
    if (!st) return clidetail::fail(err, "setup", st.error());

    std::string path = cfg.out.empty() ? "server.state" : cfg.out;
    if (auto saved = save_server_state(path, st.value().second); !saved)
        return clidetail::fail(err, "writing " + path, saved.error());
    os << "server state written to " << path << "\n";
    os << "PK_S: " << point_hex(st.value().first.pk_s) << "\n";
    return 0;
}

inline int cmd_show_config(const CliConfig& cfg, std::ostream& os, std::ostream&) {
    os << "curve=" << cfg.curve << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "delta_t_ms=" << cfg.delta_t_ms << "\n";
    os << "fe_n=" << cfg.fe_n << "\n";
    os << "fe_k=" << cfg.fe_k << "\n";
    os << "fe_rho=" << cfg.fe_rho << "\n";
    os << "out=" << cfg.out << "\n";
    os << "format=" << cfg.format << "\n";
    os << "state=" << cfg.state << "\n";
    return 0;
}

}  // namespace gridauth
