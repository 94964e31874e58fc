#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridauth/protocol.hpp"
#include "gridauth/result.hpp"
#include "gridauth/rng.hpp"
#include "gridauth/wire.hpp"

namespace gridauth {

// Deterministic simulated world: one user device, one server, an
// injectable monotone clock, and an append-only transcript of every
// message that crossed a channel. All behavior derives from the seed.

class SimClock {
public:
    explicit SimClock(std::uint64_t start_ms) : now_(start_ms) {}

    std::uint64_t now_ms() const { return now_; }
    void advance(std::uint64_t delta_ms) { now_ += delta_ms; }

private:
    std::uint64_t now_;
};

enum class Direction { UserToServer, ServerToUser };
enum class ChannelKind { Public, Secure };

struct TranscriptEntry {
    Direction dir;
    ChannelKind channel;
    std::string label;
    std::vector<std::uint8_t> bytes;
    std::uint64_t sent_at = 0;
};

// What the Dolev-Yao attacker sees of one transcript entry: everything on
// the public channel, length only on the secure channel.
struct AdversaryView {
    Direction dir;
    ChannelKind channel;
    std::string label;
    std::uint64_t sent_at = 0;
    std::size_t size = 0;
    std::optional<std::vector<std::uint8_t>> payload;
};

class Transcript {
public:
    std::size_t append(TranscriptEntry entry) {
        entries_.push_back(std::move(entry));
        return entries_.size() - 1;
    }
    const TranscriptEntry& at(std::size_t i) const { return entries_.at(i); }
    std::size_t size() const { return entries_.size(); }

    AdversaryView adversary_view(std::size_t i) const {
        const TranscriptEntry& e = entries_.at(i);
        AdversaryView v{e.dir, e.channel, e.label, e.sent_at, e.bytes.size(), std::nullopt};
        if (e.channel == ChannelKind::Public) v.payload = e.bytes;
        return v;
    }

    Bytes32 digest() const {
        std::vector<std::uint8_t> buf;
        for (const auto& e : entries_) {
            buf.push_back(e.dir == Direction::UserToServer ? 0 : 1);
            buf.push_back(e.channel == ChannelKind::Public ? 0 : 1);
            buf.insert(buf.end(), e.label.begin(), e.label.end());
            put_u64_be(buf, e.sent_at);
            put_u64_be(buf, e.bytes.size());
            buf.insert(buf.end(), e.bytes.begin(), e.bytes.end());
        }
        return sha256(buf);
    }

private:
    std::vector<TranscriptEntry> entries_;
};

struct WorldConfig {
    CurveParams curve = secp256k1();
    std::uint64_t delta_t_ms = 1000;
    FeParams fe{};
    std::uint64_t hop_latency_ms = 5;
    std::uint64_t seed = 1;
    std::uint64_t start_ms = 1'700'000'000'000;  // fixed epoch; no wall clock anywhere
    std::string server_id = "CS-01";
    std::string user_id = "SM-1001";
};

struct HonestRun {
    MsgA1 m1;
    MsgA2 m2;
    SessionKey sk_user;
    SessionKey sk_server;
    std::size_t m1_index = 0;  // transcript positions
    std::size_t m2_index = 0;
};

// Outcome of handing bytes to a party at the current clock reading.
struct Delivery {
    bool accepted = false;
    Err error = Err::AuthenticationFailure;  // meaningful when !accepted
    std::optional<MsgA2> m2;                 // server deliveries, when accepted
    std::optional<SessionKey> key;           // key derived by the accepting side
};

class World {
public:
    static Result<World> create(WorldConfig cfg) {
        World w(cfg);

        auto st = setup(cfg.curve, cfg.server_id, cfg.delta_t_ms, w.rng_);
        if (!st) return st.error();
        w.params_ = std::move(st.value().first);
        w.server_ = std::move(st.value().second);
        return enroll(std::move(w));
    }

    // Run against a previously persisted server instead of a fresh setup;
    // the loaded parameters win over the config's curve and window.
    static Result<World> create(WorldConfig cfg, ServerState preloaded) {
        cfg.curve = preloaded.params.curve;
        cfg.delta_t_ms = preloaded.params.delta_t_ms;
        cfg.server_id = preloaded.server_id;
        World w(cfg);
        w.params_ = preloaded.params;
        w.server_ = std::move(preloaded);
        return enroll(std::move(w));
    }

private:
    static Result<World> enroll(World w) {
        const WorldConfig& cfg = w.cfg_;

        // Enrollment over the secure channel.
        w.password_ = to_hex(w.rng_.bytes(12));
        w.enrolled_ = BiometricTemplate{w.rng_.bits(cfg.fe.n)};
        auto req = user_reg_request(w.params_, cfg.user_id, w.password_, w.enrolled_, cfg.fe,
                                    w.clock_.now_ms(), w.rng_);
        if (!req) return req.error();
        w.record(Direction::UserToServer, ChannelKind::Secure, "RegRequest",
                 encode_msg(req.value().first));
        w.clock_.advance(cfg.hop_latency_ms);

        auto resp = server_reg_respond(w.server_, req.value().first, w.clock_.now_ms());
        if (!resp) return resp.error();
        w.record(Direction::ServerToUser, ChannelKind::Secure, "RegResponse",
                 encode_msg(resp.value()));
        w.clock_.advance(cfg.hop_latency_ms);

        w.device_ = user_reg_finalize(req.value().second, resp.value());
        return w;
    }

public:
    const WorldConfig& config() const { return cfg_; }
    const SystemParams& params() const { return params_; }
    const ServerState& server() const { return server_; }
    ServerState& server() { return server_; }
    const DeviceStore& device() const { return device_; }
    const std::string& user_id() const { return cfg_.user_id; }
    const std::string& password() const { return password_; }
    const BiometricTemplate& enrolled_template() const { return enrolled_; }
    const Transcript& transcript() const { return transcript_; }
    SimClock& clock() { return clock_; }
    const SimClock& clock() const { return clock_; }
    Rng& rng() { return rng_; }

    // A fresh biometric reading with up to the per-block tolerance of flips,
    // positions drawn from the world rng.
    BiometricTemplate fresh_reading(std::optional<std::size_t> max_flips_per_block =
                                        std::nullopt) {
        const FeParams& fe = cfg_.fe;
        std::size_t cap = max_flips_per_block.value_or(fe.block_tolerance());
        BiometricTemplate reading = enrolled_;
        for (std::size_t blk = 0; blk < fe.k; ++blk) {
            std::size_t flips = rng_.below(cap + 1);
            for (std::size_t f = 0; f < flips; ++f) {
                std::size_t pos = blk * fe.rho + rng_.below(fe.rho);
                reading.bits[pos] ^= 1;
            }
        }
        return reading;
    }

    // A reading guaranteed to defeat majority decoding in block 0.
    BiometricTemplate corrupted_reading() {
        const FeParams& fe = cfg_.fe;
        BiometricTemplate reading = enrolled_;
        std::size_t flips = fe.block_tolerance() + 1;
        for (std::size_t f = 0; f < flips; ++f) reading.bits[f] ^= 1;
        return reading;
    }

    Result<std::pair<MsgA1, PendingSession>> login_start_now() {
        auto started = user_login_start(params_, device_, cfg_.user_id, password_,
                                        fresh_reading(), clock_.now_ms(), rng_);
        if (started)
            record(Direction::UserToServer, ChannelKind::Public, "M_A1",
                   encode_msg(started.value().first));
        return started;
    }

    // Hand M_A1 bytes to the server at the current clock reading.
    Delivery deliver_msga1(const std::vector<std::uint8_t>& bytes) {
        auto m1 = decode_msga1(bytes);
        if (!m1) return Delivery{false, m1.error(), std::nullopt, std::nullopt};
        auto resp = server_auth_respond(server_, m1.value(), clock_.now_ms(), rng_);
        if (!resp) return Delivery{false, resp.error(), std::nullopt, std::nullopt};
        return Delivery{true, Err::AuthenticationFailure, resp.value().first,
                        resp.value().second};
    }

    // Hand M_A2 bytes to a user holding a pending session.
    Delivery deliver_msga2(const PendingSession& pending,
                           const std::vector<std::uint8_t>& bytes) {
        auto m2 = decode_msga2(bytes);
        if (!m2) return Delivery{false, m2.error(), std::nullopt, std::nullopt};
        auto key = user_auth_finalize(params_, pending, m2.value(), clock_.now_ms());
        if (!key) return Delivery{false, key.error(), std::nullopt, std::nullopt};
        return Delivery{true, Err::AuthenticationFailure, std::nullopt, key.value()};
    }

    // Full login over the public channel with per-hop latency. Fails only
    // if some protocol step rejects, which for honest inputs inside the
    // freshness window is itself a finding.
    Result<HonestRun> run_honest_session(std::optional<std::uint64_t> hop1 = std::nullopt,
                                         std::optional<std::uint64_t> hop2 = std::nullopt) {
        auto started = login_start_now();
        if (!started) return started.error();
        HonestRun run;
        run.m1 = started.value().first;
        run.m1_index = transcript_.size() - 1;

        clock_.advance(hop1.value_or(cfg_.hop_latency_ms));
        Delivery server_side = deliver_msga1(transcript_.at(run.m1_index).bytes);
        if (!server_side.accepted) return server_side.error;
        run.m2 = *server_side.m2;
        run.sk_server = *server_side.key;
        run.m2_index = record(Direction::ServerToUser, ChannelKind::Public, "M_A2",
                              encode_msg(run.m2));

        clock_.advance(hop2.value_or(cfg_.hop_latency_ms));
        Delivery user_side =
            deliver_msga2(started.value().second, transcript_.at(run.m2_index).bytes);
        if (!user_side.accepted) return user_side.error;
        run.sk_user = *user_side.key;
        return run;
    }

    // Credential update over the secure channel; on success the world's
    // user holds the new password/biometric and the refreshed device store.
    Result<void> run_update(const std::string& password_new,
                            const BiometricTemplate& b_new) {
        auto req = user_update_request(device_, cfg_.user_id, password_, fresh_reading(),
                                       password_new, b_new, clock_.now_ms(), rng_);
        if (!req) return req.error();
        record(Direction::UserToServer, ChannelKind::Secure, "UpdateRequest",
               encode_msg(req.value().first));
        clock_.advance(cfg_.hop_latency_ms);

        auto resp = server_update_respond(server_, req.value().first, clock_.now_ms());
        if (!resp) return resp.error();
        record(Direction::ServerToUser, ChannelKind::Secure, "UpdateResponse",
               encode_msg(resp.value()));
        clock_.advance(cfg_.hop_latency_ms);

        device_ = user_update_finalize(req.value().second, resp.value());
        password_ = password_new;
        enrolled_ = b_new;
        return {};
    }

    std::size_t record(Direction dir, ChannelKind channel, std::string label,
                       std::vector<std::uint8_t> bytes) {
        return transcript_.append(
            TranscriptEntry{dir, channel, std::move(label), std::move(bytes),
                            clock_.now_ms()});
    }

private:
    explicit World(const WorldConfig& cfg)
        : cfg_(cfg), clock_(cfg.start_ms), rng_(cfg.seed) {}

    WorldConfig cfg_;
    SimClock clock_;
    Rng rng_;
    SystemParams params_;
    ServerState server_;
    DeviceStore device_;
    std::string password_;
    BiometricTemplate enrolled_;
    Transcript transcript_;
};

}  // namespace gridauth
