#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridauth/curve.hpp"
#include "gridauth/fuzzy.hpp"
#include "gridauth/protocol.hpp"
#include "gridauth/result.hpp"

namespace gridauth {

// Canonical binary layout: fixed-width fields in declaration order.
// Bytes32 raw; points as flag || x || y big-endian (flag 0x04 affine,
// 0x00 identity with zero coordinates); timestamps 8-octet big-endian ms.

inline constexpr std::size_t kPointWireSize = 1 + 2 * kWidth;          // 65
inline constexpr std::size_t kHandshakeWireSize = 2 * kWidth + kPointWireSize + 8;  // 137

inline void append_bytes32(std::vector<std::uint8_t>& out, const Bytes32& b) {
    out.insert(out.end(), b.begin(), b.end());
}

inline void append_point(std::vector<std::uint8_t>& out, const Point& pt) {
    if (pt.is_identity()) {
        out.push_back(0x00);
        out.insert(out.end(), 2 * kWidth, 0x00);
        return;
    }
    out.push_back(0x04);
    append_bytes32(out, u256_to_be(pt.x));
    append_bytes32(out, u256_to_be(pt.y));
}

inline Result<Point> read_point(const std::uint8_t* p) {
    if (p[0] == 0x00) {
        for (std::size_t i = 1; i < kPointWireSize; ++i)
            if (p[i] != 0) return Err::MalformedMessage;
        return Point::identity();
    }
    if (p[0] != 0x04) return Err::MalformedMessage;
    Bytes32 xb, yb;
    std::copy(p + 1, p + 1 + kWidth, xb.begin());
    std::copy(p + 1 + kWidth, p + 1 + 2 * kWidth, yb.begin());
    Point out;
    out.x = u256_from_be(xb);
    out.y = u256_from_be(yb);
    return out;
}

inline Bytes32 read_bytes32(const std::uint8_t* p) {
    Bytes32 b;
    std::copy(p, p + kWidth, b.begin());
    return b;
}

inline std::vector<std::uint8_t> encode_msg(const MsgA1& m) {
    std::vector<std::uint8_t> out;
    out.reserve(kHandshakeWireSize);
    append_bytes32(out, m.s1);
    append_bytes32(out, m.id_u1);
    append_point(out, m.u_point);
    put_u64_be(out, m.t1);
    return out;
}

inline std::vector<std::uint8_t> encode_msg(const MsgA2& m) {
    std::vector<std::uint8_t> out;
    out.reserve(kHandshakeWireSize);
    append_bytes32(out, m.id_s1);
    append_bytes32(out, m.s2);
    append_point(out, m.s_point);
    put_u64_be(out, m.t3);
    return out;
}

inline Result<MsgA1> decode_msga1(const std::vector<std::uint8_t>& buf) {
    if (buf.size() != kHandshakeWireSize) return Err::MalformedMessage;
    MsgA1 m;
    m.s1 = read_bytes32(buf.data());
    m.id_u1 = read_bytes32(buf.data() + kWidth);
    auto pt = read_point(buf.data() + 2 * kWidth);
    if (!pt) return pt.error();
    m.u_point = pt.value();
    m.t1 = get_u64_be(buf.data() + 2 * kWidth + kPointWireSize);
    return m;
}

inline Result<MsgA2> decode_msga2(const std::vector<std::uint8_t>& buf) {
    if (buf.size() != kHandshakeWireSize) return Err::MalformedMessage;
    MsgA2 m;
    m.id_s1 = read_bytes32(buf.data());
    m.s2 = read_bytes32(buf.data() + kWidth);
    auto pt = read_point(buf.data() + 2 * kWidth);
    if (!pt) return pt.error();
    m.s_point = pt.value();
    m.t3 = get_u64_be(buf.data() + 2 * kWidth + kPointWireSize);
    return m;
}

// Registration and update requests carry a length-prefixed identity; they
// travel the secure channel only.
inline std::vector<std::uint8_t> encode_msg(const RegRequest& m) {
    std::vector<std::uint8_t> out;
    out.push_back(std::uint8_t(m.id.size() >> 8));
    out.push_back(std::uint8_t(m.id.size() & 0xff));
    out.insert(out.end(), m.id.begin(), m.id.end());
    append_bytes32(out, m.r1);
    put_u64_be(out, m.t_rg1);
    return out;
}

inline Result<RegRequest> decode_reg_request(const std::vector<std::uint8_t>& buf) {
    if (buf.size() < 2) return Err::MalformedMessage;
    std::size_t len = (std::size_t(buf[0]) << 8) | buf[1];
    if (buf.size() != 2 + len + kWidth + 8) return Err::MalformedMessage;
    RegRequest m;
    m.id.assign(buf.begin() + 2, buf.begin() + 2 + len);
    m.r1 = read_bytes32(buf.data() + 2 + len);
    m.t_rg1 = get_u64_be(buf.data() + 2 + len + kWidth);
    return m;
}

inline std::vector<std::uint8_t> encode_msg(const RegResponse& m) {
    std::vector<std::uint8_t> out;
    append_bytes32(out, m.r3);
    put_u64_be(out, m.t);
    return out;
}

inline std::vector<std::uint8_t> encode_msg(const UpdateRequest& m) {
    return encode_msg(RegRequest{m.id, m.r1_star, m.t_rg1});
}

inline std::vector<std::uint8_t> encode_msg(const UpdateResponse& m) {
    return encode_msg(RegResponse{m.r3_star, m.t});
}

// --- Human-readable transcript form --------------------------------------

inline std::string point_hex(const Point& pt) {
    std::vector<std::uint8_t> buf;
    append_point(buf, pt);
    return to_hex(buf);
}

inline std::string hex_u64(std::uint64_t v) {
    std::vector<std::uint8_t> buf;
    put_u64_be(buf, v);
    return to_hex(buf);
}

inline std::string msg_text(const MsgA1& m) {
    std::ostringstream os;
    os << "M_A1.S1: " << to_hex(m.s1) << "\n";
    os << "M_A1.ID_U1: " << to_hex(m.id_u1) << "\n";
    os << "M_A1.U: " << point_hex(m.u_point) << "\n";
    os << "M_A1.t1: " << hex_u64(m.t1) << "\n";
    return os.str();
}

inline std::string msg_text(const MsgA2& m) {
    std::ostringstream os;
    os << "M_A2.ID_S1: " << to_hex(m.id_s1) << "\n";
    os << "M_A2.S2: " << to_hex(m.s2) << "\n";
    os << "M_A2.S: " << point_hex(m.s_point) << "\n";
    os << "M_A2.t3: " << hex_u64(m.t3) << "\n";
    return os.str();
}

// --- Curve profile files --------------------------------------------------

// JSON object with lowercase big-endian hex fields, no prefix:
// {"name": ..., "p": ..., "c": ..., "d": ..., "q": ..., "gx": ..., "gy": ...}
inline Result<CurveParams> curve_from_json(const nlohmann::json& j) {
    CurveParams cp;
    try {
        cp.name = j.at("name").get<std::string>();
        auto field = [&](const char* key) -> Result<U256> {
            return u256_from_hex(j.at(key).get<std::string>());
        };
        auto p = field("p"), c = field("c"), d = field("d"), q = field("q");
        auto gx = field("gx"), gy = field("gy");
        for (auto* r : {&p, &c, &d, &q, &gx, &gy})
            if (!*r) return r->error();
        cp.p = p.value();
        cp.c = c.value();
        cp.d = d.value();
        cp.q = q.value();
        cp.g.x = gx.value();
        cp.g.y = gy.value();
    } catch (const nlohmann::json::exception&) {
        return Err::BadConfig;
    }
    return cp;
}

// Resolve a --curve argument: a built-in profile name, or a path to a
// JSON profile file.
inline Result<CurveParams> load_curve_profile(const std::string& name_or_path) {
    if (auto builtin = builtin_curve(name_or_path)) return *builtin;
    std::ifstream in(name_or_path);
    if (!in) return Err::BadConfig;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        return Err::BadConfig;
    }
    return curve_from_json(j);
}

// --- State persistence ------------------------------------------------------

// Versioned line-based files; identities are hex-encoded so arbitrary
// strings round-trip.

namespace wiredetail {

inline std::string id_hex(const std::string& s) {
    return to_hex(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

inline Result<std::string> id_from_hex(const std::string& hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes) return Err::MalformedMessage;
    return std::string(bytes.value().begin(), bytes.value().end());
}

inline void put_curve(std::ostream& os, const CurveParams& cp) {
    os << "profile: " << cp.name << "\n";
    os << "curve.p: " << to_hex(cp.p) << "\n";
    os << "curve.c: " << to_hex(cp.c) << "\n";
    os << "curve.d: " << to_hex(cp.d) << "\n";
    os << "curve.q: " << to_hex(cp.q) << "\n";
    os << "curve.gx: " << to_hex(cp.g.x) << "\n";
    os << "curve.gy: " << to_hex(cp.g.y) << "\n";
}

// Reads "key: value" lines into pairs, preserving order.
inline Result<std::vector<std::pair<std::string, std::string>>> read_kv_lines(
    std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto colon = line.find(": ");
        if (colon == std::string::npos) return Err::MalformedMessage;
        out.emplace_back(line.substr(0, colon), line.substr(colon + 2));
    }
    return out;
}

struct KvReader {
    std::vector<std::pair<std::string, std::string>> kv;
    bool missing = false;

    std::string get(const std::string& key) {
        for (auto& [k, v] : kv)
            if (k == key) return v;
        missing = true;
        return {};
    }
    std::vector<std::string> get_all(const std::string& key) const {
        std::vector<std::string> out;
        for (auto& [k, v] : kv)
            if (k == key) out.push_back(v);
        return out;
    }
};

inline Result<CurveParams> read_curve(KvReader& r) {
    CurveParams cp;
    cp.name = r.get("profile");
    auto p = u256_from_hex(r.get("curve.p"));
    auto c = u256_from_hex(r.get("curve.c"));
    auto d = u256_from_hex(r.get("curve.d"));
    auto q = u256_from_hex(r.get("curve.q"));
    auto gx = u256_from_hex(r.get("curve.gx"));
    auto gy = u256_from_hex(r.get("curve.gy"));
    if (r.missing || !p || !c || !d || !q || !gx || !gy) return Err::MalformedMessage;
    cp.p = p.value();
    cp.c = c.value();
    cp.d = d.value();
    cp.q = q.value();
    cp.g.x = gx.value();
    cp.g.y = gy.value();
    return cp;
}

}  // namespace wiredetail

inline constexpr const char* kServerStateMagic = "gridauth-server-state v1";
inline constexpr const char* kDeviceStoreMagic = "gridauth-device-store v1";

inline void save_server_state(std::ostream& os, const ServerState& server) {
    os << kServerStateMagic << "\n";
    wiredetail::put_curve(os, server.params.curve);
    os << "hash: " << server.params.hash_id << "\n";
    os << "delta_t_ms: " << server.params.delta_t_ms << "\n";
    os << "server_id: " << wiredetail::id_hex(server.server_id) << "\n";
    os << "x: " << to_hex(server.x.v) << "\n";
    os << "next_y: " << server.next_y << "\n";
    for (const auto& u : server.users) {
        os << "user: " << wiredetail::id_hex(u.id) << " " << to_hex(u.r1) << " "
           << to_hex(u.r3) << " " << u.y << "\n";
    }
}

inline Result<void> save_server_state(const std::string& path, const ServerState& server) {
    std::ofstream out(path);
    if (!out) return Err::IoError;
    save_server_state(out, server);
    return out.good() ? Result<void>{} : Result<void>{Err::IoError};
}

inline Result<ServerState> load_server_state(std::istream& is) {
    std::string magic;
    if (!std::getline(is, magic) || magic != kServerStateMagic) return Err::MalformedMessage;
    auto kv = wiredetail::read_kv_lines(is);
    if (!kv) return kv.error();
    wiredetail::KvReader r{std::move(kv).value()};

    auto curve = wiredetail::read_curve(r);
    if (!curve) return curve.error();
    if (auto v = validate_curve(curve.value()); !v) return Err::MalformedMessage;

    ServerState server;
    server.params.curve = curve.value();
    server.params.hash_id = r.get("hash");
    auto x = u256_from_hex(r.get("x"));
    auto sid = wiredetail::id_from_hex(r.get("server_id"));
    std::uint64_t delta_t = 0, next_y = 0;
    try {
        delta_t = std::stoull(r.get("delta_t_ms"));
        next_y = std::stoull(r.get("next_y"));
    } catch (...) {
        return Err::MalformedMessage;
    }
    if (r.missing || !x || !sid) return Err::MalformedMessage;
    if (x.value().is_zero() || cmp(x.value(), server.params.curve.q) >= 0)
        return Err::MalformedMessage;

    server.x = Scalar{x.value()};
    server.server_id = sid.value();
    server.params.delta_t_ms = delta_t;
    server.next_y = next_y;
    server.params.pk_s =
        scalar_mul(server.x, server.params.curve.g, server.params.curve).value();

    for (const std::string& line : r.get_all("user")) {
        std::istringstream fields(line);
        std::string idh, r1h, r3h;
        std::uint64_t y = 0;
        if (!(fields >> idh >> r1h >> r3h >> y)) return Err::MalformedMessage;
        auto id = wiredetail::id_from_hex(idh);
        auto r1 = bytes32_from_hex(r1h);
        auto r3 = bytes32_from_hex(r3h);
        if (!id || !r1 || !r3) return Err::MalformedMessage;
        server.users.push_back(UserRecord{id.value(), r1.value(), r3.value(), y});
    }
    return server;
}

inline Result<ServerState> load_server_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Err::IoError;
    return load_server_state(in);
}

inline void save_device_store(std::ostream& os, const DeviceStore& dev,
                              const std::string& profile_name) {
    os << kDeviceStoreMagic << "\n";
    os << "profile: " << profile_name << "\n";
    os << "user_id: " << wiredetail::id_hex(dev.user_id) << "\n";
    os << "r3: " << to_hex(dev.r3) << "\n";
    os << "r4: " << to_hex(dev.r4) << "\n";
    os << "r5: " << to_hex(dev.r5) << "\n";
    os << "r: " << to_hex(dev.r.v) << "\n";
    os << "fe: " << dev.helper.params.n << " " << dev.helper.params.k << " "
       << dev.helper.params.rho << "\n";
    os << "sketch: " << bits_to_hex(dev.helper.sketch).value() << "\n";
}

inline Result<void> save_device_store(const std::string& path, const DeviceStore& dev,
                                      const std::string& profile_name) {
    std::ofstream out(path);
    if (!out) return Err::IoError;
    save_device_store(out, dev, profile_name);
    return out.good() ? Result<void>{} : Result<void>{Err::IoError};
}

inline Result<DeviceStore> load_device_store(std::istream& is) {
    std::string magic;
    if (!std::getline(is, magic) || magic != kDeviceStoreMagic) return Err::MalformedMessage;
    auto kv = wiredetail::read_kv_lines(is);
    if (!kv) return kv.error();
    wiredetail::KvReader r{std::move(kv).value()};

    DeviceStore dev;
    auto id = wiredetail::id_from_hex(r.get("user_id"));
    auto r3 = bytes32_from_hex(r.get("r3"));
    auto r4 = bytes32_from_hex(r.get("r4"));
    auto r5 = bytes32_from_hex(r.get("r5"));
    auto rv = u256_from_hex(r.get("r"));
    FeParams fe;
    {
        std::istringstream fields(r.get("fe"));
        if (!(fields >> fe.n >> fe.k >> fe.rho)) return Err::MalformedMessage;
    }
    auto sketch = bits_from_hex(r.get("sketch"));
    if (r.missing || !id || !r3 || !r4 || !r5 || !rv || !sketch)
        return Err::MalformedMessage;
    if (!fe.valid() || sketch.value().size() != fe.n) return Err::MalformedMessage;

    dev.user_id = id.value();
    dev.r3 = r3.value();
    dev.r4 = r4.value();
    dev.r5 = r5.value();
    dev.r = Scalar{rv.value()};
    dev.helper = HelperData{std::move(sketch).value(), fe};
    return dev;
}

inline Result<DeviceStore> load_device_store(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Err::IoError;
    return load_device_store(in);
}

}  // namespace gridauth
