#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridauth/cli.hpp"

using namespace gridauth;

namespace {

CliConfig toy_cli(std::uint64_t seed) {
    CliConfig cfg;
    cfg.curve = "toy23";
    cfg.seed = seed;
    cfg.fe_n = 12;
    cfg.fe_k = 4;
    cfg.fe_rho = 3;
    return cfg;
}

struct Run {
    int status;
    std::string out;
    std::string err;
};

template <typename Cmd>
Run run(Cmd cmd, const CliConfig& cfg) {
    std::ostringstream out, err;
    int status = cmd(cfg, out, err);
    return {status, out.str(), err.str()};
}

}  // namespace

TEST_CASE("demo succeeds and reports matching keys") {
    Run r = run(cmd_demo, toy_cli(21));
    CHECK(r.status == 0);
    CHECK(r.out.find("keys match") != std::string::npos);
    CHECK(r.out.find("M_A1.S1: ") != std::string::npos);
    CHECK(r.out.find("SK_US: ") != std::string::npos);
    CHECK(r.out.find("SK_SU: ") != std::string::npos);
}

TEST_CASE("demo with a zero freshness window fails with StaleTimestamp") {
    CliConfig cfg = toy_cli(22);
    cfg.delta_t_ms = 0;  // hop latency is nonzero, so every check misses
    Run r = run(cmd_demo, cfg);
    CHECK(r.status != 0);
    CHECK(r.err.find("StaleTimestamp") != std::string::npos);
}

TEST_CASE("demo output is byte-identical for a fixed seed") {
    Run a = run(cmd_demo, toy_cli(23));
    Run b = run(cmd_demo, toy_cli(23));
    Run c = run(cmd_demo, toy_cli(24));
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
}

TEST_CASE("update demo walks the full credential swap") {
    Run r = run(cmd_update_demo, toy_cli(25));
    CHECK(r.status == 0);
    CHECK(r.out.find("login with new credentials: ok") != std::string::npos);
    CHECK(r.out.find("rejected (LocalAuthFailure)") != std::string::npos);
    CHECK(r.out.find("refused, state unchanged") != std::string::npos);
}

TEST_CASE("attacks command writes a deterministic report and exits clean") {
    CliConfig cfg = toy_cli(26);
    cfg.out = "cli_test_attacks.report";
    cfg.format = "kv";
    Run a = run(cmd_attacks, cfg);
    CHECK(a.status == 0);
    CHECK(a.out.find("all_pass=1") != std::string::npos);
    CHECK(a.out.find("scenario=replay-msga1-within-window") != std::string::npos);
    CHECK(a.out.find("info=1") != std::string::npos);

    std::ifstream in(cfg.out);
    REQUIRE(in.good());
    std::stringstream file_content;
    file_content << in.rdbuf();
    CHECK(file_content.str() == a.out);

    Run b = run(cmd_attacks, cfg);
    CHECK(a.out == b.out);
    std::remove(cfg.out.c_str());
}

TEST_CASE("attacks command rejects a corrupted server-state file") {
    const char* path = "cli_test_corrupt.state";
    {
        std::ofstream out(path);
        out << "gridauth-server-state v1\nprofile: mangled\n";
    }
    CliConfig cfg = toy_cli(27);
    cfg.state = path;
    Run r = run(cmd_attacks, cfg);
    CHECK(r.status != 0);
    CHECK(r.err.find("error: loading server state") != std::string::npos);
    std::remove(path);
}

TEST_CASE("bench counts match a by-hand enumeration of the formulas") {
    CliConfig cfg = toy_cli(28);
    cfg.format = "kv";
    Run r = run(cmd_bench, cfg);
    REQUIRE(r.status == 0);

    // Per side and phase: h(.) calls and scalar multiplications read off
    // the protocol formulas; see also the acceptance suite.
    CHECK(r.out.find("phase=setup hash=0 scalar_mul=1") != std::string::npos);
    CHECK(r.out.find("phase=registration-user hash=3 scalar_mul=0") != std::string::npos);
    CHECK(r.out.find("phase=registration-server hash=1 scalar_mul=0") != std::string::npos);
    CHECK(r.out.find("phase=login-user-start hash=4 scalar_mul=1") != std::string::npos);
    CHECK(r.out.find("phase=login-server hash=3 scalar_mul=3") != std::string::npos);
    CHECK(r.out.find("phase=login-user-finalize hash=2 scalar_mul=2") != std::string::npos);
    CHECK(r.out.find("phase=login-user-total hash=6 scalar_mul=3") != std::string::npos);
    CHECK(r.out.find("phase=update-user hash=5 scalar_mul=0") != std::string::npos);
    CHECK(r.out.find("phase=update-server hash=1 scalar_mul=0") != std::string::npos);

    // Canonical layout sizes: 32 + 32 + 65 + 8.
    CHECK(r.out.find("message=M_A1 bytes=137") != std::string::npos);
    CHECK(r.out.find("message=M_A2 bytes=137") != std::string::npos);

    Run again = run(cmd_bench, cfg);
    CHECK(r.out == again.out);
}

TEST_CASE("keygen emits a state file that demo and attacks can consume") {
    CliConfig cfg = toy_cli(29);
    cfg.out = "cli_test_keygen.state";
    Run kg = run(cmd_keygen, cfg);
    CHECK(kg.status == 0);
    CHECK(kg.out.find("PK_S: ") != std::string::npos);

    CliConfig use = toy_cli(30);
    use.state = cfg.out;
    Run demo = run(cmd_demo, use);
    CHECK(demo.status == 0);
    CHECK(demo.out.find("keys match") != std::string::npos);

    Run attacks = run(cmd_attacks, use);
    CHECK(attacks.status == 0);
    std::remove(cfg.out.c_str());
}

TEST_CASE("show-config prints the effective configuration") {
    CliConfig cfg = toy_cli(31);
    cfg.format = "kv";
    Run r = run(cmd_show_config, cfg);
    CHECK(r.status == 0);
    CHECK(r.out.find("curve=toy23") != std::string::npos);
    CHECK(r.out.find("seed=31") != std::string::npos);
    CHECK(r.out.find("delta_t_ms=1000") != std::string::npos);
    CHECK(r.out.find("fe_n=12") != std::string::npos);
    CHECK(r.out.find("fe_rho=3") != std::string::npos);
}

TEST_CASE("bad configuration is reported, not crashed on") {
    CliConfig cfg = toy_cli(32);
    cfg.fe_rho = 5;  // 4 * 5 != 12
    Run r = run(cmd_demo, cfg);
    CHECK(r.status != 0);
    CHECK(r.err.find("BadConfig") != std::string::npos);

    CliConfig missing = toy_cli(33);
    missing.curve = "no-such-curve";
    Run r2 = run(cmd_demo, missing);
    CHECK(r2.status != 0);
}
