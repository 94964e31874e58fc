// gridauth command-line tool: protocol demos, the adversary suite,
// cost accounting, and server-state persistence.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridauth/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ECC + biometric mutual authentication for smart-grid links"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand name
    app.set_config("--config", "", "read defaults from an INI/TOML file");

    gridauth::CliConfig cfg;
    app.add_option("--curve", cfg.curve, "curve profile name or JSON profile file")
        ->envname("GRIDAUTH_CURVE")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "deterministic seed")
        ->envname("GRIDAUTH_SEED")
        ->capture_default_str();
    app.add_option("--delta-t", cfg.delta_t_ms, "freshness window in ms")
        ->envname("GRIDAUTH_DELTA_T")
        ->capture_default_str();
    app.add_option("--fe-n", cfg.fe_n, "biometric template length in bits")
        ->envname("GRIDAUTH_FE_N")
        ->capture_default_str();
    app.add_option("--fe-k", cfg.fe_k, "biometric secret length in bits")
        ->envname("GRIDAUTH_FE_K")
        ->capture_default_str();
    app.add_option("--fe-rho", cfg.fe_rho, "repetition factor")
        ->envname("GRIDAUTH_FE_RHO")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output file for reports/state")
        ->envname("GRIDAUTH_OUT");
    app.add_option("--format", cfg.format, "report format")
        ->check(CLI::IsMember({"text", "kv"}))
        ->envname("GRIDAUTH_FORMAT")
        ->capture_default_str();
    app.add_option("--state", cfg.state, "persisted server-state input file")
        ->envname("GRIDAUTH_STATE");

    auto* demo = app.add_subcommand("demo", "run one full registration + authentication");
    auto* update_demo =
        app.add_subcommand("update-demo", "exercise the password/biometric update phase");
    auto* attacks = app.add_subcommand("attacks", "run the adversary scenario suite");
    auto* bench = app.add_subcommand("bench", "measure per-phase operation counts");
    auto* keygen = app.add_subcommand("keygen", "emit a fresh persisted server state");
    auto* show = app.add_subcommand("show-config", "print the effective configuration");

    CLI11_PARSE(app, argc, argv);

    if (demo->parsed()) return gridauth::cmd_demo(cfg, std::cout, std::cerr);
    if (update_demo->parsed()) return gridauth::cmd_update_demo(cfg, std::cout, std::cerr);
    if (attacks->parsed()) return gridauth::cmd_attacks(cfg, std::cout, std::cerr);
    if (bench->parsed()) return gridauth::cmd_bench(cfg, std::cout, std::cerr);
    if (keygen->parsed()) return gridauth::cmd_keygen(cfg, std::cout, std::cerr);
    if (show->parsed()) return gridauth::cmd_show_config(cfg, std::cout, std::cerr);
    return 2;
}
