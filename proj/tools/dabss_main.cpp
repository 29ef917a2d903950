// dabss: steady state, small-signal transfer functions and verification
// for a four-interval dual-active-bridge model.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dabss/cli.hpp"
#include "dabss/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dual-active-bridge periodic steady state and z-domain small-signal analysis", "dabss"};
    app.set_version_flag("--version", std::string(dabss::kVersion));
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string method = "full";
    std::string surface = "P+";
    std::string model = "fix";

    auto* steady = app.add_subcommand("steady-state", "Solve the periodic operating point, write JSON");
    steady->add_option("config", config, "Config file (JSON)")->required();
    steady->add_option("--method", method, "full | half")->check(CLI::IsMember({"full", "half"}));
    steady->add_option("--out,-o", out, "Output JSON path")->required();

    auto* verify = app.add_subcommand("verify", "Check every symmetry and equivalence identity");
    verify->add_option("config", config, "Config file (JSON)")->required();

    auto* bode = app.add_subcommand("bode", "Sweep H_fix / H_sc, write CSV");
    bode->add_option("config", config, "Config file (JSON)")->required();
    bode->add_option("--surface", surface, "P+ | S+ | P- | S-")->check(CLI::IsMember({"P+", "S+", "P-", "S-"}));
    bode->add_option("--model", model, "fix | sc | both")->check(CLI::IsMember({"fix", "sc", "both"}));
    bode->add_option("--out,-o", out, "Output CSV path")->required();

    auto* simulate = app.add_subcommand("simulate", "Time-domain steady-state waveform, write CSV");
    simulate->add_option("config", config, "Config file (JSON)")->required();
    simulate->add_option("--out,-o", out, "Output CSV path")->required();

    auto* compare = app.add_subcommand("compare", "Model vs injection-oracle frequency response, write CSV");
    compare->add_option("config", config, "Config file (JSON)")->required();
    compare->add_option("--surface", surface, "P+ | S+ | P- | S-")->check(CLI::IsMember({"P+", "S+", "P-", "S-"}));
    compare->add_option("--out,-o", out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return dabss::cli::kConfigError;
    }

    namespace cli = dabss::cli;
    if (*steady) {
        return cli::cmd_steady_state(config, method, out, std::cerr);
    }
    if (*verify) {
        return cli::cmd_verify(config, std::cout, std::cerr);
    }
    if (*bode) {
        return cli::cmd_bode(config, surface, model, out, std::cerr);
    }
    if (*simulate) {
        return cli::cmd_simulate(config, out, std::cerr);
    }
    return cli::cmd_compare(config, surface, out, std::cerr);
}
