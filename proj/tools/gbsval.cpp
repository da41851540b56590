#include <cstdint>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbsval/cli/commands.hpp"
#include "gbsval/cli/config.hpp"
#include "gbsval/errors.hpp"
#include "gbsval/version.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
    std::vector<std::string> set;
};

gbsval::cli::RunConfig resolve(const std::string& command, const Flags& flags)
{
    gbsval::cli::ConfigMap map;
    if (!flags.config.empty()) {
        map = gbsval::cli::ConfigMap::load(flags.config);
    }
    for (const auto& kv : flags.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw gbsval::ConfigError("--set: expected key=value, got '" + kv + "'");
        }
        map.set(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv.substr(0, eq));
    }
    if (flags.seed) {
        map.set("seed", std::to_string(*flags.seed), "--seed");
    }
    if (flags.threads) {
        map.set("threads", std::to_string(*flags.threads), "--threads");
    }
    if (!flags.out.empty()) {
        map.set("out", flags.out, "--out");
    }
    return gbsval::cli::build_run_config(map, gbsval::cli::command_needs_model(command));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase-space simulation and statistical validation for threshold-detector Gaussian boson sampling"};
    app.set_version_flag("--version", std::string(gbsval::kVersion));
    app.require_subcommand(1);

    Flags flags;
    app.add_option("--config", flags.config, "key = value configuration file");
    app.add_option("--seed", flags.seed, "master seed");
    app.add_option("--threads", flags.threads, "worker thread cap")->check(CLI::PositiveNumber);
    app.add_option("--out", flags.out, "output directory");
    app.add_option("--set", flags.set, "override a configuration key (key=value)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "phase-space GCP (and intensity correlations) for the configured model"},
        {"fake", "classical fake patterns from a thermal or squashed model"},
        {"bin", "grouped counts of a pattern file"},
        {"compare", "chi-square and Z of a theory GCP against counts"},
        {"permtest", "compare under random output-mode permutations"},
        {"fit", "fit (t, epsilon) to total-count data"},
        {"oracle", "exact GCP by inclusion-exclusion (M <= 12)"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto outputs = gbsval::cli::run_command(command, resolve(command, flags));
        for (const auto& path : outputs) {
            std::cout << path.string() << '\n';
        }
        return 0;
    } catch (const gbsval::ConfigError& e) {
        std::cerr << "gbsval " << command << ": config error: " << e.what() << '\n';
        return 2;
    } catch (const gbsval::DataError& e) {
        std::cerr << "gbsval " << command << ": data error: " << e.what() << '\n';
        return 3;
    } catch (const gbsval::NumericalError& e) {
        std::cerr << "gbsval " << command << ": numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "gbsval " << command << ": " << e.what() << '\n';
        return 1;
    }
}
