#include "commands.hpp"
#include "config.hpp"

#include "nct/errors.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
    cmd->add_option("--threads", flags.threads, "Worker threads, 0 = hardware (overrides)");
    cmd->add_option("--out", flags.out_dir, "Output directory (overrides)");
    cmd->add_option("--format", flags.format, "csv or json (overrides)")
        ->check(CLI::IsMember({"csv", "json"}));
}

nct::cli::RunConfig load_config(const CommonFlags& flags) {
    nct::cli::RunConfig config = flags.config_path.empty()
                                     ? nct::cli::RunConfig{}
                                     : nct::cli::RunConfig::from_file(flags.config_path);
    if (flags.seed) config.master_seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.out_dir) config.out_dir = *flags.out_dir;
    if (flags.format) config.format = *flags.format;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"neighbour-count dependent thinning of Poisson point processes"};
    app.require_subcommand(1);

    CommonFlags flags;
    int (*command)(const nct::cli::RunConfig&) = nullptr;

    const struct {
        const char* name;
        const char* description;
        int (*fn)(const nct::cli::RunConfig&);
    } subcommands[] = {
        {"analyze", "Exact intensity, expansions and the pair-correlation curve",
         nct::cli::cmd_analyze},
        {"simulate", "Replicated thinning (optionally coupled), patterns and summaries",
         nct::cli::cmd_simulate},
        {"estimate", "Empirical intensity / pair-correlation / Laplace with analytic overlays",
         nct::cli::cmd_estimate},
        {"bounds", "Poisson-approximation bound reports and the route comparison table",
         nct::cli::cmd_bounds},
        {"selftest", "Reduced-scale oracle and invariant sweep", nct::cli::cmd_selftest},
    };
    for (const auto& sub : subcommands) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.description);
        add_common_flags(cmd, flags);
        cmd->callback([&command, fn = sub.fn] { command = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return command(load_config(flags));
    } catch (const nct::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nct::numeric_failure& e) {
        std::cerr << "numeric failure: " << e.what()
                  << " (last estimate " << e.last_estimate() << ")\n";
        return 3;
    } catch (const nct::degenerate_denominator& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
