#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "hbc/cli/commands.hpp"
#include "hbc/errors.hpp"

namespace {

constexpr const char* kCommands[] = {"saddle", "descend", "instanton", "sweep-gamma", "fit-zeta",
                                     "kc",     "fit-mu",  "ed-run",    "ed-average",  "predict"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian circuit saddle-point and exact-diagonalization toolkit"};
    app.set_version_flag("--version", hbc::cli::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string manifest_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    for (const char* name : kCommands) {
        CLI::App* sub = app.add_subcommand(name, std::string("run ") + name + " from a config file");
        auto* cfg = sub->add_option("--config,-c", config_path, "INI config file");
        auto* man = sub->add_option("--manifest", manifest_path, "replay the run recorded in a manifest");
        cfg->excludes(man);
        sub->add_option("--out,-o", out_dir, "output directory");
        sub->add_option("--seed", seed, "override run.seed");
        sub->add_option("--threads", threads, "override run.threads");
    }

    CLI11_PARSE(app, argc, argv);

    if (config_path.empty() == manifest_path.empty()) {
        std::cerr << "exactly one of --config or --manifest is required\n";
        return 2;
    }
    const CLI::App* chosen = app.get_subcommands().front();
    const auto cmd = hbc::cli::parse_command(chosen->get_name());
    try {
        std::filesystem::create_directories(out_dir);
        hbc::cli::RunOptions opt{out_dir, seed, threads};
        const hbc::cli::RunManifest m =
            manifest_path.empty() ? hbc::cli::run_config(config_path, opt, cmd)
                                  : hbc::cli::run_config(hbc::cli::config_from_manifest(manifest_path, cmd), opt);
        for (const auto& o : m.outputs) std::cout << o.file << " " << o.sha256 << "\n";
        for (const auto& i : m.items)
            if (!i.ok) std::cerr << "failed: " << i.name << ": " << i.message << "\n";
        std::cout << "content_hash " << m.content_hash << "\n";
        return m.ok() ? 0 : 1;
    } catch (const hbc::ConfigParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const hbc::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
