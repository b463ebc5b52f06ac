#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbc/ed/trajectory.hpp"
#include "hbc/optimizer.hpp"

namespace hbc::cli {

inline constexpr int kConfigFormat = 1;

enum class Command { Saddle, Descend, Instanton, SweepGamma, FitZeta, Kc, FitMu, EdRun, EdAverage, Predict };

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& s);

// Parsed run description. Physical values are in units J = 1; `J` only rescales outputs.
struct RunConfig {
    Command command = Command::Saddle;
    std::uint64_t seed = 0;
    int threads = 1;

    double J = 1.0;
    double gamma = 0.0;
    int N = 1;

    double dt = 0.05;
    std::optional<double> T;
    GridPolicy grid_policy;
    DescentSettings descent;

    // descend
    std::string seed_config = "trivial";
    std::string boundary = "p2";
    double k = 0.5;
    double center_fraction = 0.5;

    // sweep-gamma, fit-zeta, fit-mu
    std::vector<double> gammas;

    // kc, fit-mu
    double k_min = 0.5, k_max = 0.51, k_step = 0.001;

    // ed-run, ed-average
    ed::EDParams ed;
    std::string ed_input;

    // predict
    std::vector<double> times;
    double T0_eff = 1.0;

    std::string source_text;
    std::vector<std::pair<std::string, std::string>> entries;  // section.key = value, file order

    ModelParams model() const { return ModelParams{1.0, gamma, N}; }
    TimeGrid grid() const;
};

// Throws ConfigParseError on syntax, unknown keys, or malformed values, and
// ValidationError listing every violated invariant.
RunConfig parse_config(const std::string& text, std::optional<Command> expected = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Command> expected = std::nullopt);

}  // namespace hbc::cli
