#include "hbc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hbc/cli/report.hpp"
#include "hbc/errors.hpp"

namespace hbc::cli {

namespace {

namespace pt = boost::property_tree;

constexpr double kGammaC = 1.0 / 18.0;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"format", "command", "seed", "threads"}},
        {"model", {"J", "gamma", "gamma_over_gc", "N"}},
        {"grid", {"dt", "T", "min_T", "max_T", "widths"}},
        {"descent", {"step_size", "bz_step_ratio", "growth", "threshold", "max_iters"}},
        {"descend", {"seed_config", "boundary", "k", "center"}},
        {"sweep", {"gammas", "gamma_over_gc"}},
        {"kc", {"k_min", "k_max", "k_step", "gammas", "gamma_over_gc"}},
        {"ed", {"N", "dt", "total_time", "realizations", "krylov_dim", "sample_times", "subsystem_sizes", "input"}},
        {"predict", {"times", "N", "T0_eff"}},
    };
    return s;
}

std::set<std::string> sections_for(Command c) {
    switch (c) {
        case Command::Saddle: return {"run", "model"};
        case Command::Descend: return {"run", "model", "grid", "descent", "descend"};
        case Command::Instanton: return {"run", "model", "grid", "descent"};
        case Command::SweepGamma:
        case Command::FitZeta: return {"run", "model", "grid", "descent", "sweep"};
        case Command::Kc:
        case Command::FitMu: return {"run", "model", "grid", "descent", "kc"};
        case Command::EdRun:
        case Command::EdAverage: return {"run", "model", "ed"};
        case Command::Predict: return {"run", "model", "grid", "descent", "predict"};
    }
    return {};
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& field, const std::string& v) {
    const std::string t = trim(v);
    const auto d = parse_double(t);
    if (!d || !std::isfinite(*d)) throw ConfigParseError("'" + v + "' is not a finite number", 0, field);
    return *d;
}

long long to_int(const std::string& field, const std::string& v) {
    const std::string t = trim(v);
    std::size_t pos = 0;
    long long n = 0;
    try {
        n = std::stoll(t, &pos);
    } catch (const std::exception&) {
        throw ConfigParseError("'" + v + "' is not an integer", 0, field);
    }
    if (pos != t.size()) throw ConfigParseError("'" + v + "' is not an integer", 0, field);
    return n;
}

std::uint64_t to_u64(const std::string& field, const std::string& v) {
    const std::string t = trim(v);
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        if (!t.empty() && t[0] == '-') throw std::invalid_argument("negative");
        n = std::stoull(t, &pos);
    } catch (const std::exception&) {
        throw ConfigParseError("'" + v + "' is not an unsigned integer", 0, field);
    }
    if (pos != t.size()) throw ConfigParseError("'" + v + "' is not an unsigned integer", 0, field);
    return n;
}

std::vector<double> to_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(field, item));
    }
    return out;
}

// 1-based line of `section.key` in the source, 0 when absent.
int line_of(const std::string& text, const std::string& field) {
    const auto dot = field.find('.');
    if (dot == std::string::npos) return 0;
    const std::string section = field.substr(0, dot), key = field.substr(dot + 1);
    std::istringstream in(text);
    std::string line, current;
    for (int n = 1; std::getline(in, line); ++n) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
        } else if (current == section) {
            const auto eq = t.find('=');
            if (eq != std::string::npos && trim(t.substr(0, eq)) == key) return n;
        }
    }
    return 0;
}

RunConfig parse_fields(const pt::ptree& tree, const std::string& text, std::optional<Command> expected);

}  // namespace

std::string command_name(Command c) {
    switch (c) {
        case Command::Saddle: return "saddle";
        case Command::Descend: return "descend";
        case Command::Instanton: return "instanton";
        case Command::SweepGamma: return "sweep-gamma";
        case Command::FitZeta: return "fit-zeta";
        case Command::Kc: return "kc";
        case Command::FitMu: return "fit-mu";
        case Command::EdRun: return "ed-run";
        case Command::EdAverage: return "ed-average";
        case Command::Predict: return "predict";
    }
    return "?";
}

std::optional<Command> parse_command(const std::string& s) {
    for (Command c : {Command::Saddle, Command::Descend, Command::Instanton, Command::SweepGamma, Command::FitZeta,
                      Command::Kc, Command::FitMu, Command::EdRun, Command::EdAverage, Command::Predict})
        if (command_name(c) == s) return c;
    return std::nullopt;
}

TimeGrid RunConfig::grid() const {
    if (T) return TimeGrid::with_duration(*T, dt);
    GridPolicy p = grid_policy;
    p.dt = dt;
    return default_grid(model(), p);
}

RunConfig parse_config(const std::string& text, std::optional<Command> expected) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigParseError(e.message(), static_cast<int>(e.line()));
    }
    try {
        return parse_fields(tree, text, expected);
    } catch (const ConfigParseError& e) {
        if (e.line() != 0 || e.field().empty()) throw;
        const int line = line_of(text, e.field());
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw ConfigParseError(msg + " (field " + e.field() + (line ? ", line " + std::to_string(line) : "") + ")",
                               line, e.field());
    }
}

namespace {

RunConfig parse_fields(const pt::ptree& tree, const std::string& text, std::optional<Command> expected) {
    RunConfig c;
    c.source_text = text;
    std::map<std::string, std::string> kv;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigParseError("key '" + section + "' must sit inside a [section]", 0, section);
        const auto sit = schema().find(section);
        if (sit == schema().end()) throw ConfigParseError("unknown section [" + section + "]", 0, section);
        for (const auto& [key, val] : body) {
            const std::string field = section + "." + key;
            if (!sit->second.count(key)) throw ConfigParseError("unknown key", 0, field);
            kv[field] = trim(val.data());
            c.entries.emplace_back(field, trim(val.data()));
        }
    }
    auto has = [&](const std::string& f) { return kv.count(f) > 0; };

    if (!has("run.format")) throw ConfigParseError("missing format version", 0, "run.format");
    if (to_int("run.format", kv["run.format"]) != kConfigFormat)
        throw ConfigParseError("unsupported format version " + kv["run.format"], 0, "run.format");
    std::optional<Command> cmd;
    if (has("run.command")) {
        cmd = parse_command(kv["run.command"]);
        if (!cmd) throw ConfigParseError("unknown command '" + kv["run.command"] + "'", 0, "run.command");
    }
    if (expected && cmd && *expected != *cmd)
        throw ConfigParseError("config is for '" + command_name(*cmd) + "', invoked as '" + command_name(*expected) + "'",
                               0, "run.command");
    if (!cmd) cmd = expected;
    if (!cmd) throw ConfigParseError("no command given", 0, "run.command");
    c.command = *cmd;

    const std::set<std::string> allowed = sections_for(c.command);
    for (const auto& [field, _] : kv) {
        const std::string section = field.substr(0, field.find('.'));
        if (!allowed.count(section))
            throw ConfigParseError("section [" + section + "] does not apply to " + command_name(c.command), 0, field);
    }

    auto num = [&](const std::string& f, double& dst) {
        if (has(f)) dst = to_double(f, kv[f]);
    };
    auto integer = [&](const std::string& f, int& dst) {
        if (has(f)) dst = static_cast<int>(to_int(f, kv[f]));
    };

    if (has("run.seed")) c.seed = to_u64("run.seed", kv["run.seed"]);
    integer("run.threads", c.threads);
    num("model.J", c.J);
    num("model.gamma", c.gamma);
    if (has("model.gamma_over_gc")) c.gamma = to_double("model.gamma_over_gc", kv["model.gamma_over_gc"]) * kGammaC;
    integer("model.N", c.N);
    num("grid.dt", c.dt);
    if (has("grid.T")) c.T = to_double("grid.T", kv["grid.T"]);
    num("grid.min_T", c.grid_policy.min_T);
    num("grid.max_T", c.grid_policy.max_T);
    num("grid.widths", c.grid_policy.widths);
    num("descent.step_size", c.descent.step_size);
    num("descent.bz_step_ratio", c.descent.bz_step_ratio);
    num("descent.growth", c.descent.growth);
    num("descent.threshold", c.descent.threshold);
    integer("descent.max_iters", c.descent.max_iters);
    if (has("descend.seed_config")) c.seed_config = kv["descend.seed_config"];
    if (has("descend.boundary")) c.boundary = kv["descend.boundary"];
    num("descend.k", c.k);
    num("descend.center", c.center_fraction);
    for (const std::string sec : {"sweep", "kc"}) {
        if (has(sec + ".gammas")) c.gammas = to_list(sec + ".gammas", kv[sec + ".gammas"]);
        if (has(sec + ".gamma_over_gc")) {
            for (double f : to_list(sec + ".gamma_over_gc", kv[sec + ".gamma_over_gc"])) c.gammas.push_back(f * kGammaC);
        }
    }
    num("kc.k_min", c.k_min);
    num("kc.k_max", c.k_max);
    num("kc.k_step", c.k_step);
    c.ed.N = c.N;
    integer("ed.N", c.ed.N);
    num("ed.dt", c.ed.dt);
    num("ed.total_time", c.ed.total_time);
    integer("ed.realizations", c.ed.n_realizations);
    integer("ed.krylov_dim", c.ed.krylov_dim);
    if (has("ed.sample_times")) c.ed.sample_times = to_list("ed.sample_times", kv["ed.sample_times"]);
    if (has("ed.subsystem_sizes")) {
        for (double v : to_list("ed.subsystem_sizes", kv["ed.subsystem_sizes"])) {
            if (v != std::floor(v)) throw ConfigParseError("subsystem sizes must be integers", 0, "ed.subsystem_sizes");
            c.ed.subsystem_sizes.push_back(static_cast<int>(v));
        }
    }
    if (has("ed.input")) c.ed_input = kv["ed.input"];
    if (has("predict.times")) c.times = to_list("predict.times", kv["predict.times"]);
    integer("predict.N", c.N);
    num("predict.T0_eff", c.T0_eff);

    // Collect every violated invariant before reporting.
    std::vector<std::string> bad;
    if (has("model.gamma") && has("model.gamma_over_gc")) bad.push_back("model.gamma and model.gamma_over_gc both set");
    if (!(c.J > 0.0)) bad.push_back("model.J must be > 0");
    if (!(c.gamma >= 0.0)) bad.push_back("model.gamma must be >= 0");
    if (c.N < 1) bad.push_back("model.N must be >= 1");
    if (c.threads < 1) bad.push_back("run.threads must be >= 1");
    if (!(c.dt > 0.0)) bad.push_back("grid.dt must be > 0");
    if (c.T && !(*c.T >= 3.0 * c.dt)) bad.push_back("grid.T must cover at least 3 steps");
    if (!(c.grid_policy.min_T > 0.0) || !(c.grid_policy.max_T >= c.grid_policy.min_T))
        bad.push_back("grid.min_T / grid.max_T must satisfy 0 < min_T <= max_T");
    if (!(c.grid_policy.widths > 0.0)) bad.push_back("grid.widths must be > 0");
    try {
        c.descent.validate();
    } catch (const Error& e) {
        bad.push_back(std::string("descent: ") + e.what());
    }
    switch (c.command) {
        case Command::Descend: {
            static const std::set<std::string> seeds = {"trivial", "broken_plus", "broken_minus", "instanton"};
            static const std::set<std::string> bounds = {"p2", "z2", "subsystem"};
            if (!seeds.count(c.seed_config)) bad.push_back("descend.seed_config must be trivial|broken_plus|broken_minus|instanton");
            if (!bounds.count(c.boundary)) bad.push_back("descend.boundary must be p2|z2|subsystem");
            if (!(c.k >= 0.0 && c.k <= 1.0)) bad.push_back("descend.k must lie in [0, 1]");
            if (!(c.center_fraction > 0.0 && c.center_fraction < 1.0)) bad.push_back("descend.center must lie in (0, 1)");
            if (c.seed_config != "trivial" && c.gamma >= kGammaC) bad.push_back("broken and instanton seeds need gamma < gamma_c");
            break;
        }
        case Command::SweepGamma:
        case Command::FitZeta:
        case Command::FitMu:
            if (c.gammas.empty() && c.command != Command::SweepGamma) bad.push_back("gamma list is empty");
            if (!std::is_sorted(c.gammas.begin(), c.gammas.end())) bad.push_back("gamma list must be sorted");
            for (double g : c.gammas)
                if (!(g >= 0.0)) bad.push_back("gamma values must be >= 0");
            if (c.command != Command::SweepGamma) {
                if (c.gammas.size() < 4) bad.push_back("exponent fits need at least 4 gamma values");
                for (double g : c.gammas)
                    if (!(g < kGammaC)) bad.push_back("exponent fits need every gamma below gamma_c");
            }
            break;
        case Command::Kc:
            if (!(c.gamma < kGammaC)) bad.push_back("kc needs gamma < gamma_c");
            break;
        case Command::EdRun:
            try {
                c.ed.validate();
            } catch (const Error& e) {
                bad.push_back(std::string("ed: ") + e.what());
            }
            break;
        case Command::EdAverage:
            if (c.ed_input.empty()) bad.push_back("ed.input must name a JSON-lines file");
            break;
        case Command::Predict:
            if (c.times.empty()) bad.push_back("predict.times is empty");
            if (!std::is_sorted(c.times.begin(), c.times.end())) bad.push_back("predict.times must be increasing");
            if (!(c.T0_eff > 0.0)) bad.push_back("predict.T0_eff must be > 0");
            break;
        default: break;
    }
    if (c.command == Command::Kc || c.command == Command::FitMu) {
        if (!(c.k_step > 0.0) || !(c.k_max > c.k_min) || c.k_min < 0.0 || c.k_max > 1.0)
            bad.push_back("kc grid needs 0 <= k_min < k_max <= 1 and k_step > 0");
    }
    if (!bad.empty()) {
        std::string msg;
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ValidationError(std::to_string(bad.size()) + " invalid setting(s):" + msg);
    }
    return c;
}

}  // namespace

RunConfig load_config(const std::string& path, std::optional<Command> expected) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigParseError(std::string("cannot read config: ") + e.what(), 0, path);
    }
    return parse_config(text, expected);
}

}  // namespace hbc::cli
