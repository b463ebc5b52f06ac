#include "hbc/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "hbc/ed/aggregate.hpp"
#include "hbc/errors.hpp"
#include "hbc/fit.hpp"
#include "hbc/parallel.hpp"

namespace hbc::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kGammaC = 1.0 / 18.0;

std::string prefix(const RunConfig& c) {
    std::string p = command_name(c.command);
    std::replace(p.begin(), p.end(), '-', '_');
    return p;
}

Table config_table(const std::string& name, const FieldConfig& f, double J) {
    Table t{name, {"t", "bx", "bz"}, {}};
    for (std::size_t i = 0; i < f.size(); ++i) t.add({f.grid.midpoint(i) / J, f.bx[i] * J, f.bz[i] * J});
    return t;
}

FieldConfig seed_config(const RunConfig& c, const TimeGrid& grid) {
    const ModelParams p = c.model();
    if (c.seed_config == "trivial") {
        const SaddlePoint s = trivial_saddle(p);
        return FieldConfig(grid, s.bx, s.bz);
    }
    if (c.seed_config == "instanton") return instanton_seed(delta_param(p), c.center_fraction * grid.T(), grid);
    const auto [plus, minus] = broken_saddles(p);
    const SaddlePoint& s = c.seed_config == "broken_plus" ? plus : minus;
    return FieldConfig(grid, s.bx, s.bz);
}

BoundarySpec boundary(const RunConfig& c) {
    if (c.boundary == "p2") return BoundarySpec::p2();
    if (c.boundary == "z2") return BoundarySpec::z2();
    return BoundarySpec::subsystem(c.k);
}

Table ed_table(const std::string& name, const std::vector<ed::TrajectoryRecord>& recs, double J) {
    const ed::AveragedSeries roa = ed::aggregate(recs, ed::Protocol::RatioOfAverages);
    const ed::AveragedSeries aor = ed::aggregate(recs, ed::Protocol::AverageOfRatios);
    Table t{name, {"t", "entropy_ratio_of_averages", "entropy_average_of_ratios", "stderr"}, {}};
    for (std::size_t i = 0; i < roa.times.size(); ++i)
        t.add({roa.times[i] / J, roa.entropy[i], aor.entropy[i], aor.stderr_aor[i]});
    return t;
}

void add_mutual_information(std::vector<Table>& tables, const std::string& name,
                            const std::vector<ed::TrajectoryRecord>& recs, double J) {
    if (recs.front().subsystems.empty()) return;
    const ed::AveragedSeries roa = ed::aggregate(recs, ed::Protocol::RatioOfAverages);
    Table t{name + "_mutual_information", {"t"}, {}};
    for (int a : roa.subsystem_sizes) t.columns.push_back("mi_size_" + std::to_string(a));
    for (std::size_t i = 0; i < roa.times.size(); ++i) {
        std::vector<double> row{roa.times[i] / J};
        for (const auto& mi : roa.mutual_information) row.push_back(mi[i]);
        t.add(row);
    }
    tables.push_back(std::move(t));
}

Table fit_table(const std::string& name, const FitResult& f) {
    Table t{name, {"exponent", "stderr", "x_min", "x_max", "r_squared", "n"}, {}};
    t.add({f.exponent, f.std_error, f.window.first, f.window.second, f.r_squared, static_cast<double>(f.n)});
    return t;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + format_double(x);
    return s;
}

std::vector<std::pair<std::string, std::string>> resolved_parameters(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> r;
    auto put = [&](const std::string& k, const std::string& v) { r.emplace_back(k, v); };
    auto num = [&](const std::string& k, double v) { put(k, format_double(v)); };
    put("units", "J = 1 internally; outputs rescaled by J");
    num("model.J", c.J);
    if (c.command != Command::EdRun && c.command != Command::EdAverage) num("model.N", c.N);
    switch (c.command) {
        case Command::Saddle:
            num("model.gamma", c.gamma);
            break;
        case Command::EdRun:
        case Command::EdAverage:
            num("model.gamma", c.gamma);
            num("ed.N", c.ed.N);
            num("ed.dt", c.ed.dt);
            num("ed.total_time", c.ed.total_time);
            num("ed.realizations", c.ed.n_realizations);
            num("ed.krylov_dim", c.ed.krylov_dim);
            {
                std::vector<double> t;
                for (std::size_t s : c.ed.sample_steps()) t.push_back(static_cast<double>(s) * c.ed.dt);
                put("ed.sample_times", join(t));
                std::string sizes;
                for (int a : c.ed.subsystem_sizes) sizes += (sizes.empty() ? "" : " ") + std::to_string(a);
                put("ed.subsystem_sizes", sizes);
            }
            if (c.command == Command::EdAverage) put("ed.input", c.ed_input);
            break;
        default:
            num("grid.dt", c.dt);
            if (c.T) num("grid.T", *c.T);
            num("grid.min_T", c.grid_policy.min_T);
            num("grid.max_T", c.grid_policy.max_T);
            num("grid.widths", c.grid_policy.widths);
            num("descent.step_size", c.descent.step_size);
            num("descent.bz_step_ratio", c.descent.bz_step_ratio);
            num("descent.growth", c.descent.growth);
            num("descent.threshold", c.descent.threshold);
            num("descent.max_iters", c.descent.max_iters);
            if (c.command == Command::SweepGamma || c.command == Command::FitZeta || c.command == Command::FitMu)
                put("gammas", join(c.gammas));
            else
                num("model.gamma", c.gamma);
            if (c.command == Command::Descend) {
                put("descend.seed_config", c.seed_config);
                put("descend.boundary", c.boundary);
                num("descend.k", c.k);
                num("descend.center", c.center_fraction);
            }
            if (c.command == Command::Kc || c.command == Command::FitMu) {
                num("kc.k_min", c.k_min);
                num("kc.k_max", c.k_max);
                num("kc.k_step", c.k_step);
            }
            if (c.command == Command::Predict) {
                put("predict.times", join(c.times));
                num("predict.T0_eff", c.T0_eff);
            }
    }
    return r;
}

}  // namespace

bool RunManifest::ok() const {
    return std::all_of(items.begin(), items.end(), [](const ManifestItem& i) { return i.ok; });
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["seed"] = seed;
    j["threads"] = threads;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [k, v] : resolved) res[k] = v;
    j["resolved"] = res;
    j["config_text"] = config_text;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["status"] = ok() ? "ok" : "failed";
    j["items"] = nlohmann::ordered_json::array();
    for (const auto& i : items) j["items"].push_back({{"name", i.name}, {"ok", i.ok}, {"message", i.message}});
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"sha256", o.sha256}});
    j["content_hash"] = content_hash;
    j["notes"] = notes;
    return j.dump(2) + "\n";
}

std::vector<Table> execute(const RunConfig& c, RunManifest& m, std::vector<std::string>* jsonl) {
    const double J = c.J;
    const ModelParams p = c.model();
    std::vector<Table> tables;
    const std::string pre = prefix(c);

    switch (c.command) {
        case Command::Saddle: {
            Table t{pre, {"branch", "bx", "bz", "bulk_density"}, {}};
            const ModelParams phys{J, c.gamma * J, c.N};
            auto row = [&](const std::string& name, const SaddlePoint& s) {
                t.rows.push_back({name, format_double(s.bx), format_double(s.bz),
                                  format_double(bulk_action_density(s.bx, s.bz, phys))});
            };
            row("trivial", trivial_saddle(phys));
            if (c.gamma <= kGammaC) {
                const auto [plus, minus] = broken_saddles(phys);
                row("broken_plus", plus);
                row("broken_minus", minus);
            } else {
                m.notes.push_back("broken saddles are imaginary above gamma_c");
            }
            m.items.push_back({"saddle", true, ""});
            tables.push_back(std::move(t));
            break;
        }
        case Command::Descend: {
            const TimeGrid grid = c.grid();
            const DescentResult r = descend_ascend(seed_config(c, grid), boundary(c), p, c.descent);
            tables.push_back(config_table(pre + "_config", r.config, J));
            Table s{pre + "_summary",
                    {"total", "bulk", "logK_A", "logK_Abar", "iterations", "converged", "last_change", "grad_norm"},
                    {}};
            s.add({r.action.total, r.action.bulk, r.action.logK_A, r.action.logK_Abar, static_cast<double>(r.iterations),
                   r.converged ? 1.0 : 0.0, r.last_change, r.grad_norm});
            tables.push_back(std::move(s));
            m.items.push_back({"descend", r.converged, r.converged ? "" : "max_iters reached; best configuration kept"});
            break;
        }
        case Command::Instanton: {
            const InstantonResult r = instanton_action(p, c.grid(), c.descent);
            tables.push_back(config_table(pre + "_P2", r.config_P2, J));
            tables.push_back(config_table(pre + "_Z2", r.config_Z2, J));
            Table t{pre, {"gamma", "i_star", "grad_norm", "iters"}, {}};
            t.add({c.gamma * J, r.i_star, r.residual_grad_norm * J,
                   static_cast<double>(r.iterations_P2 + r.iterations_Z2)});
            tables.push_back(std::move(t));
            for (const auto& w : r.warnings) m.notes.push_back(w);
            m.items.push_back({"instanton", r.converged, r.converged ? "" : "max_iters reached"});
            break;
        }
        case Command::SweepGamma:
        case Command::FitZeta: {
            GridPolicy policy = c.grid_policy;
            policy.dt = c.dt;
            std::optional<TimeGrid> grid;
            if (c.T) grid = TimeGrid::with_duration(*c.T, c.dt);
            const auto rows = sweep_gamma(c.gammas, p, grid, c.descent, c.threads, policy);
            Table t{c.command == Command::FitZeta ? pre + "_sweep" : pre, {"gamma", "i_star", "grad_norm", "iters"}, {}};
            std::vector<double> xs, ys;
            for (const auto& r : rows) {
                const bool usable = r.error.empty() || r.error == "max_iters reached";
                t.add({r.gamma * J, usable ? r.i_star : std::nan(""), r.grad_norm * J, static_cast<double>(r.iters)});
                m.items.push_back({"gamma=" + format_double(r.gamma * J), r.ok, r.error});
                if (r.ok) {
                    xs.push_back((kGammaC - r.gamma) * J);
                    ys.push_back(r.i_star);
                }
            }
            tables.push_back(std::move(t));
            if (c.command == Command::FitZeta) {
                try {
                    tables.push_back(fit_table(pre, fit_power_law(xs, ys)));
                    m.items.push_back({"fit", true, ""});
                } catch (const Error& e) {
                    m.items.push_back({"fit", false, e.what()});
                }
            }
            break;
        }
        case Command::Kc: {
            try {
                const CriticalFractionResult r =
                    critical_fraction(p, c.grid(), c.descent, k_grid_range(c.k_min, c.k_max, c.k_step));
                Table scan{pre + "_scan", {"k", "delta_I_bdy", "i_star"}, {}};
                for (const auto& row : r.rows) scan.add({row.k, row.delta_I_bdy, row.i_star});
                tables.push_back(std::move(scan));
                Table t{pre, {"gamma", "k_c", "error_bar", "i_star"}, {}};
                t.add({c.gamma * J, r.k_c, r.error_bar, r.i_star});
                tables.push_back(std::move(t));
                m.items.push_back({"kc", true, ""});
            } catch (const Error& e) {
                m.items.push_back({"kc", false, e.what()});
            }
            break;
        }
        case Command::FitMu: {
            const auto ks = k_grid_range(c.k_min, c.k_max, c.k_step);
            std::vector<std::optional<CriticalFractionResult>> res(c.gammas.size());
            std::vector<std::string> errs(c.gammas.size());
            parallel_for(c.gammas.size(), c.threads, [&](std::size_t i) {
                try {
                    const ModelParams pi{1.0, c.gammas[i], c.N};
                    GridPolicy policy = c.grid_policy;
                    policy.dt = c.dt;
                    const TimeGrid grid = c.T ? TimeGrid::with_duration(*c.T, c.dt) : default_grid(pi, policy);
                    res[i] = critical_fraction(pi, grid, c.descent, ks);
                } catch (const std::exception& e) {
                    errs[i] = e.what();
                }
            });
            Table t{pre + "_kc", {"gamma", "k_c", "error_bar", "i_star"}, {}};
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < c.gammas.size(); ++i) {
                const double g = c.gammas[i];
                m.items.push_back({"gamma=" + format_double(g * J), res[i].has_value(), errs[i]});
                if (!res[i]) {
                    t.add({g * J, std::nan(""), std::nan(""), std::nan("")});
                    continue;
                }
                t.add({g * J, res[i]->k_c, res[i]->error_bar, res[i]->i_star});
                xs.push_back((kGammaC - g) * J);
                ys.push_back(res[i]->k_c - 0.5);
            }
            tables.push_back(std::move(t));
            try {
                tables.push_back(fit_table(pre, fit_power_law(xs, ys)));
                m.items.push_back({"fit", true, ""});
            } catch (const Error& e) {
                m.items.push_back({"fit", false, e.what()});
            }
            break;
        }
        case Command::EdRun: {
            ed::EDParams e = c.ed;
            e.seed = c.seed;
            const auto recs = ed::run_realizations(e, p, c.threads);
            if (jsonl)
                for (const auto& r : recs) jsonl->push_back(ed::to_json_line(r));
            tables.push_back(ed_table(pre, recs, J));
            add_mutual_information(tables, pre, recs, J);
            m.items.push_back({"ed-run", true, std::to_string(recs.size()) + " realizations"});
            break;
        }
        case Command::EdAverage: {
            std::vector<ed::TrajectoryRecord> recs;
            std::istringstream in(read_file(c.ed_input));
            std::string line;
            while (std::getline(in, line))
                if (!line.empty()) recs.push_back(ed::from_json_line(line));
            tables.push_back(ed_table(pre, recs, J));
            add_mutual_information(tables, pre, recs, J);
            m.items.push_back({"ed-average", true, std::to_string(recs.size()) + " records"});
            break;
        }
        case Command::Predict: {
            const auto s = entropy_series_prediction(p, c.N, c.times, c.descent, c.dt, c.T0_eff);
            Table t{pre, {"t", "entropy"}, {}};
            for (std::size_t i = 0; i < s.size(); ++i) t.add({c.times[i] / J, s[i]});
            tables.push_back(std::move(t));
            m.items.push_back({"predict", true, ""});
            break;
        }
    }
    return tables;
}

void emit_report(RunManifest& m, const std::vector<Table>& tables, const std::string& out_dir,
                 const std::vector<std::string>* jsonl) {
    if (tables.empty()) throw ValidationError("no tables to write");
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& t : tables) files.emplace_back(t.name + ".csv", to_csv(t));
    if (jsonl && !jsonl->empty()) {
        std::string body;
        for (const auto& l : *jsonl) body += l + "\n";
        std::string stem = m.command;
        std::replace(stem.begin(), stem.end(), '-', '_');
        files.emplace_back(stem + "_trajectories.jsonl", body);
    }
    std::sort(files.begin(), files.end());
    std::string digest_input;
    for (const auto& [name, body] : files) {
        write_atomic((fs::path(out_dir) / name).string(), body);
        const std::string h = sha256_hex(body);
        m.outputs.push_back({name, h});
        digest_input += name + ":" + h + "\n";
    }
    m.content_hash = sha256_hex(digest_input);
}

RunManifest run_config(RunConfig cfg, const RunOptions& opt) {
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;
    if (cfg.threads < 1) throw ValidationError("threads must be >= 1");

    RunManifest m;
    m.command = command_name(cfg.command);
    m.seed = cfg.seed;
    m.threads = cfg.threads;
    m.config_text = cfg.source_text;
    m.config = cfg.entries;
    m.resolved = resolved_parameters(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Table> tables;
    std::vector<std::string> jsonl;
    try {
        tables = execute(cfg, m, &jsonl);
    } catch (const std::exception& e) {
        m.items.push_back({m.command, false, e.what()});
    }
    if (!tables.empty()) emit_report(m, tables, opt.out_dir, &jsonl);
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string stem = m.command;
    std::replace(stem.begin(), stem.end(), '-', '_');
    write_atomic((fs::path(opt.out_dir) / (stem + ".manifest.json")).string(), m.to_json());
    return m;
}

RunManifest run_config(const std::string& path, const RunOptions& opt, std::optional<Command> expected) {
    return run_config(load_config(path, expected), opt);
}

RunConfig config_from_manifest(const std::string& path, std::optional<Command> expected) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParseError(path + ": not a manifest: " + e.what(), 0, "");
    }
    if (!j.contains("config_text") || !j.contains("seed") || !j.contains("threads"))
        throw ConfigParseError(path + ": manifest lacks config_text, seed or threads", 0, "");
    if (!expected && j.contains("command")) expected = parse_command(j.at("command").get<std::string>());
    RunConfig cfg = parse_config(j.at("config_text").get<std::string>(), expected);
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.threads = j.at("threads").get<int>();
    return cfg;
}

}  // namespace hbc::cli
