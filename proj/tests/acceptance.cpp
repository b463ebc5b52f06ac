// Acceptance criteria. Prints one PASS/FAIL line per criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/tools/minima.hpp>

#include "dense_oracle.hpp"
#include "hbc/action.hpp"
#include "hbc/ed/aggregate.hpp"
#include "hbc/ed/trajectory.hpp"
#include "hbc/fit.hpp"
#include "hbc/model.hpp"
#include "hbc/optimizer.hpp"

using namespace hbc;

namespace {

constexpr double gc = 1.0 / 18.0;

// Tolerances.
constexpr double kStationarity = 1e-8;
constexpr double kGradientRel = 1e-6;
constexpr double kCrossHigh = 1e-5;
constexpr double kCrossLow = 1e-6;
constexpr double kZetaLo = 1.35, kZetaHi = 1.60;
constexpr double kAmplitudeRel = 0.10;
constexpr double kMuLo = 0.9, kMuHi = 1.1;
constexpr double kReflection = 1e-6;
constexpr double kConservation = 1e-9;
constexpr double kOracle = 1e-7;
constexpr double kAreaLawCeiling = 0.5;
constexpr double kVolumeLawFloor = 2.5;
constexpr double kProtocolRel = 0.15;

struct Profile {
    int phase_N = 6;
    int phase_realizations = 20;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

ModelParams at(double g) { return ModelParams{1.0, g, 1}; }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

FieldConfig random_smooth(std::mt19937_64& rng, double T) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldConfig c(TimeGrid::with_duration(T, 0.05));
    const double ax = 0.03 * u(rng), az = 0.03 + 0.01 * u(rng);
    const double w1 = 0.1 + 0.3 * std::abs(u(rng)), w2 = 0.05 + 0.3 * std::abs(u(rng));
    const double p1 = 3.0 * u(rng), p2 = 3.0 * u(rng);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double t = c.grid.midpoint(i);
        c.bx[i] = ax * std::sin(w1 * t + p1);
        c.bz[i] = az + 0.01 * std::cos(w2 * t + p2);
    }
    return c;
}

Outcome stationarity() {
    const TimeGrid grid = TimeGrid::with_duration(300.0, 0.05);
    const std::size_t mid = grid.steps / 2;
    double worst = 0.0;
    std::string where;
    for (double f : {0.3, 0.7, 1.2, 1.5}) {
        const ModelParams p = at(f * gc);
        std::vector<SaddlePoint> saddles{trivial_saddle(p)};
        if (f < 1.0) {
            const auto [plus, minus] = broken_saddles(p);
            saddles = {plus, minus};
        }
        for (const SaddlePoint& s : saddles) {
            const ActionGradient g = action_gradient(FieldConfig(grid, s.bx, s.bz), BoundarySpec::p2(), p);
            const double r = std::hypot(g.gx[mid], g.gz[mid]);
            if (r > worst) {
                worst = r;
                where = fmt("%.1f", f);
            }
        }
    }
    return {worst < kStationarity, "max mid-bulk |grad| " + fmt("%.3e", worst) + " at gamma/gc " + where};
}

Outcome gradient_exactness() {
    std::mt19937_64 rng(7);
    const BoundarySpec specs[] = {BoundarySpec::p2(), BoundarySpec::z2(), BoundarySpec::subsystem(0.3)};
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
        const ModelParams p = at((0.3 + 0.06 * n) * gc);
        const BoundarySpec& spec = specs[n % 3];
        FieldConfig c = random_smooth(rng, 50.0);
        const ActionGradient g = action_gradient(c, spec, p);
        const double h = 1e-5;
        double diff = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (int comp = 0; comp < 2; ++comp) {
                double& v = comp == 0 ? c.bx[i] : c.bz[i];
                const double v0 = v;
                v = v0 + h;
                const double up = total_action(c, spec, p).total;
                v = v0 - h;
                const double dn = total_action(c, spec, p).total;
                v = v0;
                const double fd = (up - dn) / (2.0 * h);
                const double an = comp == 0 ? g.gx[i] : g.gz[i];
                diff += (an - fd) * (an - fd);
                ref += fd * fd;
            }
        }
        worst = std::max(worst, std::sqrt(diff / ref));
    }
    return {worst < kGradientRel, "max relative error " + fmt("%.3e", worst) + " over 20 configurations"};
}

double i_star(double f) {
    const ModelParams p = at(f * gc);
    return instanton_action(p, default_grid(p), DescentSettings{}).i_star;
}

Outcome critical_point() {
    const std::vector<double> fs{0.95, 0.975, 1.025, 1.05};
    std::vector<double> is;
    for (double f : fs) is.push_back(i_star(f));
    // Exactly one switch: every point left of it above the high mark, every point right of it below the low mark.
    double cross = std::nan("");
    for (std::size_t i = 1; i < is.size(); ++i)
        if (is[i - 1] > kCrossHigh && is[i] < kCrossLow) cross = 0.5 * (fs[i - 1] + fs[i]);
    bool pass = !std::isnan(cross);
    for (std::size_t i = 0; i < is.size(); ++i)
        if (fs[i] < cross ? !(is[i] > kCrossHigh) : !(is[i] < kCrossLow)) pass = false;
    std::string d = "i_star";
    for (std::size_t i = 0; i < fs.size(); ++i) d += " " + fmt("%.3f", fs[i]) + ":" + fmt("%.3e", is[i]);
    return {pass, d + "; crossing at gamma/gc " + fmt("%.4f", cross)};
}

Outcome zeta() {
    std::vector<double> gs, xs, ys;
    for (int i = 0; i < 8; ++i) gs.push_back((0.75 + (0.97 - 0.75) * i / 7.0) * gc);
    const auto rows = sweep_gamma(gs, at(0.0), std::nullopt, DescentSettings{});
    for (const auto& r : rows) {
        if (!r.ok) return {false, "sweep row failed: " + r.error};
        xs.push_back(gc - r.gamma);
        ys.push_back(r.i_star);
    }
    const FitResult f = fit_power_law(xs, ys);
    return {f.exponent >= kZetaLo && f.exponent <= kZetaHi,
            "zeta " + fmt("%.4f", f.exponent) + " +- " + fmt("%.4f", f.std_error) + ", r^2 " + fmt("%.6f", f.r_squared)};
}

Outcome amplitude() {
    bool pass = true;
    std::string d;
    for (double f : {0.90, 0.95}) {
        const double delta = delta_param(at(f * gc)).delta;
        const double oracle = kink_action_constant() * std::pow(delta, 1.5);
        const double got = i_star(f);
        const double rel = std::abs(got - oracle) / oracle;
        pass = pass && rel < kAmplitudeRel;
        d += fmt("%.2f", f) + ": i_star " + fmt("%.4e", got) + " vs " + fmt("%.4e", oracle) + " (rel " +
             fmt("%.3g", rel) + ") ";
    }
    return {pass, d};
}

Outcome mu() {
    const auto ks = k_grid_range(0.5, 0.8, 0.001);
    std::vector<double> xs, ys;
    std::string d;
    for (double f : {0.90, 0.92, 0.94, 0.96}) {
        const ModelParams p = at(f * gc);
        const CriticalFractionResult r = critical_fraction(p, default_grid(p), DescentSettings{}, ks);
        xs.push_back(gc - p.gamma);
        ys.push_back(r.k_c - 0.5);
        d += fmt("%.2f", f) + ":k_c=" + fmt("%.3f", r.k_c) + " ";
    }
    const FitResult fr = fit_power_law(xs, ys);
    return {fr.exponent >= kMuLo && fr.exponent <= kMuHi,
            d + "mu " + fmt("%.4f", fr.exponent) + " +- " + fmt("%.4f", fr.std_error)};
}

Outcome reflection() {
    const ModelParams p = at(1.3 * gc);
    const TimeGrid grid = default_grid(p);
    const SaddlePoint s = trivial_saddle(p);
    double worst = 0.0;
    for (double k : {0.1, 0.3}) {
        const auto a = descend_ascend(FieldConfig(grid, s.bx, s.bz), BoundarySpec::subsystem(k), p, DescentSettings{});
        const auto b = descend_ascend(FieldConfig(grid, s.bx, s.bz), BoundarySpec::subsystem(1.0 - k), p, DescentSettings{});
        worst = std::max(worst, std::abs(a.action.total - b.action.total));
    }
    return {worst < kReflection, "max |total(k) - total(1-k)| " + fmt("%.3e", worst)};
}

Outcome conservation() {
    ed::EDParams e;
    e.N = 4;
    e.total_time = 20.0;
    e.n_realizations = 2;
    e.seed = 3;
    double worst = 0.0;
    for (const auto& r : ed::run_realizations(e, ModelParams{1.0, 0.0, 4}))
        for (std::size_t t = 0; t < r.times.size(); ++t) worst = std::max(worst, std::abs(r.purity(t) - 1.0 / 16.0));
    return {worst < kConservation, "max |purity - 2^-4| " + fmt("%.3e", worst)};
}

Outcome oracle_equivalence() {
    ed::EDParams e;
    e.N = 2;
    e.total_time = 5.0;
    e.seed = 5;
    const ModelParams p{1.0, 2.0 * gc, 2};
    double worst = 0.0;
    for (std::uint32_t real = 0; real < 3; ++real) {
        const ed::TrajectoryRecord r = ed::run_trajectory(e, p, real);
        const oracle::Series o = oracle::trajectory(e, p, real);
        for (std::size_t t = 0; t < r.times.size(); ++t) {
            const double z2 = std::abs(std::expm1(r.log_z2[t] - o.log_z2[t]));
            const double p2 = std::abs(std::expm1(r.log_p2[t] - o.log_p2[t]));
            const double pur = std::abs(r.purity(t) - std::exp(o.log_z2[t] - o.log_p2[t]));
            worst = std::max({worst, z2, p2, pur});
        }
    }
    return {worst < kOracle, "max observable deviation " + fmt("%.3e", worst)};
}

ed::AveragedSeries averaged(int N, double gamma, double T, int realizations, std::uint64_t seed,
                            ed::Protocol protocol, std::vector<ed::TrajectoryRecord>* keep = nullptr) {
    ed::EDParams e;
    e.N = N;
    e.dt = 0.01;
    e.total_time = T;
    e.n_realizations = realizations;
    e.seed = seed;
    const auto recs = ed::run_realizations(e, ModelParams{1.0, gamma, N});
    if (keep) *keep = recs;
    return ed::aggregate(recs, protocol);
}

// Residual sums of squares of S(t) for a + b ln t and for A exp(-t / tau).
std::pair<double, double> decay_residuals(const std::vector<double>& ts, const std::vector<double>& ss) {
    const std::size_t n = ts.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(ts[i]);
        my += ss[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (std::log(ts[i]) - mx) * (std::log(ts[i]) - mx);
        sxy += (std::log(ts[i]) - mx) * (ss[i] - my);
    }
    const double b = sxy / sxx;
    double rss_log = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ss[i] - my - b * (std::log(ts[i]) - mx);
        rss_log += e * e;
    }
    // For fixed rate the best amplitude is closed form; minimize over the rate.
    const auto rss_exp_at = [&](double rate) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-rate * ts[i]);
            num += ss[i] * e;
            den += e * e;
        }
        const double A = num / den;
        double r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ss[i] - A * std::exp(-rate * ts[i]);
            r += e * e;
        }
        return r;
    };
    const auto best = boost::math::tools::brent_find_minima(rss_exp_at, 0.0, 1.0, 40);
    return {rss_log, best.second};
}

Outcome phase_signature(const Profile& prof) {
    const int N = prof.phase_N, R = prof.phase_realizations;
    const ed::AveragedSeries area = averaged(N, 2.0 * gc, 50.0, R, 21, ed::Protocol::RatioOfAverages);
    double area_min = 1e300;
    for (std::size_t t = 0; t < area.times.size(); ++t)
        if (area.times[t] <= 50.0 + 1e-9) area_min = std::min(area_min, area.entropy[t]);

    const ed::AveragedSeries vol = averaged(N, 0.08 * gc, 200.0, R, 22, ed::Protocol::RatioOfAverages);
    double at50 = std::nan("");
    std::vector<double> ts, ss;
    for (std::size_t t = 0; t < vol.times.size(); ++t) {
        if (std::abs(vol.times[t] - 50.0) < 1e-9) at50 = vol.entropy[t];
        if (vol.times[t] >= 100.0 - 1e-9 && vol.times[t] <= 200.0 + 1e-9) {
            ts.push_back(vol.times[t]);
            ss.push_back(vol.entropy[t]);
        }
    }
    const auto [rss_log, rss_exp] = decay_residuals(ts, ss);
    const bool pass = area_min < kAreaLawCeiling && at50 > kVolumeLawFloor && rss_log < rss_exp;
    return {pass, "N=" + std::to_string(N) + " R=" + std::to_string(R) + ": 2gc min S(t<=50) " + fmt("%.3f", area_min) +
                      "; 0.08gc S(50) " + fmt("%.3f", at50) + ", rss log " + fmt("%.3e", rss_log) + " vs exp " +
                      fmt("%.3e", rss_exp)};
}

Outcome protocols() {
    std::vector<ed::TrajectoryRecord> recs;
    const ed::AveragedSeries roa = averaged(6, 0.0044, 50.0, 50, 31, ed::Protocol::RatioOfAverages, &recs);
    const ed::AveragedSeries aor = ed::aggregate(recs, ed::Protocol::AverageOfRatios);
    bool identity = true;
    for (std::size_t t = 0; t < roa.times.size(); ++t) identity = identity && roa.reweighted[t] == roa.purity[t];
    const double a = roa.entropy.back(), b = aor.entropy.back();
    const double rel = std::abs(a - b) / std::abs(a);
    return {identity && rel < kProtocolRel, "S_roa(50) " + fmt("%.4f", a) + ", S_aor(50) " + fmt("%.4f", b) +
                                                " (rel " + fmt("%.3g", rel) + "); reweighting identity " +
                                                (identity ? "exact" : "BROKEN")};
}

Outcome dilute_gas() {
    double worst_ratio = 0.0;
    for (int N : {1, 3, 6})
        for (double i : {0.0, 0.2, 0.7})
            for (double R = 1e-6; R < 0.6; R *= 1.7) {
                const double T = R * std::exp(N * i);
                const double got = purity_dilute_gas(N, i, T);
                worst_ratio = std::max(worst_ratio, std::abs(got - R) / R / (R * R));
            }
    const double sat = purity_dilute_gas(2, 0.1, 1e6);
    const bool pass = worst_ratio < 1.0 && std::abs(sat - 1.0) < 1e-15;
    return {pass, "max (rel err / R^2) " + fmt("%.4f", worst_ratio) + "; purity at T=1e6 " + fmt("%.17g", sat)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string profile = "quick";
    std::vector<int> only;
    app.add_option("--profile", profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    app.add_option("--only", only, "criterion numbers to run");
    CLI11_PARSE(app, argc, argv);

    Profile prof;
    if (profile == "quick") {
        prof.phase_N = 4;
        prof.phase_realizations = 10;
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"saddle stationarity", stationarity},
        {"gradient exactness", gradient_exactness},
        {"critical point", critical_point},
        {"exponent zeta", zeta},
        {"near-critical amplitude", amplitude},
        {"exponent mu", mu},
        {"k <-> 1-k symmetry", reflection},
        {"ED conservation", conservation},
        {"ED oracle equivalence", oracle_equivalence},
        {"ED phase signature", [&] { return phase_signature(prof); }},
        {"averaging protocols", protocols},
        {"dilute-gas limit", dilute_gas},
    };
    const std::set<int> chosen(only.begin(), only.end());
    int failures = 0;
    std::printf("profile %s\n", profile.c_str());
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!chosen.empty() && !chosen.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failures;
}
