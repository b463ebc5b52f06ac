#include "hbc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hbc/errors.hpp"
#include "hbc/parallel.hpp"

namespace hbc {

namespace {

constexpr double kGammaC = 1.0 / 18.0;

double try_total(const FieldConfig& c, const BoundarySpec& spec, const ModelParams& p) {
    try {
        return total_action(c, spec, p).total;
    } catch (const NonPositivePropagator&) {
        return std::nan("");
    }
}

bool has_sign_change(const std::vector<double>& bx) {
    if (bx.empty()) return false;
    return bx.front() * bx.back() < 0.0;
}

double abs_delta(double g) { return std::abs(2.0 * (g + kGammaC) * (g + kGammaC) * (kGammaC - g)); }

struct KEval {
    KScanRow row;
    FieldConfig zero, one;
};

}  // namespace

void DescentSettings::validate() const {
    if (!(step_size > 0.0)) throw InvalidParams("step_size must be > 0");
    if (!(bz_step_ratio > 0.0)) throw InvalidParams("bz_step_ratio must be > 0");
    if (!(growth >= 1.0)) throw InvalidParams("growth must be >= 1");
    if (!(threshold > 0.0)) throw InvalidParams("threshold must be > 0");
    if (max_iters < 1) throw InvalidParams("max_iters must be >= 1");
}

DescentResult descend_ascend(const FieldConfig& config0, const BoundarySpec& spec, const ModelParams& p,
                             const DescentSettings& s) {
    s.validate();
    DescentResult r;
    r.config = config0;
    ActionGradient g;
    r.action = action_with_gradient(r.config, spec, p, &g);

    double ex = s.step_size, ez = s.step_size * s.bz_step_ratio;
    FieldConfig trial = r.config;
    for (r.iterations = 1; r.iterations <= s.max_iters; ++r.iterations) {
        trial.bz = r.config.bz;
        for (std::size_t i = 0; i < trial.size(); ++i) trial.bx[i] = r.config.bx[i] - ex * g.gx[i];
        const double i1 = try_total(trial, spec, p);
        if (!(i1 <= r.action.total)) {
            ex *= 0.5;
            continue;
        }
        const std::vector<double> bz_old = trial.bz;
        for (std::size_t i = 0; i < trial.size(); ++i) trial.bz[i] += ez * g.gz[i];
        ActionGradient g2;
        ActionBreakdown a2;
        bool ok = true;
        try {
            a2 = action_with_gradient(trial, spec, p, &g2);
        } catch (const NonPositivePropagator&) {
            ok = false;
        }
        if (!ok || !(a2.total >= i1)) {
            // keep the accepted bx half step only
            ez *= 0.5;
            trial.bz = bz_old;
            r.config.bx = trial.bx;
            r.action = action_with_gradient(r.config, spec, p, &g);
            continue;
        }
        r.last_change = std::abs(a2.total - r.action.total);
        std::swap(r.config.bx, trial.bx);
        std::swap(r.config.bz, trial.bz);
        r.action = a2;
        g = std::move(g2);
        ex *= s.growth;
        ez *= s.growth;
        if (r.last_change < s.threshold) {
            r.converged = true;
            break;
        }
    }
    r.iterations = std::min(r.iterations, s.max_iters);
    r.grad_norm = g.norm();
    return r;
}

TimeGrid default_grid(const ModelParams& p, const GridPolicy& policy) {
    const double d = abs_delta(p.gamma_hat());
    double T = d > 0.0 ? std::max(policy.min_T, policy.widths / std::sqrt(d)) : policy.max_T;
    T = std::min(T, policy.max_T);
    return TimeGrid::with_duration(T, policy.dt);
}

InstantonResult instanton_action(const ModelParams& p, const TimeGrid& grid, const DescentSettings& s,
                                 const InstantonOptions& opt) {
    p.validate();
    const ModelParams pu = p.unit();
    const double g = pu.gamma;
    InstantonResult r;

    FieldConfig seed_p2, seed_z2;
    if (g < kGammaC) {
        const CriticalTheory th = delta_param(pu);
        if (grid.T() < 20.0 / std::sqrt(th.delta))
            r.warnings.push_back("T = " + std::to_string(grid.T()) + " is shorter than 20/sqrt(delta) = " +
                                 std::to_string(20.0 / std::sqrt(th.delta)));
        const SaddlePoint plus = broken_saddles(pu).first;
        seed_p2 = FieldConfig(grid, plus.bx, plus.bz);
        seed_z2 = instanton_seed(th, opt.center_fraction * grid.T(), grid);
    } else {
        const SaddlePoint t = trivial_saddle(pu);
        seed_p2 = FieldConfig(grid, t.bx, t.bz);
        seed_z2 = seed_p2;
    }
    if (grid.T() < 10.0) r.warnings.push_back("T below 10/J");

    DescentResult dp = descend_ascend(seed_p2, BoundarySpec::p2(), p, s);
    DescentResult dz = descend_ascend(seed_z2, BoundarySpec::z2(), p, s);

    r.total_P2 = dp.action.total;
    r.total_Z2 = dz.action.total;
    r.i_star = r.total_Z2 - r.total_P2;
    if (r.i_star < 0.0 && r.i_star > -10.0 * s.threshold) r.i_star = 0.0;
    r.iterations_P2 = dp.iterations;
    r.iterations_Z2 = dz.iterations;
    r.converged = dp.converged && dz.converged;
    if (!r.converged) r.warnings.push_back("descent hit max_iters");
    r.residual_grad_norm = std::max(dp.grad_norm, dz.grad_norm);
    r.config_P2 = std::move(dp.config);
    r.config_Z2 = std::move(dz.config);

    if (opt.check_separation && g < 0.95 * kGammaC && !has_sign_change(r.config_Z2.bx))
        throw SeparationFailure("optimized Z2 configuration has no sign change in bx at gamma/J = " +
                                std::to_string(g));
    return r;
}

std::vector<SweepRow> sweep_gamma(const std::vector<double>& gammas, const ModelParams& base,
                                  const std::optional<TimeGrid>& grid, const DescentSettings& s, int threads,
                                  const GridPolicy& policy) {
    std::vector<SweepRow> rows(gammas.size());
    parallel_for(gammas.size(), threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.gamma = gammas[i];
        try {
            const ModelParams p = ModelParams::make(base.J, gammas[i], base.N);
            const TimeGrid gr = grid ? *grid : default_grid(p, policy);
            const InstantonResult ir = instanton_action(p, gr, s);
            row.i_star = ir.i_star;
            row.grad_norm = ir.residual_grad_norm;
            row.iters = ir.iterations_P2 + ir.iterations_Z2;
            row.ok = ir.converged;
            if (!ir.converged) row.error = "max_iters reached";
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

std::vector<double> k_grid_range(double k_min, double k_max, double step) {
    if (!(step > 0.0) || !(k_max >= k_min)) throw InvalidParams("bad k grid range");
    std::vector<double> ks;
    const auto n = static_cast<std::size_t>(std::llround((k_max - k_min) / step));
    for (std::size_t i = 0; i <= n; ++i) ks.push_back(k_min + step * static_cast<double>(i));
    return ks;
}

std::vector<double> default_k_grid() { return k_grid_range(0.5, 0.51, 0.001); }

CriticalFractionResult critical_fraction(const ModelParams& p, const TimeGrid& grid, const DescentSettings& s,
                                         const std::vector<double>& k_grid) {
    p.validate();
    const ModelParams pu = p.unit();
    if (!(pu.gamma < kGammaC)) throw InvalidParams("critical_fraction needs gamma < gamma_c");
    if (k_grid.size() < 2) throw InvalidParams("k grid needs at least two points");
    if (!std::is_sorted(k_grid.begin(), k_grid.end())) throw InvalidParams("k grid must be ascending");

    const InstantonResult inst = instanton_action(p, grid, s);
    const SaddlePoint plus = broken_saddles(pu).first;
    const FieldConfig zero_seed(grid, plus.bx, plus.bz);
    const FieldConfig one_seed = instanton_seed(delta_param(pu), grid.T() / 2.0, grid);

    auto eval = [&](double k, const FieldConfig& z0, const FieldConfig& o0) {
        const BoundarySpec spec = BoundarySpec::subsystem(k);
        KEval e;
        DescentResult dz = descend_ascend(z0, spec, p, s);
        DescentResult d1 = descend_ascend(o0, spec, p, s);
        e.row.k = k;
        e.row.total_zero = dz.action.total;
        e.row.total_one = d1.action.total;
        e.row.i_star = inst.i_star;
        e.row.delta_I_bdy = e.row.total_zero - e.row.total_one + inst.i_star;
        e.zero = std::move(dz.config);
        e.one = std::move(d1.config);
        return e;
    };
    // one-instanton minus zero-instanton; positive means the zero-instanton branch dominates
    auto diff = [](const KEval& e) { return e.row.total_one - e.row.total_zero; };

    CriticalFractionResult out;
    out.i_star = inst.i_star;
    std::size_t lo = 0, hi = 0;
    KEval elo, ehi;

    if (k_grid.size() <= 16) {
        std::vector<KEval> evs;
        for (double k : k_grid)
            evs.push_back(evs.empty() ? eval(k, zero_seed, one_seed) : eval(k, evs.back().zero, evs.back().one));
        for (const auto& e : evs) out.rows.push_back(e.row);
        if (!(diff(evs.front()) > 0.0)) throw NoCrossing("exchange lies below the first k");
        std::size_t j = 1;
        while (j < evs.size() && diff(evs[j]) > 0.0) ++j;
        if (j == evs.size()) throw NoCrossing("no exchange on the k grid");
        lo = j - 1;
        hi = j;
        elo = evs[lo];
        ehi = evs[hi];
    } else {
        lo = 0;
        hi = k_grid.size() - 1;
        elo = eval(k_grid[lo], zero_seed, one_seed);
        ehi = eval(k_grid[hi], elo.zero, elo.one);
        out.rows.push_back(elo.row);
        out.rows.push_back(ehi.row);
        if (!(diff(elo) > 0.0)) throw NoCrossing("exchange lies below the first k");
        if (diff(ehi) > 0.0) throw NoCrossing("no exchange on the k grid");
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            KEval em = eval(k_grid[mid], elo.zero, elo.one);
            out.rows.push_back(em.row);
            if (diff(em) > 0.0) {
                lo = mid;
                elo = std::move(em);
            } else {
                hi = mid;
                ehi = std::move(em);
            }
        }
        std::sort(out.rows.begin(), out.rows.end(), [](const KScanRow& a, const KScanRow& b) { return a.k < b.k; });
    }
    const double dl = diff(elo), dh = diff(ehi);
    out.k_c = k_grid[lo] + dl / (dl - dh) * (k_grid[hi] - k_grid[lo]);
    out.error_bar = k_grid[hi] - k_grid[lo];
    return out;
}

std::vector<double> entropy_series_prediction(const ModelParams& p, int N, const std::vector<double>& times,
                                              const DescentSettings& s, double dt, double T0_eff) {
    if (N < 1) throw InvalidParams("N must be >= 1");
    if (!(T0_eff > 0.0)) throw InvalidParams("T0_eff must be > 0");
    if (!std::is_sorted(times.begin(), times.end())) throw InvalidParams("times must be increasing");
    std::vector<double> out;
    out.reserve(times.size());
    for (double T : times) {
        const TimeGrid grid = TimeGrid::with_duration(T, dt);
        const InstantonResult r = instanton_action(p, grid, s, {0.5, false});
        out.push_back(std::max(0.0, N * r.i_star - std::log(T / T0_eff)));
    }
    return out;
}

}  // namespace hbc
