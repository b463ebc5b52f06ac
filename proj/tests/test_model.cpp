#include <doctest.h>

#include <cmath>

#include "hbc/errors.hpp"
#include "hbc/model.hpp"

using namespace hbc;

namespace {

constexpr double gc = 1.0 / 18.0;

ModelParams at(double g) { return ModelParams{1.0, g, 1}; }

}  // namespace

TEST_CASE("critical rate scales with J") {
    CHECK(critical_gamma(at(0.0)) == doctest::Approx(gc).epsilon(1e-15));
    CHECK(critical_gamma(ModelParams{18.0, 0.0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(critical_gamma(ModelParams{1e-9, 0.0, 1}) == doctest::Approx(1e-9 / 18.0).epsilon(1e-12));
}

TEST_CASE("trivial saddle closed form") {
    const SaddlePoint s = trivial_saddle(at(gc));
    CHECK(s.bx == 0.0);
    CHECK(s.bz == doctest::Approx(2.0 * gc / 3.0).epsilon(1e-14));
    CHECK(trivial_saddle(at(0.0)).bz == doctest::Approx(2.0 * gc / 9.0).epsilon(1e-14));
    CHECK(trivial_saddle(ModelParams{3.0, 0.7, 2}).bx == 0.0);
}

TEST_CASE("broken saddles") {
    const auto [p0, m0] = broken_saddles(at(0.0));
    CHECK(p0.bx == doctest::Approx(gc / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(m0.bx == doctest::Approx(-gc / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(p0.bz == doctest::Approx(gc / 3.0).epsilon(1e-13));
    CHECK(p0.bx == doctest::Approx(0.032075).epsilon(1e-4));

    const auto [pc, mc] = broken_saddles(at(gc));
    CHECK(std::abs(pc.bx) < 1e-15);
    CHECK(pc.bz == doctest::Approx(2.0 * gc / 3.0).epsilon(1e-13));

    CHECK_THROWS_AS(broken_saddles(at(1.1 * gc)), ImaginarySaddle);
}

TEST_CASE("broken saddles sit on the sphere B = J/27") {
    for (double f = 0.0; f <= 1.0; f += 0.05) {
        const auto [p, m] = broken_saddles(at(f * gc));
        CHECK(std::hypot(p.bx, p.bz) == doctest::Approx(1.0 / 27.0).epsilon(1e-13));
        CHECK(std::hypot(m.bx, m.bz) == doctest::Approx(1.0 / 27.0).epsilon(1e-13));
    }
}

TEST_CASE("bulk density values and stationarity") {
    const SaddlePoint t = trivial_saddle(at(gc));
    CHECK(bulk_action_density(t.bx, t.bz, at(gc)) == doctest::Approx(-0.026235).epsilon(2e-5));

    for (double f : {1.05, 1.3, 2.0, 5.0}) {
        const SaddlePoint s = trivial_saddle(at(f * gc));
        const auto [gx, gz] = bulk_action_gradient(s.bx, s.bz, at(f * gc));
        CHECK(std::hypot(gx, gz) < 1e-12);
    }
    for (double f = 0.0; f < 1.0; f += 0.1) {
        const auto [p, m] = broken_saddles(at(f * gc));
        const auto [gx, gz] = bulk_action_gradient(p.bx, p.bz, at(f * gc));
        CHECK(std::hypot(gx, gz) < 1e-10);
        const SaddlePoint t0 = trivial_saddle(at(f * gc));
        CHECK(bulk_action_density(p.bx, p.bz, at(f * gc)) < bulk_action_density(t0.bx, t0.bz, at(f * gc)));
    }
    const auto [pc, mc] = broken_saddles(at(gc));
    CHECK(bulk_action_density(pc.bx, pc.bz, at(gc)) == doctest::Approx(bulk_action_density(t.bx, t.bz, at(gc))));
}

TEST_CASE("bulk density gradient matches finite differences") {
    const ModelParams p = at(0.7 * gc);
    const double bx = 0.013, bz = 0.027, h = 1e-7;
    const auto [gx, gz] = bulk_action_gradient(bx, bz, p);
    const double fx = (bulk_action_density(bx + h, bz, p) - bulk_action_density(bx - h, bz, p)) / (2 * h);
    const double fz = (bulk_action_density(bx, bz + h, p) - bulk_action_density(bx, bz - h, p)) / (2 * h);
    CHECK(gx == doctest::Approx(fx).epsilon(1e-6));
    CHECK(gz == doctest::Approx(fz).epsilon(1e-6));
}

TEST_CASE("mass parameter") {
    CHECK(delta_param(at(gc)).delta == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(delta_param(at(0.9 * gc)).delta == doctest::Approx(0.722 * gc * gc * gc).epsilon(1e-12));
    CHECK(delta_param(at(0.9 * gc)).delta == doctest::Approx(1.2381e-4).epsilon(1e-4));
    CHECK(delta_param(at(0.0)).delta == doctest::Approx(3.4294e-4).epsilon(1e-4));
    CHECK(delta_param(at(0.5 * gc)).alpha > 0.0);
    CHECK_THROWS_AS(delta_param(at(1.01 * gc)), NegativeMass);
}

TEST_CASE("kink constant equals the standard kink action") {
    CHECK(kink_action_constant() == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-10));
    CHECK(delta_param(at(0.5 * gc)).kink_constant == kink_action_constant());
}

TEST_CASE("kink constant matches the gradient energy of the seed profile") {
    // For a tanh kink the action equals the integral of (B')^2.
    for (double delta : {1e-5, 1e-4, 1e-3}) {
        const double width = std::sqrt(2.0 / delta);
        const TimeGrid grid = TimeGrid::with_duration(40.0 * width, width / 200.0);
        const FieldConfig f = instanton_seed(CriticalTheory{delta, 0.03, 0.0}, grid.T() / 2.0, grid);
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < f.size(); ++i) {
            const double d = (f.bx[i + 1] - f.bx[i]) / grid.dt;
            sum += d * d * grid.dt;
        }
        CHECK(sum == doctest::Approx(kink_action_constant() * std::pow(delta, 1.5)).epsilon(5e-3));
    }
}

TEST_CASE("instanton seed profile") {
    const CriticalTheory th = delta_param(at(0.8 * gc));
    const TimeGrid grid = TimeGrid::with_duration(2000.0, 0.05);
    const double center = grid.midpoint(grid.steps / 2);
    const FieldConfig f = instanton_seed(th, center, grid);
    CHECK(std::abs(f.bx[grid.steps / 2]) < 1e-15);
    CHECK(f.bx.front() == doctest::Approx(std::sqrt(th.delta)).epsilon(1e-6));
    CHECK(f.bx.back() == doctest::Approx(-std::sqrt(th.delta)).epsilon(1e-6));
    CHECK(f.bz[7] == doctest::Approx((0.8 * gc + gc) / 3.0).epsilon(1e-14));

    // |bx| = sqrt(delta) tanh(1) at |t - center| = sqrt(2/delta)
    const double t1 = center + std::sqrt(2.0 / th.delta);
    const std::size_t i1 = static_cast<std::size_t>(std::floor(t1 / grid.dt));
    const double lo = std::abs(f.bx[i1]), hi = std::abs(f.bx[i1 + 1]);
    const double target = std::sqrt(th.delta) * std::tanh(1.0);
    CHECK(lo <= target);
    CHECK(hi >= target);

    CHECK_THROWS_AS(instanton_seed(CriticalTheory{0.0, 0.03, 0.0}, 1000.0, grid), NoInstanton);
    CHECK_THROWS_AS(instanton_seed(th, 2500.0, grid), InvalidWindow);
}

TEST_CASE("phi4 residual") {
    const TimeGrid grid = TimeGrid::with_duration(100.0, 0.05);
    FieldConfig c(grid, 0.02, 0.0);
    for (double r : phi4_residual(c, CriticalTheory{1e-4, 0.03, 0.0}))
        CHECK(r == doctest::Approx(1e-4 * 0.02 - 0.02 * 0.02 * 0.02).epsilon(1e-9));

    const double d = 2e-4;
    FieldConfig s(grid, std::sqrt(d), 0.0);
    for (double r : phi4_residual(s, CriticalTheory{d, 0.03, 0.0})) CHECK(std::abs(r) < 1e-18);

    // Second-order convergence on the exact kink.
    auto max_res = [&](double dt) {
        const TimeGrid g = TimeGrid::with_duration(1000.0, dt);
        const CriticalTheory th{1e-3, 0.03, 0.0};
        double m = 0.0;
        for (double r : phi4_residual(instanton_seed(th, 500.0, g), th)) m = std::max(m, std::abs(r));
        return m;
    };
    const double ratio = max_res(2.0) / max_res(1.0);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));

    CHECK_THROWS_AS(phi4_residual(FieldConfig(TimeGrid{0.05, 2}), CriticalTheory{1e-4, 0.03, 0.0}), GridTooSmall);
}

TEST_CASE("kernel action") {
    const ModelParams p = at(0.95 * gc);
    const CriticalTheory th = delta_param(p);
    const TimeGrid g1 = TimeGrid::with_duration(2000.0, 0.05);
    const TimeGrid g2 = TimeGrid::with_duration(4000.0, 0.05);
    CHECK(effective_kernel_action(FieldConfig(g1), p) == 0.0);

    // Constant minimum: per unit time -delta^2 / (128 alpha^3).
    const double s = std::sqrt(th.delta);
    const double rate =
        (effective_kernel_action(FieldConfig(g2, s), p) - effective_kernel_action(FieldConfig(g1, s), p)) / 2000.0;
    const double a3 = th.alpha * th.alpha * th.alpha;
    CHECK(rate == doctest::Approx(-th.delta * th.delta / (128.0 * a3)).epsilon(1e-6));

    // The tanh seed costs slightly more than the optimal kink.
    const double kink = effective_kernel_action(instanton_seed(th, g2.T() / 2.0, g2), p) -
                        effective_kernel_action(FieldConfig(g2, s), p);
    const double opt = kernel_instanton_action(p);
    CHECK(opt == doctest::Approx(std::pow(th.delta, 1.5) / (24.0 * a3)).epsilon(1e-9));
    CHECK(kink / opt > 1.0);
    CHECK(kink / opt < 1.15);
}

TEST_CASE("dilute gas purity") {
    CHECK(purity_dilute_gas(6, 0.5, 10.0) == doctest::Approx(std::tanh(10.0 * std::exp(-3.0))).epsilon(1e-14));
    CHECK(purity_dilute_gas(6, 0.5, 10.0) == doctest::Approx(0.46044).epsilon(1e-4));
    CHECK(purity_dilute_gas(1, 0.0, 1e6) == doctest::Approx(1.0));
    CHECK(purity_dilute_gas(2, 0.1, 5.0, 1.0) < purity_dilute_gas(2, 0.1, 6.0, 1.0));
    CHECK(purity_dilute_gas(2, 0.1, 5.0) > purity_dilute_gas(2, 0.2, 5.0));
    CHECK_THROWS_AS(purity_dilute_gas(2, 0.1, 1.0, 1.0), InvalidWindow);
    CHECK_THROWS_AS(purity_dilute_gas(2, 0.1, 1.0, 0.0, 0.0), InvalidWindow);
    CHECK_THROWS(purity_dilute_gas(2, -0.1, 1.0));
}

TEST_CASE("purity regimes") {
    RegimeInputs pur;
    pur.regime = PurityRegime::Purified;
    pur.dI_zero = 0.0;
    CHECK(purity_estimate(6, pur) == 1.0);

    RegimeInputs below;
    below.regime = PurityRegime::MixedBelowKc;
    below.dI_plus = 0.1;
    CHECK(purity_estimate(6, below) == doctest::Approx(std::exp(-0.6)).epsilon(1e-14));

    RegimeInputs above;
    above.regime = PurityRegime::MixedAboveKc;
    above.i_star = 0.5;
    above.dI_minus = 0.0;
    above.T = 1.0;
    const double r = purity_estimate(6, above);
    CHECK(r == doctest::Approx(purity_dilute_gas(6, 0.5, 1.0)).epsilon(r * r));

    RegimeInputs missing;
    missing.regime = PurityRegime::MixedAboveKc;
    missing.i_star = 0.5;
    CHECK_THROWS_AS(purity_estimate(6, missing), IncompleteInput);
}
