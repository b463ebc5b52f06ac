#include "hbc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hbc/errors.hpp"

namespace hbc {

namespace {

constexpr double kGammaC = 1.0 / 18.0;  // units J = 1

double clamp_below_critical(const ModelParams& p, const char* what) {
    const double g = p.gamma_hat();
    if (g > kGammaC * (1.0 + 1e-13)) {
        throw ImaginarySaddle(std::string(what) + ": gamma/J = " + std::to_string(g) +
                              " exceeds 1/18");
    }
    return std::min(g, kGammaC);
}

}  // namespace

TimeGrid TimeGrid::with_duration(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw InvalidParams("grid needs T > 0 and dt > 0");
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    if (n < 3) throw GridTooSmall("grid with " + std::to_string(n) + " steps");
    return TimeGrid{dt, n};
}

void FieldConfig::validate() const {
    if (!(grid.dt > 0.0)) throw ValidationError("dt must be positive");
    if (bx.size() != grid.steps || bz.size() != grid.steps)
        throw ValidationError("field arrays do not match grid length");
    for (std::size_t i = 0; i < bx.size(); ++i) {
        if (!std::isfinite(bx[i]) || !std::isfinite(bz[i]))
            throw ValidationError("non-finite field at step " + std::to_string(i));
    }
}

ModelParams ModelParams::make(double J, double gamma, int N) {
    ModelParams p{J, gamma, N};
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!(J > 0.0)) throw InvalidParams("J must be > 0");
    if (!(gamma >= 0.0)) throw InvalidParams("gamma must be >= 0");
    if (N < 1) throw InvalidParams("N must be >= 1");
}

double critical_gamma(const ModelParams& p) { return p.J / 18.0; }

SaddlePoint trivial_saddle(const ModelParams& p) {
    const double g = p.gamma_hat();
    return {0.0, p.J * (4.0 / 9.0) * (g + kGammaC / 2.0), SaddleBranch::Trivial};
}

std::pair<SaddlePoint, SaddlePoint> broken_saddles(const ModelParams& p) {
    const double g = clamp_below_critical(p, "broken_saddles");
    const double bx = p.J * std::sqrt((kGammaC - g) * (g + 3.0 * kGammaC)) / 3.0;
    const double bz = p.J * (g + kGammaC) / 3.0;
    return {{bx, bz, SaddleBranch::BrokenPlus}, {-bx, bz, SaddleBranch::BrokenMinus}};
}

double bulk_action_density(double bx, double bz, const ModelParams& p) {
    const double J = p.J, g = p.gamma;
    const double B = std::hypot(bx, bz);
    return 27.0 * bx * bx / (4.0 * J) - 81.0 * bz * bz / (4.0 * J) + bz * (1.0 + 18.0 * g / J) -
           J / 72.0 - 4.0 * g * g / J - g / 2.0 - B / 2.0;
}

std::pair<double, double> bulk_action_gradient(double bx, double bz, const ModelParams& p) {
    const double J = p.J, g = p.gamma;
    const double B = std::hypot(bx, bz);
    const double hx = B > 0.0 ? bx / (2.0 * B) : 0.0;
    const double hz = B > 0.0 ? bz / (2.0 * B) : 0.0;
    return {27.0 * bx / (2.0 * J) - hx, -81.0 * bz / (2.0 * J) + 1.0 + 18.0 * g / J - hz};
}

CriticalTheory delta_param(const ModelParams& p) {
    const double g = p.gamma_hat();
    if (g > kGammaC * (1.0 + 1e-13))
        throw NegativeMass("gamma/J = " + std::to_string(g) + " is above the critical point");
    const double s = g + kGammaC;
    CriticalTheory th;
    th.delta = std::max(0.0, 2.0 * s * s * (kGammaC - g));
    th.alpha = s / 6.0;
    th.kink_constant = kink_action_constant();
    return th;
}

double kink_action_constant() {
    static const double c = [] {
        // sqrt(2) * int (f'^2/4 - f^2/2 + f^4/4 + 1/4) dy with f = tanh y
        auto integrand = [](double y) {
            const double f = std::tanh(y);
            const double sech2 = 1.0 - f * f;
            return std::sqrt(2.0) * (sech2 * sech2 / 4.0 - f * f / 2.0 + f * f * f * f / 4.0 + 0.25);
        };
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -40.0, 40.0,
                                                                              15, 1e-12, &err);
    }();
    return c;
}

FieldConfig instanton_seed(const CriticalTheory& th, double center, const TimeGrid& grid) {
    if (!(th.delta > 0.0)) throw NoInstanton("delta must be positive");
    if (!(center > 0.0 && center < grid.T())) throw InvalidWindow("kink center outside (0, T)");
    FieldConfig c(grid, 0.0, 2.0 * th.alpha);
    const double a = std::sqrt(th.delta), k = std::sqrt(th.delta / 2.0);
    for (std::size_t i = 0; i < grid.steps; ++i) c.bx[i] = -a * std::tanh((grid.midpoint(i) - center) * k);
    return c;
}

std::vector<double> phi4_residual(const FieldConfig& c, const CriticalTheory& th) {
    const std::size_t n = c.size();
    if (n < 3) throw GridTooSmall("phi4_residual needs at least 3 points");
    const double h2 = c.grid.dt * c.grid.dt;
    std::vector<double> r(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double b = c.bx[i];
        r[i - 1] = (c.bx[i + 1] - 2.0 * b + c.bx[i - 1]) / h2 + th.delta * b - b * b * b;
    }
    return r;
}

double effective_kernel_action(const FieldConfig& c, const ModelParams& p) {
    const std::size_t n = c.size();
    if (n == 0) return 0.0;
    const double dt = c.grid.dt;
    const double alpha = (p.gamma_hat() + kGammaC) / 6.0;
    std::vector<double> w(n, dt);
    if (n > 1) w.front() = w.back() = dt / 2.0;

    double local = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b2 = c.bx[i] * c.bx[i];
        local += w[i] * (27.0 * b2 / 4.0 + b2 * b2 / (128.0 * alpha * alpha * alpha));
    }
    // sum_ij w_i w_j B_i B_j r^|i-j| via one forward and one backward recursion
    const double r = std::exp(-2.0 * alpha * dt);
    std::vector<double> fwd(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) fwd[i] = acc = w[i] * c.bx[i] + r * acc;
    double pair = 0.0;
    acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double wb = w[i] * c.bx[i];
        acc = wb + r * acc;
        pair += wb * (fwd[i] + acc - wb);
    }
    return local - pair / 8.0;
}

double kernel_instanton_action(const ModelParams& p) {
    const CriticalTheory th = delta_param(p);
    const double a3 = th.alpha * th.alpha * th.alpha;
    return th.kink_constant * std::pow(th.delta, 1.5) / (16.0 * std::sqrt(2.0) * a3);
}

double purity_dilute_gas(int N, double i_star, double T, double T0, double a) {
    if (!(T > T0)) throw InvalidWindow("need T > T0");
    if (!(a > 0.0)) throw InvalidWindow("need a > 0");
    if (!(i_star >= 0.0)) throw InvalidParams("i_star must be >= 0");
    return std::tanh(std::exp(-N * i_star) * (T - T0) / a);
}

double purity_estimate(int N, const RegimeInputs& in) {
    auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) throw IncompleteInput(std::string("missing ") + name);
        return *v;
    };
    switch (in.regime) {
        case PurityRegime::MixedAboveKc: {
            const double T = need(in.T, "T");
            if (!(T > in.T0)) throw InvalidWindow("need T > T0");
            if (!(in.a_prime > 0.0)) throw InvalidWindow("need a' > 0");
            return (T - in.T0) / in.a_prime *
                   std::exp(-N * (need(in.i_star, "i_star") + need(in.dI_minus, "dI_minus")));
        }
        case PurityRegime::MixedBelowKc:
            return std::exp(-N * need(in.dI_plus, "dI_plus"));
        case PurityRegime::Purified:
            return std::exp(-N * need(in.dI_zero, "dI_zero"));
    }
    throw IncompleteInput("unknown regime");
}

}  // namespace hbc
