#include "hbc/action.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hbc/errors.hpp"

namespace hbc {

namespace {

constexpr double kGammaC = 1.0 / 18.0;

using Vec2 = std::array<double, 2>;

// Symmetric 2x2 [[a, b], [b, d]].
struct Sym2 {
    double a, b, d;
    Vec2 apply(const Vec2& v) const { return {a * v[0] + b * v[1], b * v[0] + d * v[1]}; }
    double sandwich(const Vec2& l, const Vec2& r) const {
        return l[0] * (a * r[0] + b * r[1]) + l[1] * (b * r[0] + d * r[1]);
    }
};

// sinh(th)/th and (th cosh th - sinh th)/th^3
void shape_factors(double th, double& s, double& q) {
    s = th > 0.0 ? std::sinh(th) / th : 1.0;
    if (th < 0.5) {
        const double t2 = th * th;
        // sum_k 2k th^(2k-2) / (2k+1)!, successive terms differ by t2 / (2k (2k + 3))
        q = 0.0;
        double term = 1.0 / 3.0;
        for (int k = 1; k <= 8; ++k) {
            q += term;
            term *= t2 / (2.0 * k * (2.0 * k + 3.0));
        }
    } else {
        q = (th * std::cosh(th) - std::sinh(th)) / (th * th * th);
    }
}

struct StepDerivs {
    Sym2 m, dx, dz;
};

StepDerivs step_derivs(double bx, double bz, double dt) {
    const double h = dt / 2.0;
    const double th = h * std::hypot(bx, bz);
    double s, q;
    shape_factors(th, s, q);
    const double c = std::cosh(th);
    const double h2 = h * h;
    StepDerivs r;
    r.m = {c + s * h * bz, s * h * bx, c - s * h * bz};
    // d/dbx: (s h^2 bx) I + (q h^2 bx) h (bx sx + bz sz) + s h sx
    const double cx = s * h2 * bx, qx = q * h2 * bx * h;
    r.dx = {cx + qx * bz, qx * bx + s * h, cx - qx * bz};
    const double cz = s * h2 * bz, qz = q * h2 * bz * h;
    r.dz = {cz + qz * bz + s * h, qz * bx, cz - qz * bz - s * h};
    return r;
}

Sym2 step_sym(double bx, double bz, double dt) {
    const double h = dt / 2.0;
    const double th = h * std::hypot(bx, bz);
    const double s = th > 0.0 ? std::sinh(th) / th : 1.0;
    const double c = std::cosh(th);
    return {c + s * h * bz, s * h * bx, c - s * h * bz};
}

Vec2 real_state(BoundaryWhich w) {
    const RBitVec v = boundary_state(w);
    return {v.up.real(), v.down.real()};
}

}  // namespace

RBitVec boundary_state(BoundaryWhich which) {
    const double a = std::sqrt(3.0) / 2.0;
    return {a, which == BoundaryWhich::Plus ? 0.5 : -0.5};
}

BoundarySpec BoundarySpec::subsystem(double k) {
    if (!(k >= 0.0 && k <= 1.0)) throw InvalidParams("subsystem fraction must lie in [0, 1]");
    return {Kind::Subsystem, k};
}

double BoundarySpec::fraction() const {
    switch (kind) {
        case Kind::P2: return 0.0;
        case Kind::Z2: return 1.0;
        case Kind::Subsystem: return k;
    }
    return k;
}

double ActionGradient::norm() const {
    double s = 0.0;
    for (double v : gx) s += v * v;
    for (double v : gz) s += v * v;
    return std::sqrt(s);
}

Eigen::Matrix2d step_matrix(double bx, double bz, double dt) {
    const Sym2 m = step_sym(bx, bz, dt);
    Eigen::Matrix2d r;
    r << m.a, m.b, m.b, m.d;
    return r;
}

double log_propagator(const FieldConfig& c, const RBitVec& psi0, const RBitVec& psiT) {
    c.validate();
    std::complex<double> u = psi0.up, v = psi0.down;
    double logscale = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Sym2 m = step_sym(c.bx[i], c.bz[i], c.grid.dt);
        const std::complex<double> nu = m.a * u + m.b * v, nv = m.b * u + m.d * v;
        const double nrm = std::sqrt(std::norm(nu) + std::norm(nv));
        u = nu / nrm;
        v = nv / nrm;
        logscale += std::log(nrm);
    }
    const std::complex<double> k = std::conj(psiT.up) * u + std::conj(psiT.down) * v;
    if (!(k.real() > 0.0) || std::abs(k.imag()) > 1e-14 * std::abs(k.real()))
        throw NonPositivePropagator("propagator overlap " + std::to_string(k.real()));
    return std::log(k.real()) + logscale;
}

double bulk_density(double bx, double bz, double g) {
    return 27.0 * bx * bx / 4.0 - 81.0 * bz * bz / 4.0 + bz * (1.0 + 18.0 * g) - 1.0 / 72.0 -
           4.0 * g * g - g / 2.0;
}

ActionBreakdown action_with_gradient(const FieldConfig& c, const BoundarySpec& spec,
                                     const ModelParams& p, ActionGradient* grad) {
    c.validate();
    const std::size_t n = c.size();
    const double dt = c.grid.dt;
    const double g = p.gamma_hat();
    const double k = spec.fraction();

    ActionBreakdown out;
    for (std::size_t i = 0; i < n; ++i) out.bulk += dt * bulk_density(c.bx[i], c.bz[i], g);

    if (grad) {
        grad->gx.assign(n, 0.0);
        grad->gz.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            grad->gx[i] = dt * 27.0 * c.bx[i] / 2.0;
            grad->gz[i] = dt * (-81.0 * c.bz[i] / 2.0 + 1.0 + 18.0 * g);
        }
    }

    // Forward sweep from psi_+, shared by both boundary overlaps.
    std::vector<Vec2> fwd(n + 1);
    fwd[0] = real_state(BoundaryWhich::Plus);
    double logscale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 v = step_sym(c.bx[i], c.bz[i], dt).apply(fwd[i]);
        const double nrm = std::hypot(v[0], v[1]);
        fwd[i + 1] = {v[0] / nrm, v[1] / nrm};
        logscale += std::log(nrm);
    }

    auto one_side = [&](BoundaryWhich target, double weight) {
        const Vec2 psiT = real_state(target);
        const double ov = psiT[0] * fwd[n][0] + psiT[1] * fwd[n][1];
        if (!(ov > 0.0)) {
            if (weight == 0.0) return std::numeric_limits<double>::quiet_NaN();
            throw NonPositivePropagator("overlap " + std::to_string(ov) + " for " +
                                        (target == BoundaryWhich::Minus ? "K_A" : "K_Abar"));
        }
        if (grad && weight != 0.0) {
            Vec2 l = psiT;
            for (std::size_t i = n; i-- > 0;) {
                const StepDerivs d = step_derivs(c.bx[i], c.bz[i], dt);
                const double den = d.m.sandwich(l, fwd[i]);
                grad->gx[i] -= weight * d.dx.sandwich(l, fwd[i]) / den;
                grad->gz[i] -= weight * d.dz.sandwich(l, fwd[i]) / den;
                const Vec2 v = d.m.apply(l);
                const double nrm = std::hypot(v[0], v[1]);
                l = {v[0] / nrm, v[1] / nrm};
            }
        }
        return std::log(ov) + logscale;
    };

    out.logK_A = one_side(BoundaryWhich::Minus, k);
    out.logK_Abar = one_side(BoundaryWhich::Plus, 1.0 - k);
    out.total = out.bulk;
    if (k != 0.0) out.total -= k * out.logK_A;
    if (k != 1.0) out.total -= (1.0 - k) * out.logK_Abar;
    if (!std::isfinite(out.total)) throw NonPositivePropagator("non-finite total action");
    return out;
}

ActionBreakdown total_action(const FieldConfig& c, const BoundarySpec& spec, const ModelParams& p) {
    return action_with_gradient(c, spec, p, nullptr);
}

ActionGradient action_gradient(const FieldConfig& c, const BoundarySpec& spec, const ModelParams& p) {
    ActionGradient g;
    action_with_gradient(c, spec, p, &g);
    return g;
}

}  // namespace hbc
