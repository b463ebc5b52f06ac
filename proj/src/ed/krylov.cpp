#include "hbc/ed/krylov.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hbc/errors.hpp"

namespace hbc::ed {

namespace {

using cd = std::complex<double>;

struct Lanczos {
    double beta0 = 0.0;
    std::vector<Vector> basis;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
};

// Three-term recurrence plus one full re-orthogonalization pass per vector.
Lanczos build(const Vector& v, const Generator& g, double max_scale, const KrylovSettings& ks) {
    if (ks.dim < 2) throw InvalidParams("krylov dimension must be >= 2");
    Lanczos L;
    L.beta0 = v.norm();
    const int m = ks.dim;
    L.basis.reserve(m);
    L.basis.push_back(v / L.beta0);
    std::vector<double> alpha, beta;
    Vector w(v.size());
    for (int j = 0; j < m; ++j) {
        g.apply(L.basis[j], w);
        const double a = L.basis[j].dot(w).real();
        alpha.push_back(a);
        if (j + 1 == m) break;
        w -= a * L.basis[j];
        if (j > 0) w -= beta.back() * L.basis[j - 1];
        for (const Vector& q : L.basis) w -= q.dot(w) * q;
        const double b = w.norm();
        const double size = std::abs(a) + (beta.empty() ? 0.0 : beta.back());
        if (b <= ks.breakdown_tol * std::max(size, 1.0)) {
            // invariant subspace: truncating leaves a residual of size b
            if (b * max_scale > ks.residual_tol)
                throw BreakdownError("Krylov residual " + std::to_string(b) + " after " + std::to_string(j + 1) +
                                     " vectors");
            break;
        }
        beta.push_back(b);
        L.basis.push_back(w / b);
    }
    const int used = static_cast<int>(L.basis.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
    for (int j = 0; j < used; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    L.evals = es.eigenvalues();
    L.evecs = es.eigenvectors();
    return L;
}

// beta0 V f(T) e1 for a scalar function f of the eigenvalues.
template <class F>
Vector combine(const Lanczos& L, F f) {
    const int used = static_cast<int>(L.basis.size());
    Vector out = Vector::Zero(L.basis[0].size());
    for (int r = 0; r < used; ++r) {
        cd acc = 0.0;
        for (int k = 0; k < used; ++k) acc += L.evecs(r, k) * f(L.evals[k]) * L.evecs(0, k);
        out += (L.beta0 * acc) * L.basis[r];
    }
    return out;
}

}  // namespace

Vector krylov_apply_exp(const Vector& v, const Generator& g, double scale, const KrylovSettings& ks) {
    if (ks.dim < 2) throw InvalidParams("krylov dimension must be >= 2");
    if (scale == 0.0 || v.norm() == 0.0) return v;
    const Lanczos L = build(v, g, std::abs(scale), ks);
    return combine(L, [scale](double lam) { return std::exp(cd(0.0, -scale * lam)); });
}

Vector apply_weak_measurement(const Vector& v, const Generator& o, double dt, const KrylovSettings& ks) {
    if (ks.dim < 2) throw InvalidParams("krylov dimension must be >= 2");
    if (dt == 0.0 || v.norm() == 0.0) return v;
    // Both exponentials live in the same Krylov space of O, so one basis serves both.
    const double h = dt / 2.0;
    const Lanczos L = build(v, o, h, ks);
    return combine(L, [h](double lam) {
        return cd(0.5, -0.5) * std::exp(cd(0.0, -h * lam)) + cd(0.5, 0.5) * std::exp(cd(0.0, h * lam));
    });
}

}  // namespace hbc::ed
