#include "hbc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hbc/errors.hpp"

namespace hbc {

FitResult fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidParams("fit_power_law: length mismatch");
    const std::size_t n = xs.size();
    if (n < 4) throw InvalidParams("fit_power_law: need at least 4 points, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw NonPositiveData("point " + std::to_string(i) + " is not positive");
    }
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::log(xs[i]);
        v[i] = std::log(ys[i]);
    }
    double mu = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mu += u[i];
        mv += v[i];
    }
    mu /= n;
    mv /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (u[i] - mu) * (u[i] - mu);
        sxy += (u[i] - mu) * (v[i] - mv);
        syy += (v[i] - mv) * (v[i] - mv);
    }
    if (!(sxx > 0.0)) throw InvalidParams("fit_power_law: all x values coincide");

    FitResult r;
    r.n = n;
    r.exponent = sxy / sxx;
    r.prefactor = std::exp(mv - r.exponent * mu);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = v[i] - mv - r.exponent * (u[i] - mu);
        ssr += e * e;
    }
    r.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    r.window = {*lo, *hi};
    return r;
}

}  // namespace hbc
