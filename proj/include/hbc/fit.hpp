#pragma once

#include <utility>
#include <vector>

namespace hbc {

struct FitResult {
    double exponent = 0.0;
    double std_error = 0.0;
    double prefactor = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    double r_squared = 0.0;
    std::size_t n = 0;
};

// Least squares of ln y on ln x; needs at least 4 positive points.
FitResult fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace hbc
