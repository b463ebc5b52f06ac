#pragma once

#include <vector>

#include "hbc/ed/trajectory.hpp"

namespace hbc::ed {

enum class Protocol { RatioOfAverages, AverageOfRatios };

struct AveragedSeries {
    std::vector<double> times;
    std::vector<double> purity;   // per the requested protocol
    std::vector<double> entropy;  // -log2 purity
    // Delta-method standard error of the average-of-ratios entropy.
    std::vector<double> stderr_aor;
    // sum_V N(V) Pi(V) with N(V) = P^2(V) / sum P^2; equals the ratio of averages.
    std::vector<double> reweighted;
    // Renyi-2 mutual information I(Abar : R) per recorded subsystem size, in bits.
    std::vector<int> subsystem_sizes;
    std::vector<std::vector<double>> mutual_information;
};

AveragedSeries aggregate(const std::vector<TrajectoryRecord>& records, Protocol protocol);

}  // namespace hbc::ed
