#include "hbc/ed/aggregate.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hbc/errors.hpp"

namespace hbc::ed {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

// sum_V exp(num_V) / sum_V exp(den_V), formed in extended precision.
double ratio_of_sums(const std::vector<const std::vector<double>*>& num,
                     const std::vector<const std::vector<double>*>& den, std::size_t t) {
    Wide a = 0, b = 0;
    for (const auto* v : num) a += boost::multiprecision::exp(Wide((*v)[t]));
    for (const auto* v : den) b += boost::multiprecision::exp(Wide((*v)[t]));
    return static_cast<double>(a / b);
}

double reweighted_sum(const std::vector<TrajectoryRecord>& recs, std::size_t t) {
    Wide norm = 0;
    for (const auto& r : recs) norm += boost::multiprecision::exp(Wide(r.log_p2[t]));
    Wide acc = 0;
    for (const auto& r : recs) {
        const Wide p2 = boost::multiprecision::exp(Wide(r.log_p2[t]));
        const Wide pi = boost::multiprecision::exp(Wide(r.log_z2[t])) / p2;
        acc += (p2 / norm) * pi;
    }
    return static_cast<double>(acc);
}

double entropy_bits(double purity) { return -std::log2(purity); }

}  // namespace

AveragedSeries aggregate(const std::vector<TrajectoryRecord>& records, Protocol protocol) {
    if (records.empty()) throw EmptyInput("aggregate needs at least one record");
    const TrajectoryRecord& first = records.front();
    for (const auto& r : records) {
        if (r.times != first.times) throw ValidationError("records sampled at different times");
        if (r.subsystems.size() != first.subsystems.size()) throw ValidationError("records differ in subsystems");
    }
    const std::size_t nt = first.times.size();
    const double n = static_cast<double>(records.size());

    std::vector<const std::vector<double>*> z2, p2;
    for (const auto& r : records) {
        z2.push_back(&r.log_z2);
        p2.push_back(&r.log_p2);
    }

    AveragedSeries out;
    out.times = first.times;
    for (std::size_t t = 0; t < nt; ++t) {
        double mean = 0.0, sq = 0.0;
        for (const auto& r : records) {
            const double x = r.purity(t);
            mean += x;
            sq += x * x;
        }
        mean /= n;
        const double var = records.size() > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
        out.stderr_aor.push_back(std::sqrt(var / n) / (mean * std::log(2.0)));

        const double roa = ratio_of_sums(z2, p2, t);
        const double pur = protocol == Protocol::RatioOfAverages ? roa : mean;
        out.purity.push_back(pur);
        out.entropy.push_back(entropy_bits(pur));
        out.reweighted.push_back(reweighted_sum(records, t));
    }

    for (std::size_t s = 0; s < first.subsystems.size(); ++s) {
        out.subsystem_sizes.push_back(first.subsystems[s].size);
        std::vector<const std::vector<double>*> za, zabar;
        for (const auto& r : records) {
            if (r.subsystems[s].size != first.subsystems[s].size) throw ValidationError("subsystem sizes differ");
            za.push_back(&r.subsystems[s].log_z2);
            zabar.push_back(&r.subsystems[s].log_z2_complement);
        }
        std::vector<double> mi(nt);
        for (std::size_t t = 0; t < nt; ++t) {
            double sa, sabar, sq;
            if (protocol == Protocol::RatioOfAverages) {
                sa = entropy_bits(ratio_of_sums(za, p2, t));
                sabar = entropy_bits(ratio_of_sums(zabar, p2, t));
                sq = out.entropy[t];
            } else {
                double a = 0.0, ab = 0.0;
                for (std::size_t v = 0; v < records.size(); ++v) {
                    a += std::exp((*za[v])[t] - (*p2[v])[t]);
                    ab += std::exp((*zabar[v])[t] - (*p2[v])[t]);
                }
                sa = entropy_bits(a / n);
                sabar = entropy_bits(ab / n);
                sq = out.entropy[t];
            }
            mi[t] = sabar + sq - sa;
        }
        out.mutual_information.push_back(std::move(mi));
    }
    return out;
}

}  // namespace hbc::ed
