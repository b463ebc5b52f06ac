#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbc/ed/krylov.hpp"
#include "hbc/ed/state.hpp"
#include "hbc/model.hpp"

namespace hbc::ed {

// Times in units 1/J.
struct EDParams {
    int N = 4;
    double dt = 0.01;
    double total_time = 20.0;
    int n_realizations = 1;
    int krylov_dim = 8;
    std::uint64_t seed = 0;
    std::vector<double> sample_times;  // empty: 100 evenly spaced times in (0, total_time]
    std::vector<int> subsystem_sizes;  // |A|; A = first |A| qubits of Q

    void validate() const;
    std::size_t steps() const;
    // Sorted step counts at which observables are recorded.
    std::vector<std::size_t> sample_steps() const;
};

// Logs of the unnormalized observables; the state is renormalized each step and the
// norm is carried in log form, so long runs do not underflow.
struct TrajectoryRecord {
    std::uint32_t realization = 0;
    std::vector<double> times;
    std::vector<double> log_z2;  // ln tr rho_Q^2
    std::vector<double> log_p2;  // ln (tr rho_Q)^2
    struct Subsystem {
        int size = 0;
        std::vector<double> log_z2;             // ln tr rho_A^2, A = first `size` qubits of Q
        std::vector<double> log_z2_complement;  // ln tr rho_{Q\A}^2
    };
    std::vector<Subsystem> subsystems;

    double purity(std::size_t t) const;
};

TrajectoryRecord run_trajectory(const EDParams& ed, const ModelParams& p, std::uint32_t realization);

// Realizations 0..n-1, output ordered by realization regardless of thread count.
std::vector<TrajectoryRecord> run_realizations(const EDParams& ed, const ModelParams& p, int threads = 1);

std::string to_json_line(const TrajectoryRecord& r);
TrajectoryRecord from_json_line(const std::string& line);

}  // namespace hbc::ed
