#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hbc/ed/rng.hpp"
#include "hbc/model.hpp"

namespace hbc::ed {

using Vector = Eigen::VectorXcd;

// Qubits 0..N-1 form Q and N..2N-1 form R. R occupies the low bits of the amplitude
// index so that operators on Q sweep contiguous runs of 2^N amplitudes.
inline int bit_position(int qubit, int N) { return qubit < N ? qubit + N : qubit - N; }

struct PureState {
    int N = 0;
    Vector amplitudes;

    int qubits() const { return 2 * N; }
    double norm_squared() const { return amplitudes.squaredNorm(); }
};

PureState init_epr_state(int N);

// Hermitian operator on Q as a sum of two-qubit and one-qubit blocks, applied without
// building the full matrix. Two-qubit blocks use local index bit_i + 2 bit_j.
struct Generator {
    struct Pair {
        int i, j;
        Eigen::Matrix4cd block;
    };
    struct Site {
        int i;
        Eigen::Matrix2cd block;
    };
    int N = 0;
    std::vector<Pair> pairs;
    std::vector<Site> sites;

    // out = G in
    void apply(const Vector& in, Vector& out) const;
};

struct DisorderLayer {
    LayerKind kind = LayerKind::Unitary;
    int N = 0;
    std::vector<double> couplings;  // J_ij^{ab}: pair index (i<j, lexicographic) * 9 + 3a + b
    std::vector<double> fields;     // n_i^a: 3 i + a
};

double coupling_variance(const ModelParams& p, int N, double dt);
double field_variance(const ModelParams& p, double dt);

DisorderLayer sample_disorder_layer(const ModelParams& p, int N, double dt, std::uint64_t seed,
                                    std::uint32_t realization, std::uint32_t step, LayerKind kind);

// H = sum J_ij^{ab} S_i^a S_j^b on Q; O = sum n_i^a S_i^a on Q, with S = sigma / 2.
Generator hamiltonian(const DisorderLayer& layer);
Generator measurement_operator(const DisorderLayer& layer);

struct PurityResult {
    double z2 = 0.0;     // tr rho_A^2 of the unnormalized state
    double trace = 0.0;  // <psi|psi>
};

// Traces out R and Q minus `subset` via the Gram matrix on the smaller side of the cut.
PurityResult subsystem_purity(const PureState& s, const std::vector<int>& subset);

}  // namespace hbc::ed
