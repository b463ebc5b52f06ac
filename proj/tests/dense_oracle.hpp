#pragma once

// Dense reference implementation of the ED layer: Kronecker-built operators, exact
// spectral functions, and explicit partial traces. Only usable at small N.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hbc/ed/state.hpp"
#include "hbc/ed/trajectory.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Eigen::Matrix2cd pauli(int a) {
    Eigen::Matrix2cd s;
    if (a == 0) s << 0, 1, 1, 0;
    if (a == 1) s << 0, cd(0, -1), cd(0, 1), 0;
    if (a == 2) s << 1, 0, 0, -1;
    return s;
}

// op acting on one bit of an nbits register, as I x ... x op x ... x I.
inline Mat embed(const Eigen::Matrix2cd& op, int bit, int nbits) {
    Mat out = Mat::Identity(1, 1);
    for (int b = nbits - 1; b >= 0; --b) {
        const Mat f = b == bit ? Mat(op) : Mat(Mat::Identity(2, 2));
        Mat k(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c) k.block(r * 2, c * 2, 2, 2) = out(r, c) * f;
        out = k;
    }
    return out;
}

inline Mat spin(int a, int qubit, int N) { return 0.5 * embed(pauli(a), hbc::ed::bit_position(qubit, N), 2 * N); }

inline Mat dense_operator(const hbc::ed::DisorderLayer& l) {
    const int N = l.N;
    Mat H = Mat::Zero(1 << (2 * N), 1 << (2 * N));
    std::size_t pair = 0;
    for (int i = 0; i < N && !l.couplings.empty(); ++i)
        for (int j = i + 1; j < N; ++j, ++pair)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) H += l.couplings[pair * 9 + 3 * a + b] * spin(a, i, N) * spin(b, j, N);
    for (int i = 0; i < N && !l.fields.empty(); ++i)
        for (int a = 0; a < 3; ++a) H += l.fields[3 * i + a] * spin(a, i, N);
    return H;
}

inline Mat spectral(const Mat& herm, const std::function<cd(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    Vec d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline Vec epr(int N) {
    Vec v = Vec::Zero(1 << (2 * N));
    for (int x = 0; x < (1 << N); ++x) {
        std::size_t idx = 0;
        for (int q = 0; q < N; ++q)
            if ((x >> q) & 1) idx |= (std::size_t{1} << hbc::ed::bit_position(q, N)) | (std::size_t{1} << hbc::ed::bit_position(q + N, N));
        v(static_cast<Eigen::Index>(idx)) = 1.0;
    }
    return v / std::sqrt(static_cast<double>(1 << N));
}

// Reduced density matrix on the listed qubits of an unnormalized state.
inline Mat reduced(const Vec& psi, const std::vector<int>& subset, int N) {
    const int nq = 2 * N;
    const int na = static_cast<int>(subset.size());
    std::vector<int> in_a(nq, -1);
    for (int k = 0; k < na; ++k) in_a[hbc::ed::bit_position(subset[k], N)] = k;
    Mat rho = Mat::Zero(1 << na, 1 << na);
    auto split = [&](std::size_t idx, std::size_t& a, std::size_t& e) {
        a = e = 0;
        int ek = 0;
        for (int b = 0; b < nq; ++b) {
            const std::size_t bit = (idx >> b) & 1;
            if (in_a[b] >= 0) a |= bit << in_a[b];
            else e |= bit << ek++;
        }
    };
    for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(psi.size()); ++j) {
            std::size_t ai, ei, aj, ej;
            split(i, ai, ei);
            split(j, aj, ej);
            if (ei == ej) rho(ai, aj) += psi(i) * std::conj(psi(j));
        }
    return rho;
}

inline double purity_z2(const Vec& psi, const std::vector<int>& subset, int N) {
    const Mat r = reduced(psi, subset, N);
    return (r * r).trace().real();
}

struct Series {
    std::vector<double> log_z2, log_p2;
};

// Same disorder as run_trajectory, evolved with dense exact exponentials and no renormalization.
inline Series trajectory(const hbc::ed::EDParams& ed, const hbc::ModelParams& p, std::uint32_t realization) {
    const int N = ed.N;
    Vec psi = epr(N);
    std::vector<int> q(N);
    for (int i = 0; i < N; ++i) q[i] = i;
    Series out;
    const auto samples = ed.sample_steps();
    std::size_t next = 0;
    for (std::size_t step = 0; next < samples.size(); ++step) {
        const auto st = static_cast<std::uint32_t>(step);
        const auto meas = hbc::ed::sample_disorder_layer(p, N, ed.dt, ed.seed, realization, st, hbc::ed::LayerKind::Measurement);
        const double h = ed.dt / 2.0;
        psi = spectral(dense_operator(meas), [h](double x) { return cd(std::cos(x * h) - std::sin(x * h), 0.0); }) * psi;
        if (N > 1) {
            const auto uni = hbc::ed::sample_disorder_layer(p, N, ed.dt, ed.seed, realization, st, hbc::ed::LayerKind::Unitary);
            psi = spectral(dense_operator(uni), [h](double x) { return std::exp(cd(0.0, -x * h)); }) * psi;
        }
        while (next < samples.size() && samples[next] == step + 1) {
            const double tr = psi.squaredNorm();
            out.log_z2.push_back(std::log(purity_z2(psi, q, N)));
            out.log_p2.push_back(2.0 * std::log(tr));
            ++next;
        }
    }
    return out;
}

}  // namespace oracle
