#include "hbc/ed/state.hpp"

#include <cmath>
#include <string>

#include "hbc/errors.hpp"

namespace hbc::ed {

namespace {

using cd = std::complex<double>;

const Eigen::Matrix2cd& pauli(int a) {
    static const Eigen::Matrix2cd m[3] = {
        (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
        (Eigen::Matrix2cd() << 0, cd(0, -1), cd(0, 1), 0).finished(),
        (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(),
    };
    return m[a];
}

}  // namespace

PureState init_epr_state(int N) {
    if (N < 1) throw InvalidParams("init_epr_state: N must be >= 1");
    if (2 * N > 14) throw InvalidParams("init_epr_state: 2N must be <= 14");
    PureState s;
    s.N = N;
    const std::size_t half = std::size_t{1} << N;
    s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(half * half));
    const double a = std::pow(2.0, -0.5 * N);
    for (std::size_t q = 0; q < half; ++q) s.amplitudes[static_cast<Eigen::Index>((q << N) | q)] = a;
    return s;
}

void Generator::apply(const Vector& in, Vector& out) const {
    const std::size_t dim = static_cast<std::size_t>(in.size());
    const std::size_t run = std::size_t{1} << N;  // contiguous R block
    out.setZero(in.size());
    const double* x = reinterpret_cast<const double*>(in.data());
    double* y = reinterpret_cast<double*>(out.data());
    for (const Pair& p : pairs) {
        const std::size_t mi = run << p.i, mj = run << p.j;
        const std::size_t ml = std::min(mi, mj), mh = std::max(mi, mj);
        double br[16], bi[16];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                br[4 * r + c] = p.block(r, c).real();
                bi[4 * r + c] = p.block(r, c).imag();
            }
        for (std::size_t a = 0; a < dim; a += 2 * mh)
            for (std::size_t b = a; b < a + mh; b += 2 * ml)
                for (std::size_t c = b; c < b + ml; c += run) {
                    const double* xs[4] = {x + 2 * c, x + 2 * (c | mi), x + 2 * (c | mj), x + 2 * (c | mi | mj)};
                    double* ys[4] = {y + 2 * c, y + 2 * (c | mi), y + 2 * (c | mj), y + 2 * (c | mi | mj)};
                    for (int r = 0; r < 4; ++r) {
                        const double* R = br + 4 * r;
                        const double* I = bi + 4 * r;
                        double* yr = ys[r];
                        for (std::size_t k = 0; k < 2 * run; k += 2) {
                            yr[k] += R[0] * xs[0][k] - I[0] * xs[0][k + 1] + R[1] * xs[1][k] - I[1] * xs[1][k + 1] +
                                     R[2] * xs[2][k] - I[2] * xs[2][k + 1] + R[3] * xs[3][k] - I[3] * xs[3][k + 1];
                            yr[k + 1] += R[0] * xs[0][k + 1] + I[0] * xs[0][k] + R[1] * xs[1][k + 1] +
                                         I[1] * xs[1][k] + R[2] * xs[2][k + 1] + I[2] * xs[2][k] +
                                         R[3] * xs[3][k + 1] + I[3] * xs[3][k];
                        }
                    }
                }
    }
    for (const Site& s : sites) {
        const std::size_t m = run << s.i;
        double br[4], bi[4];
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                br[2 * r + c] = s.block(r, c).real();
                bi[2 * r + c] = s.block(r, c).imag();
            }
        for (std::size_t a = 0; a < dim; a += 2 * m)
            for (std::size_t c = a; c < a + m; c += run) {
                const double* x0 = x + 2 * c;
                const double* x1 = x + 2 * (c | m);
                double* y0 = y + 2 * c;
                double* y1 = y + 2 * (c | m);
                for (std::size_t k = 0; k < 2 * run; k += 2) {
                    y0[k] += br[0] * x0[k] - bi[0] * x0[k + 1] + br[1] * x1[k] - bi[1] * x1[k + 1];
                    y0[k + 1] += br[0] * x0[k + 1] + bi[0] * x0[k] + br[1] * x1[k + 1] + bi[1] * x1[k];
                    y1[k] += br[2] * x0[k] - bi[2] * x0[k + 1] + br[3] * x1[k] - bi[3] * x1[k + 1];
                    y1[k + 1] += br[2] * x0[k + 1] + bi[2] * x0[k] + br[3] * x1[k + 1] + bi[3] * x1[k];
                }
            }
    }
}

double coupling_variance(const ModelParams& p, int N, double dt) {
    return 16.0 * p.J / (81.0 * N) * (2.0 / dt);
}

double field_variance(const ModelParams& p, double dt) { return 4.0 * p.gamma / 9.0 * (2.0 / dt); }

DisorderLayer sample_disorder_layer(const ModelParams& p, int N, double dt, std::uint64_t seed,
                                    std::uint32_t realization, std::uint32_t step, LayerKind kind) {
    if (N < 1) throw InvalidParams("sample_disorder_layer: N must be >= 1");
    if (!(dt > 0.0)) throw InvalidParams("sample_disorder_layer: dt must be > 0");
    DisorderLayer layer;
    layer.kind = kind;
    layer.N = N;
    const GaussianStream stream(seed, realization, step, kind);
    if (kind == LayerKind::Unitary) {
        const double sd = std::sqrt(coupling_variance(p, N, dt));
        const std::size_t n = 9 * static_cast<std::size_t>(N) * (N - 1) / 2;
        layer.couplings.resize(n);
        for (std::size_t t = 0; t < n; ++t) layer.couplings[t] = sd * stream.normal(static_cast<std::uint32_t>(t));
    } else {
        const double sd = std::sqrt(field_variance(p, dt));
        layer.fields.resize(3 * static_cast<std::size_t>(N));
        for (std::size_t t = 0; t < layer.fields.size(); ++t)
            layer.fields[t] = sd * stream.normal(static_cast<std::uint32_t>(t));
    }
    return layer;
}

Generator hamiltonian(const DisorderLayer& layer) {
    const int N = layer.N;
    Generator g;
    g.N = N;
    std::size_t t = 0;
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            Eigen::Matrix4cd B = Eigen::Matrix4cd::Zero();
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const double c = layer.couplings.at(t++) / 4.0;
                    const Eigen::Matrix2cd& si = pauli(a);
                    const Eigen::Matrix2cd& sj = pauli(b);
                    for (int r = 0; r < 4; ++r)
                        for (int s = 0; s < 4; ++s) B(r, s) += c * si(r & 1, s & 1) * sj(r >> 1, s >> 1);
                }
            }
            g.pairs.push_back({i, j, B});
        }
    }
    return g;
}

Generator measurement_operator(const DisorderLayer& layer) {
    Generator g;
    g.N = layer.N;
    for (int i = 0; i < layer.N; ++i) {
        Eigen::Matrix2cd B = Eigen::Matrix2cd::Zero();
        for (int a = 0; a < 3; ++a) B += (layer.fields.at(3 * i + a) / 2.0) * pauli(a);
        g.sites.push_back({i, B});
    }
    return g;
}

PurityResult subsystem_purity(const PureState& s, const std::vector<int>& subset) {
    const int n = s.qubits();
    std::vector<bool> in_a(n, false);
    for (int q : subset) {
        if (q < 0 || q >= s.N) throw InvalidParams("subset qubit " + std::to_string(q) + " is not in Q");
        if (in_a[q]) throw InvalidParams("subset repeats qubit " + std::to_string(q));
        in_a[q] = true;
    }
    const int na = static_cast<int>(subset.size());
    const Eigen::Index da = Eigen::Index{1} << na, db = Eigen::Index{1} << (n - na);
    Eigen::MatrixXcd psi(da, db);
    const std::size_t dim = static_cast<std::size_t>(s.amplitudes.size());
    for (std::size_t idx = 0; idx < dim; ++idx) {
        Eigen::Index a = 0, b = 0;
        int ka = 0, kb = 0;
        for (int q = 0; q < n; ++q) {
            const Eigen::Index bit = (idx >> bit_position(q, s.N)) & 1;
            if (in_a[q]) a |= bit << ka++;
            else b |= bit << kb++;
        }
        psi(a, b) = s.amplitudes[static_cast<Eigen::Index>(idx)];
    }
    PurityResult r;
    r.trace = s.norm_squared();
    if (da <= db) {
        const Eigen::MatrixXcd gram = psi * psi.adjoint();
        r.z2 = gram.squaredNorm();
    } else {
        const Eigen::MatrixXcd gram = psi.adjoint() * psi;
        r.z2 = gram.squaredNorm();
    }
    return r;
}

}  // namespace hbc::ed
