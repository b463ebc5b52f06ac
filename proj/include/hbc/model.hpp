#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hbc/fields.hpp"

namespace hbc {

// Couplings of the Brownian circuit. Spin length is fixed to 1/2.
struct ModelParams {
    double J = 1.0;
    double gamma = 0.0;
    int N = 1;

    static ModelParams make(double J, double gamma, int N = 1);

    double gamma_hat() const { return gamma / J; }
    // Same physics expressed in units J = 1.
    ModelParams unit() const { return ModelParams{1.0, gamma / J, N}; }
    void validate() const;
};

enum class SaddleBranch { Trivial, BrokenPlus, BrokenMinus };

struct SaddlePoint {
    double bx = 0.0;
    double bz = 0.0;
    SaddleBranch branch = SaddleBranch::Trivial;
};

// Near-critical phi^4 data, in units J = 1.
struct CriticalTheory {
    double delta = 0.0;
    double alpha = 0.0;
    double kink_constant = 0.0;
};

double critical_gamma(const ModelParams& p);
SaddlePoint trivial_saddle(const ModelParams& p);
std::pair<SaddlePoint, SaddlePoint> broken_saddles(const ModelParams& p);

// Static action density with ln K replaced by B T / 2.
double bulk_action_density(double bx, double bz, const ModelParams& p);
// d/dbx and d/dbz of bulk_action_density.
std::pair<double, double> bulk_action_gradient(double bx, double bz, const ModelParams& p);

CriticalTheory delta_param(const ModelParams& p);
double kink_action_constant();

// bx(t) = -sqrt(delta) tanh((t - center) sqrt(delta/2)), bz = (gamma + gamma_c)/3.
FieldConfig instanton_seed(const CriticalTheory& th, double center, const TimeGrid& grid);

std::vector<double> phi4_residual(const FieldConfig& c, const CriticalTheory& th);

// Kernel form of the near-critical action for B_x, T -> infinity kernel.
// Fields and times in units J = 1.
double effective_kernel_action(const FieldConfig& c, const ModelParams& p);

// Leading-order instanton action of the kernel action above,
// c * delta^{3/2} / (16 sqrt(2) alpha^3) in units J = 1.
double kernel_instanton_action(const ModelParams& p);

double purity_dilute_gas(int N, double i_star, double T, double T0 = 0.0, double a = 1.0);

enum class PurityRegime { MixedAboveKc, MixedBelowKc, Purified };

struct RegimeInputs {
    PurityRegime regime = PurityRegime::Purified;
    std::optional<double> i_star;
    std::optional<double> dI_plus;
    std::optional<double> dI_minus;
    std::optional<double> dI_zero;
    std::optional<double> T;
    double T0 = 0.0;
    double a_prime = 1.0;
};

double purity_estimate(int N, const RegimeInputs& in);

}  // namespace hbc
