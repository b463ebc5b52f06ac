#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "hbc/fields.hpp"
#include "hbc/model.hpp"

namespace hbc {

// State of the replica bit in the (|up>, |down>) basis.
struct RBitVec {
    std::complex<double> up;
    std::complex<double> down;
};

enum class BoundaryWhich { Plus, Minus };

RBitVec boundary_state(BoundaryWhich which);

struct BoundarySpec {
    enum class Kind { P2, Z2, Subsystem };
    Kind kind = Kind::P2;
    double k = 0.0;

    static BoundarySpec p2() { return {Kind::P2, 0.0}; }
    static BoundarySpec z2() { return {Kind::Z2, 1.0}; }
    static BoundarySpec subsystem(double k);

    // Weight of ln K_A in the total action.
    double fraction() const;
};

struct ActionBreakdown {
    double bulk = 0.0;
    double logK_A = 0.0;
    double logK_Abar = 0.0;
    double total = 0.0;
};

struct ActionGradient {
    std::vector<double> gx;
    std::vector<double> gz;

    double norm() const;
};

// exp[(dt/2)(bx sigma_x + bz sigma_z)]
Eigen::Matrix2d step_matrix(double bx, double bz, double dt);

double log_propagator(const FieldConfig& c, const RBitVec& psi0, const RBitVec& psiT);

// Bulk density without the ln K term, units J = 1.
double bulk_density(double bx, double bz, double gamma_hat);

// Fields in units J = 1; params may carry any J.
ActionBreakdown total_action(const FieldConfig& c, const BoundarySpec& spec, const ModelParams& p);
ActionGradient action_gradient(const FieldConfig& c, const BoundarySpec& spec, const ModelParams& p);

// Value and gradient from one forward sweep and one backward sweep per boundary.
ActionBreakdown action_with_gradient(const FieldConfig& c, const BoundarySpec& spec,
                                     const ModelParams& p, ActionGradient* grad);

}  // namespace hbc
