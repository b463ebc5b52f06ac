#pragma once

#include "hbc/ed/state.hpp"

namespace hbc::ed {

struct KrylovSettings {
    int dim = 8;
    double breakdown_tol = 1e-12;
    double residual_tol = 1e-8;
};

// exp(-i scale G) v in a Lanczos subspace with full re-orthogonalization.
Vector krylov_apply_exp(const Vector& v, const Generator& g, double scale, const KrylovSettings& ks = {});

// (cos(O dt/2) - sin(O dt/2)) v via (1/2 - i/2) e^{-i O dt/2} + (1/2 + i/2) e^{+i O dt/2}.
Vector apply_weak_measurement(const Vector& v, const Generator& o, double dt, const KrylovSettings& ks = {});

}  // namespace hbc::ed
