#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbc/action.hpp"
#include "hbc/fields.hpp"
#include "hbc/model.hpp"

namespace hbc {

// Step sizes act on the per-site gradient dI/db_i, which already carries a factor dt.
struct DescentSettings {
    double step_size = 1.0;
    double bz_step_ratio = 1.0 / 3.0;
    double growth = 1.1;
    double threshold = 1e-7;
    int max_iters = 20000;

    void validate() const;
};

struct DescentResult {
    FieldConfig config;
    ActionBreakdown action;
    int iterations = 0;
    bool converged = false;  // false means max_iters hit; config is the best so far
    double last_change = 0.0;
    double grad_norm = 0.0;
};

// Minimize over bx, maximize over bz, with backtracking on each half step.
DescentResult descend_ascend(const FieldConfig& config0, const BoundarySpec& spec,
                             const ModelParams& p, const DescentSettings& s);

struct InstantonOptions {
    double center_fraction = 0.5;
    bool check_separation = true;
};

struct InstantonResult {
    double i_star = 0.0;
    FieldConfig config_Z2;
    FieldConfig config_P2;
    double total_Z2 = 0.0;
    double total_P2 = 0.0;
    int iterations_Z2 = 0;
    int iterations_P2 = 0;
    bool converged = false;
    double residual_grad_norm = 0.0;
    std::vector<std::string> warnings;
};

struct GridPolicy {
    double dt = 0.05;
    double min_T = 300.0;
    double max_T = 6000.0;
    double widths = 20.0;  // T >= widths / sqrt(|delta|)
};

// JT = max(min_T, widths / sqrt|delta|), capped at max_T; |delta| is used on both sides of gamma_c.
TimeGrid default_grid(const ModelParams& p, const GridPolicy& policy = {});

InstantonResult instanton_action(const ModelParams& p, const TimeGrid& grid, const DescentSettings& s,
                                 const InstantonOptions& opt = {});

struct SweepRow {
    double gamma = 0.0;
    double i_star = 0.0;
    double grad_norm = 0.0;
    int iters = 0;
    bool ok = false;
    std::string error;
};

// Fixed grid when given, otherwise default_grid per gamma. Rows keep input order.
std::vector<SweepRow> sweep_gamma(const std::vector<double>& gammas, const ModelParams& base,
                                  const std::optional<TimeGrid>& grid, const DescentSettings& s,
                                  int threads = 1, const GridPolicy& policy = {});

struct KScanRow {
    double k = 0.0;
    double delta_I_bdy = 0.0;
    double i_star = 0.0;
    double total_zero = 0.0;
    double total_one = 0.0;
};

struct CriticalFractionResult {
    double k_c = 0.0;
    double error_bar = 0.0;  // grid resolution at the crossing
    double i_star = 0.0;
    std::vector<KScanRow> rows;  // every evaluated k, ascending
};

std::vector<double> default_k_grid();
std::vector<double> k_grid_range(double k_min, double k_max, double step);

// Exchange point of the zero- and one-instanton totals. Grids longer than 16 points
// are searched by bisection over indices with warm starts.
CriticalFractionResult critical_fraction(const ModelParams& p, const TimeGrid& grid,
                                         const DescentSettings& s, const std::vector<double>& k_grid);

// max(0, N i_star(T) - ln(T / T0_eff)) for each duration T.
std::vector<double> entropy_series_prediction(const ModelParams& p, int N, const std::vector<double>& times,
                                              const DescentSettings& s, double dt = 0.05,
                                              double T0_eff = 1.0);

}  // namespace hbc
