#pragma once

#include <cstddef>
#include <vector>

namespace hbc {

// Uniform grid in units of 1/J. Field values live at step midpoints.
struct TimeGrid {
    double dt = 0.05;
    std::size_t steps = 0;

    double T() const { return dt * static_cast<double>(steps); }
    double midpoint(std::size_t i) const { return dt * (static_cast<double>(i) + 0.5); }

    static TimeGrid with_duration(double T, double dt);
};

// Real fields B_x(t), B_z(t) on a grid, in units of J.
struct FieldConfig {
    TimeGrid grid;
    std::vector<double> bx;
    std::vector<double> bz;

    FieldConfig() = default;
    explicit FieldConfig(const TimeGrid& g, double bx0 = 0.0, double bz0 = 0.0)
        : grid(g), bx(g.steps, bx0), bz(g.steps, bz0) {}

    std::size_t size() const { return bx.size(); }
    void validate() const;
};

}  // namespace hbc
