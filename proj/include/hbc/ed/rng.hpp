#pragma once

#include <array>
#include <cstdint>

namespace hbc::ed {

// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

enum class LayerKind : std::uint32_t { Unitary = 0, Measurement = 1 };

// Standard normals addressed by (seed, realization, step, kind, term). Two terms share one
// Philox block through the Box-Muller pair.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint32_t realization, std::uint32_t step, LayerKind kind);
    double normal(std::uint32_t term) const;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t realization_, step_, kind_;
};

}  // namespace hbc::ed
