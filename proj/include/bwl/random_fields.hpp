#pragma once

// Deterministic test fields. Random fields are drawn per physical wavenumber in
// an order that does not depend on N, so the same seed gives the same function
// on every grid that resolves the band.

#include <array>
#include <cstdint>

#include "bwl/grid.hpp"

namespace bwl {

/// Seed for member `index` of a family seeded by `seed` (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Zero-mean field with complex Gaussian coefficients scaled by |xi|^{-slope}
/// on xi_lo <= |xi| <= xi_hi, normalized to unit L^2 norm. Throws if the band
/// is empty or reaches the grid's Nyquist frequency.
GridField random_power_law(const TorusGrid& grid, double slope, double xi_lo, double xi_hi,
                           std::uint64_t seed);

/// amplitude * exp(-|x|^2 / (2 width^2)).
GridField gaussian_profile(const TorusGrid& grid, double width, double amplitude = 1.0);

/// amplitude * <x>^{-decay} * w(|x|), with w a smooth window that is ~1 inside
/// `radius` and falls off over radius / 8.
GridField slow_decay_profile(const TorusGrid& grid, double decay, double radius,
                             double amplitude = 1.0);

/// amplitude * cos(xi . x) for the lattice frequency with wavenumbers k.
GridField single_mode(const TorusGrid& grid, const std::array<int, 3>& k, double amplitude = 1.0);

/// Low-frequency field with transform amplitude * |xi|^{-a} exp(-2|xi|^2) chi(2|xi|)
/// and zero mean, where a = n(1 - 1/q) - eps. Its heat-type decay from L^q is
/// the critical one, up to eps / 2. For q = 1, eps = 0 it is a Gaussian bump.
GridField critical_low_frequency(const TorusGrid& grid, double q, double eps,
                                 double amplitude = 1.0);

}  // namespace bwl
