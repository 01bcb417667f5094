#pragma once

#include <vector>

#include "statconv/grid.hpp"

namespace statconv::fixtures {

/// Unit space-time cylinder with a single cell; the default stage for the
/// scalar reference sequences below (all of them constant in space).
Grid unit_grid();

FieldSequence constant(const Grid& grid, int length, const std::vector<double>& value);

/// U_n = hi for odd n, lo for even n (scalar).
FieldSequence alternating(const Grid& grid, int length, double hi = 1.0, double lo = 0.0);

/// Scalar sequence cycling through `values` with period values.size().
FieldSequence periodic_values(const Grid& grid, int length, const std::vector<double>& values);

/// Scalar 0/1 sequence equal to 1 exactly on the dyadic blocks
/// [2^(2j), 2^(2j+1)); its running density oscillates between 1/3 and 2/3,
/// the stock non-convergent example.
FieldSequence block(const Grid& grid, int length);
bool block_member(int n);

/// U_n = base + 1/n (scalar, strongly convergent to base).
FieldSequence harmonic(const Grid& grid, int length, double base = 0.5);

/// Gas-dynamics style family on the grid: rho = 1 and first momentum
/// component alternating +-speed with the member index. State dimension is
/// 1 + space_dim.
FieldSequence alternating_momentum(const Grid& grid, int length, double speed = 1.0);

}  // namespace statconv::fixtures
