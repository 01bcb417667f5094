#include "statconv/fixtures.hpp"

#include <stdexcept>

namespace statconv::fixtures {

namespace {

FieldSequence fill_constant_in_space(const Grid& grid, int length,
                                     const std::vector<std::vector<double>>& per_member) {
  FieldSequence seq(grid, static_cast<int>(per_member[0].size()), length);
  const int cells = grid.cell_count();
  for (int n = 1; n <= length; ++n) {
    const auto& v = per_member[n - 1];
    for (int cell = 0; cell < cells; ++cell)
      for (std::size_t c = 0; c < v.size(); ++c)
        seq.value(n, cell, static_cast<int>(c)) = v[c];
  }
  return seq;
}

}  // namespace

Grid unit_grid() {
  Grid g;
  g.space_dim = 1;
  g.cells = {1, 1};
  g.time_steps = 1;
  g.final_time = 1.0;
  g.lengths = {1.0, 1.0};
  return g;
}

FieldSequence constant(const Grid& grid, int length, const std::vector<double>& value) {
  std::vector<std::vector<double>> members(length, value);
  return fill_constant_in_space(grid, length, members);
}

FieldSequence alternating(const Grid& grid, int length, double hi, double lo) {
  std::vector<std::vector<double>> members(length);
  for (int n = 1; n <= length; ++n) members[n - 1] = {n % 2 == 1 ? hi : lo};
  return fill_constant_in_space(grid, length, members);
}

FieldSequence periodic_values(const Grid& grid, int length,
                              const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("periodic fixture: empty value list");
  std::vector<std::vector<double>> members(length);
  for (int n = 1; n <= length; ++n)
    members[n - 1] = {values[(n - 1) % values.size()]};
  return fill_constant_in_space(grid, length, members);
}

bool block_member(int n) {
  // 1 <= n; blocks [2^(2j), 2^(2j+1)) for j = 0, 1, ...
  long lo = 1;
  while (lo <= n) {
    if (n < 2 * lo) return true;
    lo *= 4;
  }
  return false;
}

FieldSequence block(const Grid& grid, int length) {
  std::vector<std::vector<double>> members(length);
  for (int n = 1; n <= length; ++n) members[n - 1] = {block_member(n) ? 1.0 : 0.0};
  return fill_constant_in_space(grid, length, members);
}

FieldSequence harmonic(const Grid& grid, int length, double base) {
  std::vector<std::vector<double>> members(length);
  for (int n = 1; n <= length; ++n) members[n - 1] = {base + 1.0 / n};
  return fill_constant_in_space(grid, length, members);
}

FieldSequence alternating_momentum(const Grid& grid, int length, double speed) {
  std::vector<std::vector<double>> members(length);
  for (int n = 1; n <= length; ++n) {
    std::vector<double> v(1 + grid.space_dim, 0.0);
    v[0] = 1.0;
    v[1] = (n % 2 == 1 ? speed : -speed);
    members[n - 1] = v;
  }
  return fill_constant_in_space(grid, length, members);
}

}  // namespace statconv::fixtures
