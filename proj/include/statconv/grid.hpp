#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace statconv {

/// Uniform grid on the space-time cylinder Q = (0,T) x torus, torus of one or
/// two periodic dimensions. Fields are cellwise constant; cells are indexed
/// flat, time-major, then row-major over the space dimensions.
struct Grid {
  int space_dim = 1;
  std::array<int, 2> cells{1, 1};  // cells[1] stays 1 when space_dim == 1
  int time_steps = 1;
  double final_time = 1.0;
  std::array<double, 2> lengths{1.0, 1.0};

  void validate() const;

  int space_cell_count() const { return cells[0] * cells[1]; }
  int cell_count() const { return time_steps * space_cell_count(); }
  double dx(int dim) const { return lengths[dim] / cells[dim]; }
  double dt() const { return final_time / time_steps; }
  double space_volume() const {
    return space_dim == 1 ? lengths[0] : lengths[0] * lengths[1];
  }
  double domain_measure() const { return final_time * space_volume(); }
  double cell_volume() const { return dt() * space_volume() / space_cell_count(); }

  int time_index(int cell) const { return cell / space_cell_count(); }
  int space_index(int cell) const { return cell % space_cell_count(); }
  double time_center(int cell) const { return (time_index(cell) + 0.5) * dt(); }
  std::array<double, 2> space_center(int cell) const;

  bool operator==(const Grid&) const = default;
};

/// An indexed family {U_n : n = 1..length} of cellwise-constant fields
/// Q -> R^D, stored contiguously in (member, cell, component) order.
class FieldSequence {
 public:
  FieldSequence(Grid grid, int state_dim, int length);

  const Grid& grid() const { return grid_; }
  int state_dim() const { return state_dim_; }
  int length() const { return length_; }

  /// member is 1-based to match the averaging index n.
  double value(int member, int cell, int comp) const {
    return values_[offset(member, cell, comp)];
  }
  double& value(int member, int cell, int comp) {
    return values_[offset(member, cell, comp)];
  }
  std::span<const double> state(int member, int cell) const {
    return {values_.data() + offset(member, cell, 0),
            static_cast<std::size_t>(state_dim_)};
  }

  std::span<double> raw() { return values_; }
  std::span<const double> raw() const { return values_; }

  /// Componentwise min/max over all members and cells.
  void value_range(std::vector<double>& lo, std::vector<double>& hi) const;

 private:
  std::size_t offset(int member, int cell, int comp) const {
    return (static_cast<std::size_t>(member - 1) * grid_.cell_count() + cell) *
               state_dim_ +
           comp;
  }

  Grid grid_;
  int state_dim_;
  int length_;
  std::vector<double> values_;
};

}  // namespace statconv
