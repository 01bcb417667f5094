#include "statconv/grid.hpp"

#include <stdexcept>
#include <string>

namespace statconv {

void Grid::validate() const {
  if (space_dim != 1 && space_dim != 2)
    throw std::invalid_argument("grid: space_dim must be 1 or 2");
  for (int d = 0; d < space_dim; ++d) {
    if (cells[d] < 1)
      throw std::invalid_argument("grid: cells must be >= 1 per dimension");
    if (!(lengths[d] > 0.0))
      throw std::invalid_argument("grid: torus lengths must be positive");
  }
  if (space_dim == 1 && cells[1] != 1)
    throw std::invalid_argument("grid: cells[1] must be 1 in one dimension");
  if (time_steps < 1) throw std::invalid_argument("grid: time_steps must be >= 1");
  if (!(final_time > 0.0))
    throw std::invalid_argument("grid: final_time must be positive");
}

std::array<double, 2> Grid::space_center(int cell) const {
  int s = space_index(cell);
  std::array<double, 2> x{0.0, 0.0};
  if (space_dim == 1) {
    x[0] = (s + 0.5) * dx(0);
  } else {
    int i = s / cells[1];
    int j = s % cells[1];
    x[0] = (i + 0.5) * dx(0);
    x[1] = (j + 0.5) * dx(1);
  }
  return x;
}

FieldSequence::FieldSequence(Grid grid, int state_dim, int length)
    : grid_(grid), state_dim_(state_dim), length_(length) {
  grid_.validate();
  if (state_dim < 1) throw std::invalid_argument("sequence: state_dim must be >= 1");
  if (length < 1) throw std::invalid_argument("sequence: length must be >= 1");
  values_.assign(static_cast<std::size_t>(length) * grid_.cell_count() * state_dim,
                 0.0);
}

void FieldSequence::value_range(std::vector<double>& lo, std::vector<double>& hi) const {
  lo.assign(state_dim_, values_[0]);
  hi.assign(state_dim_, values_[0]);
  for (int c = 0; c < state_dim_; ++c) {
    lo[c] = hi[c] = values_[c];
  }
  const std::size_t states = values_.size() / state_dim_;
  for (std::size_t s = 0; s < states; ++s) {
    for (int c = 0; c < state_dim_; ++c) {
      double v = values_[s * state_dim_ + c];
      if (v < lo[c]) lo[c] = v;
      if (v > hi[c]) hi[c] = v;
    }
  }
}

}  // namespace statconv
