#include "helmdual/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "helmdual/error.hpp"

namespace helmdual {

std::size_t GridSpec::size() const noexcept {
  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) total *= static_cast<std::size_t>(points_per_axis);
  return total;
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dimension); }

double GridSpec::volume() const noexcept { return std::pow(box_length, dimension); }

void GridSpec::validate() const {
  if (dimension != 2 && dimension != 3)
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 2 or 3, got " + std::to_string(dimension));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw Error(ErrorKind::InvalidArgument, "box length must be positive");
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw Error(ErrorKind::InvalidArgument,
                "points per axis must be even and >= 2, got " + std::to_string(points_per_axis));
  if (!(shell_epsilon >= 0.0) || !std::isfinite(shell_epsilon))
    throw Error(ErrorKind::InvalidArgument, "shell epsilon must be >= 0");
}

Index3 unravel(const GridSpec& grid, std::size_t flat) noexcept {
  Index3 idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(grid.points_per_axis);
  for (int d = grid.dimension - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t ravel(const GridSpec& grid, const Index3& idx) noexcept {
  std::size_t flat = 0;
  const auto n = static_cast<std::size_t>(grid.points_per_axis);
  for (int d = 0; d < grid.dimension; ++d) flat = flat * n + static_cast<std::size_t>(idx[d]);
  return flat;
}

Point3 coordinates(const GridSpec& grid, std::size_t flat) noexcept {
  const Index3 idx = unravel(grid, flat);
  const double h = grid.spacing();
  return {idx[0] * h, idx[1] * h, idx[2] * h};
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 128;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Field::Field(GridSpec grid) : grid_(grid) {
  grid_.validate();
  values_.assign(grid_.size(), 0.0);
}

Field::Field(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::InvalidArgument, "field has " + std::to_string(values_.size()) +
                                                " values, grid needs " + std::to_string(grid_.size()));
  if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "field values must be finite");
}

bool Field::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool Field::is_zero() const noexcept {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

Field shifted(const Field& f, const Index3& steps) {
  const GridSpec& g = f.grid();
  const int n = g.points_per_axis;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    Index3 idx = unravel(g, i);
    for (int d = 0; d < g.dimension; ++d) idx[d] = ((idx[d] - steps[d]) % n + n) % n;
    out[i] = f[ravel(g, idx)];
  }
  return out;
}

std::uint64_t field_hash(const Field& f) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : f.values()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace helmdual
