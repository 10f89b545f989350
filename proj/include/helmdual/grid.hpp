#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace helmdual {

// Periodic box [0, L)^N sampled with n points per axis.
struct GridSpec {
  int dimension = 2;
  double box_length = 1.0;
  int points_per_axis = 2;
  // Limiting-absorption regularisation of the Helmholtz symbol; 0 selects the
  // principal value with shell avoidance.
  double shell_epsilon = 0.0;

  std::size_t size() const noexcept;
  double spacing() const noexcept { return box_length / points_per_axis; }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  // Throws InvalidArgument unless N ∈ {2,3}, n even and ≥ 2, L > 0, ε ≥ 0.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Index3 = std::array<int, 3>;
using Point3 = std::array<double, 3>;

// Multi-index of a flat row-major offset (unused trailing axes are 0).
Index3 unravel(const GridSpec& grid, std::size_t flat) noexcept;
std::size_t ravel(const GridSpec& grid, const Index3& idx) noexcept;
Point3 coordinates(const GridSpec& grid, std::size_t flat) noexcept;

// Integer frequency m ∈ [-n/2, n/2) stored at FFT position j.
inline int signed_frequency(int j, int n) noexcept { return j < n / 2 ? j : j - n; }

// Deterministic pairwise summation; results depend only on the input order.
double pairwise_sum(std::span<const double> values) noexcept;

// Real scalar field sampled on a grid, row-major with the last axis fastest.
class Field {
 public:
  Field() = default;
  explicit Field(GridSpec grid);
  Field(GridSpec grid, std::vector<double> values);

  template <class F>
  static Field from_function(const GridSpec& grid, F&& fn) {
    Field out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values_[i] = fn(coordinates(grid, i));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;
  bool is_zero() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

// Throws GridMismatch when the two grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b);

// Returns f(· − y) for a shift of `steps` grid points per axis (periodic).
Field shifted(const Field& f, const Index3& steps);

// 64-bit FNV-1a hash of the raw values; used for deterministic ordering.
std::uint64_t field_hash(const Field& f) noexcept;

}  // namespace helmdual
