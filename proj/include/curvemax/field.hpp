#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "curvemax/common.hpp"

namespace curvemax {

/// Real samples on an n x n grid of side L. Node (i1, i2) sits at
/// (-L/2 + i1 h, -L/2 + i2 h) with h = L/n, so index n/2 is the origin.
/// Storage is row-major in i1: values[i1 * n + i2].
struct SampledField2D {
  std::size_t n = 0;
  double L = 0.0;
  bool periodic = true;
  std::vector<double> values;

  SampledField2D() = default;
  SampledField2D(std::size_t n, double L, double fill = 0.0);

  static SampledField2D from_function(std::size_t n, double L,
                                      const std::function<double(double, double)>& f);

  [[nodiscard]] double h() const { return L / static_cast<double>(n); }
  [[nodiscard]] double coord(std::size_t i) const { return -0.5 * L + static_cast<double>(i) * h(); }
  [[nodiscard]] double& at(std::size_t i1, std::size_t i2) { return values[i1 * n + i2]; }
  [[nodiscard]] double at(std::size_t i1, std::size_t i2) const { return values[i1 * n + i2]; }

  /// Riemann-sum norm (h^2 sum |f|^p)^{1/p}.
  [[nodiscard]] double lp_norm(double p) const;
  [[nodiscard]] double max_abs() const;
};

void require_same_grid(const SampledField2D& a, const SampledField2D& b);

/// Periodic bilinear interpolation. Exact on constants and on functions
/// affine in each variable within a cell.
class BilinearSampler {
 public:
  explicit BilinearSampler(const SampledField2D& f);
  double operator()(double x1, double x2) const;

 private:
  const SampledField2D* f_;
  double inv_h_;
  double origin_;
};

/// Binary format: ASCII line "n,L,periodic\n" then n*n little-endian doubles.
void write_field(const std::string& path, const SampledField2D& f);
SampledField2D read_field(const std::string& path);

/// CSV "x,value" along the row i1 = index (axis 0) or column i2 = index (axis 1).
void write_line_cut_csv(std::ostream& os, const SampledField2D& f, int axis, std::size_t index);

}  // namespace curvemax
