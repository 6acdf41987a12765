#pragma once

#include <span>
#include <vector>

namespace curvemax {

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;  // y_i - fitted_i
  double residual_norm = 0.0;     // Euclidean norm of residuals
};

/// Requires at least two points with distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace curvemax
