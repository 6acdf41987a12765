#include "curvemax/fit.hpp"

#include <cmath>

#include "curvemax/common.hpp"

namespace curvemax {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("fit_line: need at least two paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DataError("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.residual_norm = std::sqrt(ss);
  return fit;
}

}  // namespace curvemax
