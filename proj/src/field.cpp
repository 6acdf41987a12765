#include "curvemax/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace curvemax {

SampledField2D::SampledField2D(std::size_t n_, double L_, double fill)
    : n(n_), L(L_), values(n_ * n_, fill) {
  if (n_ == 0 || !(L_ > 0.0) || !std::isfinite(L_))
    throw ParameterError("field grid needs n > 0 and finite L > 0");
}

SampledField2D SampledField2D::from_function(std::size_t n, double L,
                                             const std::function<double(double, double)>& f) {
  SampledField2D out(n, L);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i1 = b; i1 < e; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2) out.at(i1, i2) = f(out.coord(i1), out.coord(i2));
  });
  return out;
}

double SampledField2D::lp_norm(double p) const {
  if (!(p >= 1.0)) throw ParameterError("lp_norm needs p >= 1");
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return std::pow(h() * h() * s, 1.0 / p);
}

double SampledField2D::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void require_same_grid(const SampledField2D& a, const SampledField2D& b) {
  if (a.n != b.n || a.L != b.L)
    throw GridMismatchError("fields live on different grids (n=" + std::to_string(a.n) + " vs " +
                            std::to_string(b.n) + ")");
}

BilinearSampler::BilinearSampler(const SampledField2D& f)
    : f_(&f), inv_h_(1.0 / f.h()), origin_(-0.5 * f.L) {}

double BilinearSampler::operator()(double x1, double x2) const {
  const auto n = static_cast<std::int64_t>(f_->n);
  const double g1 = (x1 - origin_) * inv_h_;
  const double g2 = (x2 - origin_) * inv_h_;
  const double f1 = std::floor(g1), f2 = std::floor(g2);
  const double a = g1 - f1, b = g2 - f2;
  auto wrap = [n](double k) {
    auto m = static_cast<std::int64_t>(k) % n;
    return static_cast<std::size_t>(m < 0 ? m + n : m);
  };
  const std::size_t i0 = wrap(f1), i1 = wrap(f1 + 1.0), k0 = wrap(f2), k1 = wrap(f2 + 1.0);
  const double f00 = f_->at(i0, k0), f10 = f_->at(i1, k0), f01 = f_->at(i0, k1), f11 = f_->at(i1, k1);
  return f00 + a * (f10 - f00) + b * (f01 - f00) + a * b * (f11 - f10 - f01 + f00);
}

void write_field(const std::string& path, const SampledField2D& f) {
  static_assert(std::endian::native == std::endian::little, "field files are little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path + " for writing");
  os << f.n << ',' << format_number(f.L) << ',' << (f.periodic ? 1 : 0) << '\n';
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw DataError("short write to " + path);
}

SampledField2D read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::size_t n = 0;
  double L = 0.0;
  int periodic = 1;
  char c1 = 0, c2 = 0;
  if (!(hs >> n >> c1 >> L >> c2 >> periodic) || c1 != ',' || c2 != ',')
    throw DataError(path + ": malformed header '" + header + "'");
  SampledField2D f(n, L);
  f.periodic = periodic != 0;
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double)))
    throw DataError(path + ": truncated payload");
  for (double v : f.values)
    if (!std::isfinite(v)) throw DataError(path + ": non-finite sample");
  return f;
}

void write_line_cut_csv(std::ostream& os, const SampledField2D& f, int axis, std::size_t index) {
  if (index >= f.n || (axis != 0 && axis != 1)) throw ParameterError("line cut out of range");
  os << "x,value\n";
  for (std::size_t k = 0; k < f.n; ++k) {
    const double v = axis == 0 ? f.at(index, k) : f.at(k, index);
    os << format_number(f.coord(k)) << ',' << format_number(v) << '\n';
  }
}

}  // namespace curvemax
