#include "comodule/core.hpp"

#include <cmath>
#include <vector>

namespace comodule {

Standardized Standardized::given(Matrix m) {
  Standardized s;
  s.column_means = Vector::Zero(m.cols());
  s.column_scales = Vector::Ones(m.cols());
  s.data = std::move(m);
  s.provenance = Provenance::Given;
  return s;
}

void validate_raw(const Matrix& m) {
  if (m.rows() < 2 || m.cols() < 1)
    throw DimensionMismatch("matrix must have at least 2 rows and 1 column");
  if (!m.allFinite()) throw NonFinite("matrix contains NaN or Inf");
}

std::vector<Index> find_constant_columns(const Matrix& m) {
  std::vector<Index> out;
  for (Index j = 0; j < m.cols(); ++j) {
    if ((m.col(j).array() == m(0, j)).all()) out.push_back(j);
  }
  return out;
}

Standardized standardize_columns(const Matrix& m, ScaleConvention convention) {
  validate_raw(m);
  const Index n = m.rows(), p = m.cols();
  const double divisor =
      convention == ScaleConvention::SampleVariance ? double(n - 1) : double(n);

  Standardized out;
  out.convention = convention;
  out.column_means = m.colwise().mean();
  out.column_scales.resize(p);
  out.data.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    Vector centered = m.col(j).array() - out.column_means[j];
    const double ss = centered.squaredNorm();
    if (ss == 0.0) throw ConstantColumn(j);
    const double scale = std::sqrt(ss / divisor);
    out.column_scales[j] = scale;
    out.data.col(j) = centered / scale;
  }
  return out;
}

double objective(const Vector& u, const Vector& v, const Vector& w,
                 const Matrix& X, const Matrix& Y) {
  if (u.size() != X.cols() || v.size() != Y.cols() || w.size() != X.rows() ||
      X.rows() != Y.rows())
    throw DimensionMismatch("objective: nonconforming dimensions");
  Vector a = X * u;
  Vector b = Y * v;
  return -w.dot(a.cwiseProduct(b));
}

double pearson(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw LengthMismatch("pearson: unequal lengths");
  const Index n = x.size();
  if (n < 2) throw LengthMismatch("pearson: need at least 2 points");
  const double mx = x.mean(), my = y.mean();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("pearson: constant input");
  double r = sxy / std::sqrt(sxx * syy);
  // rounding can push |r| marginally past 1
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

}  // namespace comodule
