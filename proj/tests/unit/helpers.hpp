#pragma once

#include <cmath>

#include "levyflow/algebra.hpp"

namespace testutil {

using levyflow::Complex;
using levyflow::Matrix;

/// exp(m) by a truncated Taylor series with repeated squaring.
inline Matrix taylor_exp(const Matrix& m) {
  int squarings = 0;
  double norm = m.cwiseAbs().sum();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const Matrix a = m / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline double diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testutil
