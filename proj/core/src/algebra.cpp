#include "levyflow/algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

void require_same_rank(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError(std::string(op) + ": rank mismatch (" +
                      std::to_string(a.rows()) + " vs " +
                      std::to_string(b.rows()) + ")");
  }
}

// exp of a general 2x2 matrix via the Cayley-Hamilton closed form
//   e^X = e^tau (cosh(q) I + sinh(q)/q (X - tau I)),
// tau = tr X / 2, q^2 = -det(X - tau I).
Matrix exp2(const Matrix& x) {
  const Complex tau = 0.5 * (x(0, 0) + x(1, 1));
  const Complex alpha = x(0, 0) - tau;
  const Complex q2 = alpha * alpha + x(0, 1) * x(1, 0);
  const Complex q = std::sqrt(q2);
  Complex ch;
  Complex sh_over_q;
  if (std::abs(q) < 1e-4) {
    // Taylor series, accurate to ~1e-20 in this range.
    ch = 1.0 + q2 / 2.0 + q2 * q2 / 24.0 + q2 * q2 * q2 / 720.0;
    sh_over_q = 1.0 + q2 / 6.0 + q2 * q2 / 120.0 + q2 * q2 * q2 / 5040.0;
  } else {
    ch = std::cosh(q);
    sh_over_q = std::sinh(q) / q;
  }
  const Complex scale = std::exp(tau);
  Matrix r(2, 2);
  r(0, 0) = scale * (ch + sh_over_q * alpha);
  r(1, 1) = scale * (ch - sh_over_q * alpha);
  r(0, 1) = scale * sh_over_q * x(0, 1);
  r(1, 0) = scale * sh_over_q * x(1, 0);
  return r;
}

}  // namespace

Matrix identity_matrix(int n) { return Matrix::Identity(n, n); }
Matrix zero_matrix(int n) { return Matrix::Zero(n, n); }

double max_abs(const Matrix& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  }
  return r;
}

LieElem LieElem::from_matrix(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxRank) {
    throw DomainError("LieElem: matrix must be square with rank in [1, " +
                      std::to_string(kMaxRank) + "]");
  }
  const Matrix herm = m + m.adjoint();
  if (max_abs(herm) > 2.0 * tol) {
    throw DomainError("LieElem: matrix is not anti-Hermitian");
  }
  if (std::abs(m.trace()) > tol) {
    throw DomainError("LieElem: matrix is not traceless");
  }
  return unchecked(m);
}

LieElem& LieElem::operator+=(const LieElem& o) {
  if (m_.size() == 0) {
    m_ = o.m_;
    return *this;
  }
  require_same_rank(m_, o.m_, "LieElem::operator+=");
  m_ += o.m_;
  return *this;
}

LieElem& LieElem::operator-=(const LieElem& o) {
  if (m_.size() == 0) {
    m_ = -o.m_;
    return *this;
  }
  require_same_rank(m_, o.m_, "LieElem::operator-=");
  m_ -= o.m_;
  return *this;
}

GroupElem GroupElem::from_matrix(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxRank) {
    throw DomainError("GroupElem: matrix must be square with rank in [1, " +
                      std::to_string(kMaxRank) + "]");
  }
  if (unitarity_residual(m) > tol) throw DomainError("GroupElem: matrix is not unitary");
  if (std::abs(m.determinant() - 1.0) > tol) {
    throw DomainError("GroupElem: determinant differs from 1");
  }
  return unchecked(m);
}

GroupElem operator*(const GroupElem& a, const GroupElem& b) {
  require_same_rank(a.m_, b.m_, "GroupElem::operator*");
  return GroupElem::unchecked(a.m_ * b.m_);
}

LieElem commutator(const LieElem& x, const LieElem& y) {
  require_same_rank(x.matrix(), y.matrix(), "commutator");
  return LieElem::unchecked(x.matrix() * y.matrix() - y.matrix() * x.matrix());
}

Matrix exp_matrix(const Matrix& m) {
  if (m.rows() == 1) {
    Matrix r(1, 1);
    r(0, 0) = std::exp(m(0, 0));
    return r;
  }
  if (m.rows() == 2) return exp2(m);
  const Eigen::MatrixXcd dyn = m;
  const Eigen::MatrixXcd e = dyn.exp();
  return e;
}

GroupElem expm(const LieElem& x) { return GroupElem::unchecked(exp_matrix(x.matrix())); }

double fiber_metric(const Matrix& phi, const Matrix& psi) {
  require_same_rank(phi, psi, "fiber_metric");
  // tr(Phi Psi) without forming the product.
  Complex tr = 0.0;
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index k = 0; k < phi.cols(); ++k) tr += phi(i, k) * psi(k, i);
  }
  return -tr.real();
}

LieElem project_lie(const Matrix& m) {
  Matrix a = 0.5 * (m - m.adjoint());
  const Complex t = a.trace() / static_cast<double>(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, i) -= t;
  return LieElem::unchecked(std::move(a));
}

Matrix project_special_unitary(const Matrix& m) {
  Matrix x = m;
  // Newton iteration for the polar factor; quadratic convergence from a
  // nearly unitary start.
  for (int it = 0; it < 3; ++it) {
    const Matrix inv_h = x.inverse().adjoint();
    x = 0.5 * (x + inv_h);
  }
  const Complex det = x.determinant();
  const double phase = std::arg(det) / static_cast<double>(x.rows());
  x *= std::polar(1.0, -phase);
  return x;
}

double unitarity_residual(const Matrix& u) {
  return max_abs(u.adjoint() * u - identity_matrix(static_cast<int>(u.rows())));
}

Matrix pauli(int a) {
  Matrix s = zero_matrix(2);
  const Complex i(0.0, 1.0);
  switch (a) {
    case 1:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case 2:
      s(0, 1) = -i;
      s(1, 0) = i;
      break;
    case 3:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
    default:
      throw DomainError("pauli: index must be 1, 2 or 3");
  }
  return s;
}

LieElem su2(double c1, double c2, double c3) {
  const Complex i(0.0, 1.0);
  return LieElem::unchecked(i * (c1 * pauli(1) + c2 * pauli(2) + c3 * pauli(3)));
}

LieElem diagonal_generator(int n, double c) {
  if (n < 2 || n > kMaxRank) throw DomainError("diagonal_generator: rank out of range");
  Matrix m = zero_matrix(n);
  m(0, 0) = Complex(0.0, c);
  m(1, 1) = Complex(0.0, -c);
  return LieElem::unchecked(std::move(m));
}

}  // namespace levyflow
