#pragma once

// Small dense complex matrices for the gauge group G = SU(N) and its Lie
// algebra su(N). Rank N is a runtime value bounded by kMaxRank; storage is
// inline so none of these types allocate.

#include <Eigen/Dense>

#include <complex>

namespace levyflow {

using Complex = std::complex<double>;

inline constexpr int kMaxRank = 4;

using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::ColMajor, kMaxRank, kMaxRank>;

/// A general linear map between fibers (d_X U, Delta_L U, kernel values ...).
using FiberMap = Matrix;

Matrix identity_matrix(int n);
Matrix zero_matrix(int n);

/// max_ij |m_ij|
double max_abs(const Matrix& m);

/// An anti-Hermitian traceless N x N matrix.
class LieElem {
 public:
  LieElem() = default;
  explicit LieElem(int n) : m_(zero_matrix(n)) {}

  /// Wraps `m` after checking anti-Hermiticity and tracelessness to `tol`.
  /// Throws DomainError otherwise.
  static LieElem from_matrix(const Matrix& m, double tol = 1e-12);

  /// Wraps without checking. Callers guarantee the invariants.
  static LieElem unchecked(Matrix m) {
    LieElem x;
    x.m_ = std::move(m);
    return x;
  }

  const Matrix& matrix() const { return m_; }
  int rank() const { return static_cast<int>(m_.rows()); }

  LieElem& operator+=(const LieElem& o);
  LieElem& operator-=(const LieElem& o);
  LieElem& operator*=(double c) {
    m_ *= c;
    return *this;
  }

  friend LieElem operator+(LieElem a, const LieElem& b) { return a += b; }
  friend LieElem operator-(LieElem a, const LieElem& b) { return a -= b; }
  friend LieElem operator*(double c, LieElem a) { return a *= c; }
  friend LieElem operator*(LieElem a, double c) { return a *= c; }
  LieElem operator-() const { return unchecked(-m_); }

 private:
  Matrix m_;
};

/// A special unitary N x N matrix.
class GroupElem {
 public:
  GroupElem() = default;

  static GroupElem identity(int n) { return unchecked(identity_matrix(n)); }

  /// Checks unitarity and det = 1 to `tol`; throws DomainError otherwise.
  static GroupElem from_matrix(const Matrix& m, double tol = 1e-10);

  static GroupElem unchecked(Matrix m) {
    GroupElem g;
    g.m_ = std::move(m);
    return g;
  }

  const Matrix& matrix() const { return m_; }
  int rank() const { return static_cast<int>(m_.rows()); }

  GroupElem inverse() const { return unchecked(m_.adjoint()); }

  friend GroupElem operator*(const GroupElem& a, const GroupElem& b);

 private:
  Matrix m_;
};

/// XY - YX. Throws DomainError on rank mismatch.
LieElem commutator(const LieElem& x, const LieElem& y);

/// exp(X) as a group element. N = 2 uses the closed form, N > 2 Pade
/// scaling-and-squaring.
GroupElem expm(const LieElem& x);

/// exp(M) for an arbitrary square matrix (used by the propagator for general
/// generators). Same dispatch as expm.
Matrix exp_matrix(const Matrix& m);

/// -Re tr(Phi Psi). Equals the Hilbert-Schmidt product for anti-Hermitian
/// arguments.
double fiber_metric(const Matrix& phi, const Matrix& psi);

/// Nearest anti-Hermitian traceless matrix: (M - M^dagger)/2 minus its trace.
LieElem project_lie(const Matrix& m);

/// Nearest special unitary matrix (polar factor, then det phase removed).
/// Intended for small drift, e.g. after Richardson extrapolation.
Matrix project_special_unitary(const Matrix& m);

/// || U^dagger U - I ||_max
double unitarity_residual(const Matrix& u);

/// Pauli matrix sigma_a, a in {1,2,3}.
Matrix pauli(int a);

/// The su(2) element sum_a c_a * i sigma_a.
LieElem su2(double c1, double c2, double c3);

/// Embeds the su(2) element i sigma_3 * c in rank n along the (0,1) block.
LieElem diagonal_generator(int n, double c);

}  // namespace levyflow
