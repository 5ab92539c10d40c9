#pragma once

#include <array>
#include <span>
#include <vector>

namespace levyflow {

inline constexpr int kGaussOrder = 8;

/// Composite Gauss-Legendre rule on [a, b] with kGaussOrder nodes per panel.
/// Panels never straddle a breakpoint, so piecewise-smooth integrands (e.g.
/// along a stopped or concatenated curve) keep full order.
class QuadratureGrid {
 public:
  /// About `panels` panels in total, distributed over the sub-intervals cut
  /// by `breaks` in proportion to their length (at least one each).
  static QuadratureGrid composite(int panels, std::span<const double> breaks = {},
                                  double a = 0.0, double b = 1.0);

  int size() const { return static_cast<int>(nodes_.size()); }
  int num_panels() const { return static_cast<int>(panel_lo_.size()); }
  double lower() const { return a_; }
  double upper() const { return b_; }

  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  int panel_of(int i) const { return i / kGaussOrder; }
  double panel_lower(int p) const { return panel_lo_[static_cast<std::size_t>(p)]; }
  double panel_upper(int p) const { return panel_hi_[static_cast<std::size_t>(p)]; }

  /// cumulative_weight(i, j): weight of node j (same panel as i) in the rule
  /// for  integral from panel_lower(panel_of(i)) to node(i). Exact for
  /// polynomials of degree < kGaussOrder on the panel.
  double cumulative_weight(int i, int j) const;

  /// Running integral of node values: out[i] ~ integral from a to node(i).
  /// T must support T + T and double * T.
  template <typename T>
  std::vector<T> cumulative(const std::vector<T>& values, const T& zero) const;

  /// integral from a to x of the panel-wise interpolant of node values.
  template <typename T>
  T integral_to(const std::vector<T>& values, double x, const T& zero) const;

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> panel_lo_;
  std::vector<double> panel_hi_;
};

/// Reference Gauss-Legendre nodes and weights on [-1, 1].
const std::array<double, kGaussOrder>& gauss_nodes();
const std::array<double, kGaussOrder>& gauss_weights();
/// S[i][j] = integral_{-1}^{x_i} l_j(x) dx for the Lagrange basis l_j.
const std::array<std::array<double, kGaussOrder>, kGaussOrder>& gauss_cumulative_matrix();
/// integral_{-1}^{xi} l_j(x) dx for each Lagrange basis polynomial l_j.
std::array<double, kGaussOrder> gauss_partial_weights(double xi);

template <typename T>
std::vector<T> QuadratureGrid::cumulative(const std::vector<T>& values, const T& zero) const {
  std::vector<T> out(values.size(), zero);
  T before = zero;
  for (int p = 0; p < num_panels(); ++p) {
    const int base = p * kGaussOrder;
    const double half = 0.5 * (panel_upper(p) - panel_lower(p));
    const auto& s = gauss_cumulative_matrix();
    for (int i = 0; i < kGaussOrder; ++i) {
      T acc = before;
      for (int j = 0; j < kGaussOrder; ++j) {
        acc = acc + (half * s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                        values[static_cast<std::size_t>(base + j)];
      }
      out[static_cast<std::size_t>(base + i)] = acc;
    }
    for (int j = 0; j < kGaussOrder; ++j) {
      before = before + weight(base + j) * values[static_cast<std::size_t>(base + j)];
    }
  }
  return out;
}

template <typename T>
T QuadratureGrid::integral_to(const std::vector<T>& values, double x, const T& zero) const {
  T acc = zero;
  for (int p = 0; p < num_panels(); ++p) {
    const int base = p * kGaussOrder;
    const double lo = panel_lower(p);
    const double hi = panel_upper(p);
    if (x <= lo) break;
    if (x >= hi) {
      for (int j = 0; j < kGaussOrder; ++j) {
        acc = acc + weight(base + j) * values[static_cast<std::size_t>(base + j)];
      }
      continue;
    }
    const double half = 0.5 * (hi - lo);
    const auto w = gauss_partial_weights((x - lo) / half - 1.0);
    for (int j = 0; j < kGaussOrder; ++j) {
      acc = acc + (half * w[static_cast<std::size_t>(j)]) *
                      values[static_cast<std::size_t>(base + j)];
    }
    break;
  }
  return acc;
}

}  // namespace levyflow
