#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nullcone {

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
/// Returns w such that  sum_i w[i] f(x[i]) ~ f^(order)(x0),  exact for
/// polynomials of degree < x.size().
std::vector<double> fd_weights(double x0, const std::vector<double>& x, int order);

/// Chebyshev series proxy of a smooth function on [a, b].
///
/// Built by sampling at Chebyshev points and degree-doubling until the
/// coefficient tail drops below a relative tolerance, so evaluations are
/// accurate to ~machine precision for analytic integrands. Supports
/// termwise antidifferentiation, which is how the Kruskal chart integrates
/// its regularized horizon function.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double a, double b, std::vector<double> coeffs);

  /// Adaptive fit. Throws DomainError if max_degree is reached without the
  /// tail converging (non-smooth input).
  static ChebyshevSeries fit(const std::function<double(double)>& f, double a, double b,
                             double rel_tol = 1e-15, int max_degree = 1 << 14);

  double operator()(double x) const;

  /// Antiderivative F with F(x0) = 0.
  ChebyshevSeries antiderivative(double x0) const;

  double a() const { return a_; }
  double b() const { return b_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  double a_ = -1.0, b_ = 1.0;
  std::vector<double> coeffs_;  // f(x) = sum_k c_k T_k(s(x)), s affine [a,b] -> [-1,1]
};

/// Simple deterministic 64-bit FNV-1a hash (artifact fingerprinting).
unsigned long long fnv1a64(const std::string& bytes);

}  // namespace nullcone
