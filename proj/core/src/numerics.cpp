#include "nullcone/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nullcone/errors.hpp"

namespace nullcone {

std::vector<double> fd_weights(double x0, const std::vector<double>& x, int order) {
  const int n = static_cast<int>(x.size());
  if (order < 0) throw InvalidArgument("fd_weights: negative derivative order");
  if (n < order + 1) throw InvalidArgument("fd_weights: need at least order+1 nodes");

  // Fornberg's recursion; C[i][k] is the weight of node i for the k-th
  // derivative using the nodes seen so far.
  const int m = order;
  std::vector<std::vector<double>> C(n, std::vector<double>(m + 1, 0.0));
  C[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0], c5 = 0.0;
  c4 -= x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      if (c3 == 0.0) throw InvalidArgument("fd_weights: repeated node");
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
        C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
      C[j][0] = c4 * C[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = C[i][m];
  return w;
}

//============================================================================
// ChebyshevSeries
//============================================================================

ChebyshevSeries::ChebyshevSeries(double a, double b, std::vector<double> coeffs)
    : a_(a), b_(b), coeffs_(std::move(coeffs)) {
  if (!(a < b)) throw InvalidArgument("ChebyshevSeries: need a < b");
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

namespace {

// Coefficients from samples at the N+1 Chebyshev--Lobatto points
// x_j = cos(pi j / N), computed in long double:
//   c_k = (2/N) sum''_j f_j cos(pi j k / N)    (0 < k < N)
// with the k = 0 and k = N coefficients halved; sum'' halves the j = 0 and
// j = N terms. Convention here: f = sum_k c_k T_k with a *full* c_0.
std::vector<long double> lobatto_coeffs(const std::vector<long double>& f) {
  const int N = static_cast<int>(f.size()) - 1;
  std::vector<long double> ctab(2 * N);
  for (int r = 0; r < 2 * N; ++r)
    ctab[r] = std::cos(std::numbers::pi_v<long double> * r / N);
  std::vector<long double> c(N + 1);
  for (int k = 0; k <= N; ++k) {
    long double acc = 0.5L * (f[0] + (k % 2 == 0 ? f[N] : -f[N]));
    for (int j = 1; j < N; ++j)
      acc += f[j] * ctab[static_cast<long long>(j) * k % (2 * N)];
    c[k] = acc * 2.0L / N;
  }
  c[0] *= 0.5L;
  c[N] *= 0.5L;
  return c;
}

}  // namespace

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol, int max_degree) {
  if (!(a < b)) throw InvalidArgument("ChebyshevSeries::fit: need a < b");
  const long double mid = 0.5L * (static_cast<long double>(a) + b);
  const long double half = 0.5L * (static_cast<long double>(b) - a);

  // Degree-doubling on nested Lobatto grids: samples at level N are reused
  // at level 2N (cos(pi j / N) = cos(pi 2j / 2N)).
  int N = 16;
  std::vector<long double> vals(N + 1);
  auto sample = [&](int j, int n) {
    const long double s = std::cos(std::numbers::pi_v<long double> * j / n);
    const double v = f(static_cast<double>(mid + half * s));
    if (!std::isfinite(v)) throw DomainError("ChebyshevSeries::fit: non-finite sample");
    return static_cast<long double>(v);
  };
  for (int j = 0; j <= N; ++j) vals[j] = sample(j, N);

  for (;;) {
    const std::vector<long double> c = lobatto_coeffs(vals);
    long double scale = 0.0L;
    for (const long double ck : c) scale = std::max(scale, std::abs(ck));
    const long double cut = scale * static_cast<long double>(rel_tol);
    // Converged when the top eighth of the spectrum sits below the cut.
    bool converged = scale == 0.0L;
    if (!converged) {
      converged = true;
      for (int k = N - std::max(2, N / 8) + 1; k <= N; ++k)
        if (std::abs(c[k]) > cut) {
          converged = false;
          break;
        }
    }
    if (converged) {
      int last = N;
      while (last > 0 && std::abs(c[last]) <= cut) --last;
      std::vector<double> out(last + 1);
      for (int k = 0; k <= last; ++k) out[k] = static_cast<double>(c[k]);
      return ChebyshevSeries(a, b, std::move(out));
    }
    if (2 * N > max_degree)
      throw DomainError("ChebyshevSeries::fit: no spectral convergence by max_degree");
    std::vector<long double> next(2 * N + 1);
    for (int j = 0; j <= N; ++j) next[2 * j] = vals[j];
    for (int j = 1; j <= 2 * N; j += 2) next[j] = sample(j, 2 * N);
    vals = std::move(next);
    N *= 2;
  }
}

double ChebyshevSeries::operator()(double x) const {
  // Clenshaw recurrence on s in [-1, 1].
  const double s = (2.0 * x - (a_ + b_)) / (b_ - a_);
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k) {
    const double t = 2.0 * s * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = t;
  }
  return s * b1 - b2 + coeffs_[0];
}

ChebyshevSeries ChebyshevSeries::antiderivative(double x0) const {
  // Termwise: int T_0 = T_1, int T_1 = T_2/4, int T_k = T_{k+1}/(2(k+1)) -
  // T_{k-1}/(2(k-1)); then rescale by dx/ds = (b-a)/2 and fix F(x0) = 0.
  const int n = static_cast<int>(coeffs_.size()) - 1;
  auto c = [&](int k) { return (k >= 0 && k <= n) ? coeffs_[k] : 0.0; };
  std::vector<double> C(n + 2, 0.0);
  const double half = 0.5 * (b_ - a_);
  C[1] = (c(0) - 0.5 * c(2)) * half;
  for (int K = 2; K <= n + 1; ++K) C[K] = (c(K - 1) - c(K + 1)) / (2.0 * K) * half;
  ChebyshevSeries F(a_, b_, std::move(C));
  F.coeffs_[0] -= F(x0);
  return F;
}

unsigned long long fnv1a64(const std::string& bytes) {
  unsigned long long h = 14695981039346656037ULL;
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace nullcone
