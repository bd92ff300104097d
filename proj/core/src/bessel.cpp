#include "qnetsim/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace qnetsim {

namespace {

double bessel_series(int k, double x) {
  // J_k(x) = sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)
  const double h = x / 2.0;
  double term = 1.0;
  for (int i = 1; i <= k; ++i) term *= h / i;
  double sum = term;
  const double h2 = h * h;
  for (int m = 1; m < 200; ++m) {
    term *= -h2 / (m * (m + k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double bessel_miller(int k, double x) {
  // Downward recurrence from well above both k and x, normalized with
  // J_0 + 2 sum_{m>=1} J_{2m} = 1.
  const int start = 2 * ((std::max(k, static_cast<int>(x)) + 20 +
                          static_cast<int>(std::sqrt(40.0 * std::max(1, k)))) /
                         2);
  double jp = 0.0;        // J_{n+1}
  double jc = 1e-30;      // J_n (arbitrary scale)
  double norm = 0.0;
  double result = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm = (2.0 * n / x) * jc - jp;  // J_{n-1}
    jp = jc;
    jc = jm;
    if (n - 1 == k) result = jc;
    if ((n - 1) % 2 == 0) norm += (n - 1 == 0) ? jc : 2.0 * jc;
    // Rescale to dodge overflow.
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
  }
  return result / norm;
}

}  // namespace

double bessel_j(int order, double x) {
  int k = order;
  double sign = 1.0;
  if (k < 0) {
    k = -k;
    if (k % 2 == 1) sign = -sign;  // J_{-k} = (-1)^k J_k
  }
  if (x < 0) {
    x = -x;
    if (k % 2 == 1) sign = -sign;
  }
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  if (x < 2.0 || x < 0.5 * k) return sign * bessel_series(k, x);
  return sign * bessel_miller(k, x);
}

}  // namespace qnetsim
