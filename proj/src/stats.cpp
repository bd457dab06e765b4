#include "dcb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dcb/error.hpp"

namespace dcb {

namespace {

using Matrix = std::vector<double>;  // row-major m x m

void multiply(const Matrix& a, const Matrix& b, Matrix& out, int m) {
  out.assign(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const double aik = a[static_cast<std::size_t>(i * m + k)];
      if (aik == 0.0) continue;
      for (int j = 0; j < m; ++j)
        out[static_cast<std::size_t>(i * m + j)] += aik * b[static_cast<std::size_t>(k * m + j)];
    }
}

// Matrix power with a base-10 exponent kept aside to avoid underflow.
void power(const Matrix& a, int ea, Matrix& v, int& ev, int m, int n) {
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  power(a, ea, v, ev, m, n / 2);
  Matrix b;
  multiply(v, v, b, m);
  int eb = 2 * ev;
  if (n % 2 == 0) {
    v = b;
    ev = eb;
  } else {
    multiply(a, b, v, m);
    ev = ea + eb;
  }
  if (v[static_cast<std::size_t>((m / 2) * m + m / 2)] > 1e140) {
    for (auto& x : v) x *= 1e-140;
    ev += 140;
  }
}

}  // namespace

double kolmogorov_cdf(int n, double d) {
  if (n < 1) throw Error(ErrorKind::InsufficientData, "Kolmogorov distribution needs n >= 1");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double s = d * d * n;
  if (s > 7.24 || (s > 3.76 && n > 99))
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(n) + 1.409 / n) * s);

  const int k = static_cast<int>(n * d) + 1;
  const int m = 2 * k - 1;
  const double h = k - n * d;
  Matrix H(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) H[static_cast<std::size_t>(i * m + j)] = (i - j + 1 < 0) ? 0.0 : 1.0;
  for (int i = 0; i < m; ++i) {
    H[static_cast<std::size_t>(i * m)] -= std::pow(h, i + 1);
    H[static_cast<std::size_t>((m - 1) * m + i)] -= std::pow(h, m - i);
  }
  H[static_cast<std::size_t>((m - 1) * m)] += (2 * h - 1 > 0 ? std::pow(2 * h - 1, m) : 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g) H[static_cast<std::size_t>(i * m + j)] /= g;

  Matrix Q;
  int eq = 0;
  power(H, 0, Q, eq, m, n);
  double r = Q[static_cast<std::size_t>((k - 1) * m + k - 1)];
  for (int i = 1; i <= n; ++i) {
    r = r * i / n;
    if (r < 1e-140) {
      r *= 1e140;
      eq -= 140;
    }
  }
  return r * std::pow(10.0, eq);
}

double normal_cdf(double x, double mean, double std) {
  return 0.5 * std::erfc(-(x - mean) / (std * std::sqrt(2.0)));
}

double ks_statistic_normal(std::span<const double> values, double mean, double std) {
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i], mean, std);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

AggregateStats aggregate(std::span<const double> values) {
  if (values.size() < 2)
    throw Error(ErrorKind::InsufficientData, "aggregation needs at least two runs");
  AggregateStats st;
  st.n = values.size();
  const double n = static_cast<double>(st.n);
  st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - st.mean) * (v - st.mean);
  st.std = std::sqrt(ss / (n - 1.0));

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = st.n / 2;
  st.median = st.n % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  if (st.std > 0.0) {
    st.ks_statistic = ks_statistic_normal(values, st.mean, st.std);
    st.ks_p_value = std::clamp(1.0 - kolmogorov_cdf(static_cast<int>(st.n), *st.ks_statistic), 0.0, 1.0);
  }
  return st;
}

}  // namespace dcb
