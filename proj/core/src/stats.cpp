#include "petbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace petbench {

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::uint64_t> u_distribution(std::size_t n, std::size_t m) {
  // f[a][b][u]: arrangements of a first-sample and b second-sample items.
  // The largest item either belongs to the first sample (beating all b) or not.
  std::vector<std::vector<std::vector<std::uint64_t>>> f(n + 1, std::vector<std::vector<std::uint64_t>>(m + 1));
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= m; ++b) {
      auto& cur = f[a][b];
      cur.assign(a * b + 1, 0);
      if (a == 0 || b == 0) {
        cur[0] = 1;
        continue;
      }
      const auto& first = f[a - 1][b];
      for (std::size_t u = 0; u < first.size(); ++u) cur[u + b] += first[u];
      const auto& second = f[a][b - 1];
      for (std::size_t u = 0; u < second.size(); ++u) cur[u] += second[u];
    }
  }
  return f[n][m];
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney U needs two non-empty samples");
  for (double v : a) if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample value");
  for (double v : b) if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample value");

  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto ranks = midranks(all);
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double big_n = n + m;
  const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

  UTestResult r;
  r.alternative = alternative;
  r.u_statistic = rank_sum - n * (n + 1.0) / 2.0;

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  if (tie_term == 0.0 && all.size() <= kExactUTestLimit) {
    r.method = UTestMethod::exact;
    const auto counts = u_distribution(a.size(), b.size());
    const auto u = static_cast<std::size_t>(std::llround(r.u_statistic));
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0, [](double s, std::uint64_t c) { return s + static_cast<double>(c); });
    double tail = 0.0;
    if (alternative == Alternative::greater) {
      for (std::size_t k = u; k < counts.size(); ++k) tail += static_cast<double>(counts[k]);
    } else {
      for (std::size_t k = 0; k <= u && k < counts.size(); ++k) tail += static_cast<double>(counts[k]);
    }
    r.p_value = tail / total;
    return r;
  }

  r.method = UTestMethod::normal_approx;
  const double mu = n * m / 2.0;
  const double var = n * m / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double sigma = std::sqrt(var);
  double p = 0.0;
  if (alternative == Alternative::greater) {
    const double z = (r.u_statistic - mu - 0.5) / sigma;
    p = 0.5 * std::erfc(z / std::sqrt(2.0));
  } else {
    const double z = (r.u_statistic - mu + 0.5) / sigma;
    p = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

std::string_view to_string(Alternative a) { return a == Alternative::greater ? "greater" : "less"; }
std::string_view to_string(UTestMethod m) { return m == UTestMethod::exact ? "exact" : "normal"; }

}  // namespace petbench
