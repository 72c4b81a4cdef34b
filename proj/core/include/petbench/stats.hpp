#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace petbench {

enum class Alternative { greater, less };
enum class UTestMethod { exact, normal_approx };

struct UTestResult {
  double u_statistic = 0.0;  ///< U of the first sample: pairs (a > b) plus half the ties
  double p_value = 1.0;
  Alternative alternative = Alternative::greater;
  UTestMethod method = UTestMethod::exact;
  friend bool operator==(const UTestResult&, const UTestResult&) = default;
};

/// Largest combined size handled by exact enumeration (tie-free only).
inline constexpr std::size_t kExactUTestLimit = 16;

/// One-sided Mann-Whitney U test. `greater` tests whether `a` tends to exceed
/// `b`: p = P(U >= u_obs) under the null; `less` uses P(U <= u_obs).
/// Exact null distribution for tie-free samples with |a| + |b| <= 16,
/// otherwise a normal approximation with tie and continuity correction.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative);

/// Midranks (1-based) of the concatenation a ++ b.
std::vector<double> midranks(std::span<const double> values);

/// Number of arrangements of n first-sample and m second-sample items with U = u, for u = 0..n*m.
std::vector<std::uint64_t> u_distribution(std::size_t n, std::size_t m);

std::string_view to_string(Alternative a);
std::string_view to_string(UTestMethod m);

}  // namespace petbench
