#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// None of them share code paths with the library beyond the data types.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "petbench/anonymizer.hpp"
#include "petbench/dataset.hpp"
#include "petbench/rng.hpp"

namespace oracle {

struct Instance {
  petbench::Dataset data;
  petbench::AnonymizationConfig config;
};

/// Random table with up to `max_qis` categorical quasi-identifiers, a
/// pass-through column and a binary target, plus random coarsening ladders.
Instance random_instance(petbench::Rng& rng, std::size_t max_rows, std::size_t max_qis, std::size_t max_depth);

struct LatticeOptimum {
  bool feasible = false;
  std::uint64_t num = 0;  ///< sum of level/depth as num/den
  std::uint64_t den = 1;
  std::size_t suppressed = 0;
  std::vector<std::size_t> levels;
};

/// Enumerates every node and returns the lexicographic minimum of
/// (sum level/depth, suppressed rows, levels) among nodes within the limit.
LatticeOptimum exhaustive_optimum(const petbench::Dataset& d, const petbench::AnonymizationConfig& c);

/// Empty string when `s` is a valid k-anonymous recoding of `d`, else the reason.
std::string verify_solution(const petbench::Dataset& d, const petbench::AnonymizationConfig& c,
                            const petbench::AnonymizationSolution& s);

/// P(U >= u_obs) (greater) or P(U <= u_obs) (less) by listing all C(n+m, n) labelings.
double brute_force_u_pvalue(std::span<const double> a, std::span<const double> b, bool greater);
double u_statistic(std::span<const double> a, std::span<const double> b);

/// Central differences with step eps.
Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 double eps = 1e-5);

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor).
double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric, double floor = 1e-6);

/// Smallest |pre-activation| over every hidden ReLU unit and row of x, for a
/// network whose flattened parameters list each layer's weights (outputs x
/// inputs, row-major) followed by its biases. Central differences are only
/// meaningful when this exceeds the step size.
double relu_margin(const Eigen::MatrixXd& x, const std::vector<std::size_t>& hidden, const Eigen::VectorXd& params);

/// Total variation distance between two empirical distributions of strings.
double total_variation(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace oracle
