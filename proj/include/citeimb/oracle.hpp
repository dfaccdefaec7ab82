#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "citeimb/corpus.hpp"
#include "citeimb/refmodels.hpp"

namespace citeimb {

/// Empirical citation counts from literally simulating a model's draws.
///
/// RD redraws each of i's k_i citations uniformly from i's candidate set;
/// HD redraws each observed citation uniformly within the cited paper's
/// category; PD replays the papers in date order and restricts HD candidates
/// to those whose *realized* in-degree so far equals the cited paper's.
/// Candidate sets are recomputed here by brute force, independently of
/// EligibilityIndex.
struct OracleResult {
  long samples = 0;
  Eigen::MatrixXd mean;  // per-sample mean citations i -> j
  Eigen::MatrixXd se;    // standard error of `mean`
  Eigen::VectorXd in_mean;
  Eigen::VectorXd in_se;
};

inline constexpr NodeIndex kOracleMaxPapers = 200;

/// Throws std::invalid_argument for networks above kOracleMaxPapers.
OracleResult monte_carlo_oracle(const CitationNetwork& net, Model model, AttributeSet attrs,
                                long samples, std::uint64_t seed, int threads = 1);

struct OracleAgreement {
  long checked = 0;
  long violations = 0;
  double max_z = 0;  // largest |empirical - analytic| / se over entries with se > 0
  std::vector<std::pair<Eigen::Index, Eigen::Index>> flagged;  // (row, col) of each violation
};

/// Compares every entry; an entry with zero standard error must match exactly.
OracleAgreement compare_to_oracle(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& se,
                                  const Eigen::MatrixXd& analytic, double z);

}  // namespace citeimb
