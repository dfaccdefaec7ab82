#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "citeimb/corpus.hpp"
#include "citeimb/refmodels.hpp"

namespace citeimb {

/// Citation counts between attribute categories: entry (a, b) is the number
/// of citations from papers in category a to papers in category b.
struct CategoryPairMatrix {
  Attribute attribute;
  std::vector<std::string> labels;  // sorted
  Eigen::MatrixXd observed;
  Eigen::MatrixXd expected;
};

/// Fraction of papers with at least x citations, x = 0, 1, ..., max.
struct SurvivalCurve {
  Eigen::VectorXd observed;
  Eigen::VectorXd expected;
};

struct StructuralReport {
  Model model = Model::RD;
  Eigen::VectorXd out_observed;  // k_i
  Eigen::VectorXd out_expected;  // sum_j w_ij
  std::vector<CategoryPairMatrix> category_pairs;
  SurvivalCurve in_citations;
  std::array<SurvivalCurve, 4> in_citations_by_gender;
  double ks_distance = 0;  // sup over thresholds of |S_obs - S_exp|
};

/// Expected counts within this distance below an integer threshold count as
/// reaching it.
inline constexpr double kSurvivalSlack = 1e-9;

SurvivalCurve survival_curve(const Eigen::VectorXd& observed, const Eigen::VectorXd& expected);
double ks_distance(const SurvivalCurve& curve);

CategoryPairMatrix category_pair_matrix(const CitationNetwork& net,
                                        const ExpectedCitations<double>& ec, Attribute a);

StructuralReport structural_report(const CitationNetwork& net,
                                   const ExpectedCitations<double>& ec);

/// Writes plot-ready CSV tables into `dir`.
void write_structural_report(const StructuralReport& report, const std::filesystem::path& dir);

}  // namespace citeimb
