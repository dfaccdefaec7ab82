#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "citeimb/corpus.hpp"
#include "citeimb/refmodels.hpp"

namespace citeimb {

enum class Metric { Citations, PageRank };

std::string_view to_string(Metric m);

struct PageRankOptions {
  double alpha = 0.85;
  double tolerance = 1e-6;  // on the mean absolute update
  int max_iterations = 100;
};

struct RankingResult {
  Metric metric = Metric::Citations;
  std::string source = "observed";  // observed, rd, hd, pd
  Eigen::VectorXd raw;
  Eigen::VectorXd normalized;
  double alpha = 0;
  int iterations_used = 0;
  bool converged = true;
  double residual = 0;  // mean absolute update of the last iteration
};

/// Divides each score by the mean score of papers sharing its publication
/// year and subfield. Strata with a zero mean map to 0 and emit a warning.
Eigen::VectorXd normalized_scores(const Eigen::VectorXd& raw, const CitationNetwork& net);

/// PageRank with teleportation proportional to in-citations, starting from
/// c / M. Papers that cite nothing teleport.
RankingResult pagerank_observed(const CitationNetwork& net, const PageRankOptions& opts = {});

/// PageRank on a reference model: a citer i moves to j with probability
/// w_ij / k_i and teleportation follows c_bar / M. Applied group by group.
RankingResult pagerank_reference(const ExpectedCitations<double>& ec, const CitationNetwork& net,
                                 const PageRankOptions& opts = {});

RankingResult citation_ranking(const CitationNetwork& net);
RankingResult citation_ranking(const ExpectedCitations<double>& ec, const CitationNetwork& net);

/// Positions sorted by descending score, ties by ascending paper id.
std::vector<NodeIndex> ranking_order(const Eigen::VectorXd& scores, const CitationNetwork& net);

/// Number of papers in the top d percent: ceil(d * N / 100).
std::size_t top_count(double d_percent, std::size_t n);

/// Fraction of papers with a woman first or last author among the top d%.
double top_share(const Eigen::VectorXd& scores, const CitationNetwork& net, double d_percent);

struct ShareSource {
  std::string label;                              // "observed", "rd", ...
  const ExpectedCitations<double>* model = nullptr;  // null for observed
};

struct SharePoint {
  double d = 0;
  std::string source;
  Metric metric = Metric::Citations;
  double share = 0;
};

std::vector<SharePoint> share_curve(const CitationNetwork& net, Metric metric,
                                    std::span<const ShareSource> sources,
                                    std::span<const double> d_grid,
                                    const PageRankOptions& opts = {});

RankingResult rank(const CitationNetwork& net, Metric metric, const ShareSource& source,
                   const PageRankOptions& opts = {});

void write_ranking_csv(std::ostream& out, const RankingResult& r, const CitationNetwork& net);
void write_share_curve_csv(std::ostream& out, std::span<const SharePoint> points);

}  // namespace citeimb
