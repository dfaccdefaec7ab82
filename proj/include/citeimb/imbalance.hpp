#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citeimb/corpus.hpp"
#include "citeimb/refmodels.hpp"

namespace citeimb {

/// A named predicate over papers, e.g. "all" or "gender=WW".
struct PaperFilter {
  std::string description = "all";
  std::function<bool(const Paper&)> test = [](const Paper&) { return true; };

  bool operator()(const Paper& p) const { return test(p); }

  static PaperFilter all() { return {}; }
  /// `all`, or `key=value[,value...]` with key in gender, rank, country,
  /// topic, subfield.
  static PaperFilter parse(std::string_view text);
};

/// Per known gender category, indexed like `kKnownCategories`.
template <class T>
using PerGender = std::array<T, 4>;

struct ObservedCounts {
  PerGender<std::int64_t> by_gender{};
  std::int64_t unknown = 0;  // citations to papers without a gender category
};

ObservedCounts observed_by_gender(const CitationNetwork& net, const PaperFilter& from,
                                  const PaperFilter& to);

/// Expected citations per category: every group contributes, for each of its
/// sources that lands in `to` (with a known category), the fraction of its
/// known-category members that are in g.
PerGender<double> expected_by_gender(const CitationNetwork& net,
                                     const ExpectedCitations<double>& ec,
                                     const PaperFilter& from, const PaperFilter& to);

/// (observed - expected) / expected; empty when expected is zero.
std::optional<double> over_under(double observed, double expected);

struct Interval {
  double low = 0;
  double high = 0;
};

struct BootstrapOptions {
  int resamples = 500;
  std::uint64_t seed = 0;
  double level = 0.95;
  int threads = 1;
};

/// Percentile bootstrap over citing papers: each resample draws N papers
/// with replacement and re-aggregates observed and expected counts over the
/// drawn multiset, reusing the full-network groups.
PerGender<std::optional<Interval>> bootstrap_ci(const CitationNetwork& net,
                                                const ExpectedCitations<double>& ec,
                                                const PaperFilter& from, const PaperFilter& to,
                                                const BootstrapOptions& opts);

/// Linear interpolation between order statistics; `q` in [0, 1].
double percentile(std::vector<double> values, double q);

struct ImbalanceReport {
  Model model = Model::RD;
  std::string from;
  std::string to;
  GenderCategory gender = GenderCategory::MM;
  std::int64_t n_obs = 0;
  double n_expected = 0;
  std::optional<double> over_under;
  std::optional<Interval> ci;
};

std::vector<ImbalanceReport> imbalance_reports(const CitationNetwork& net,
                                               const ExpectedCitations<double>& ec,
                                               const PaperFilter& from, const PaperFilter& to,
                                               const std::optional<BootstrapOptions>& bootstrap);

enum class Stratifier { ConferenceRank, Subfield };

struct StratumReport {
  std::string label;
  std::vector<ImbalanceReport> reports;
};

/// One block per stratum value present in the network, with `to` restricted
/// to that stratum.
std::vector<StratumReport> stratified_imbalance(const CitationNetwork& net,
                                                const ExpectedCitations<double>& ec,
                                                Stratifier stratifier, const PaperFilter& from,
                                                const std::optional<BootstrapOptions>& bootstrap);

/// Spearman rank correlation with average ranks for ties; empty for a
/// constant input.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

void write_reports_csv(std::ostream& out, std::span<const ImbalanceReport> reports);
void write_reports_json(std::ostream& out, std::span<const ImbalanceReport> reports);

}  // namespace citeimb
