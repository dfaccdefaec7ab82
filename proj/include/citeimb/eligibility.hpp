#pragma once

#include <span>
#include <vector>

#include "citeimb/corpus.hpp"

namespace citeimb {

/// Answers "which papers could paper i have cited?" for a fixed paper list.
///
/// A candidate j is eligible for citer i when j != i, j was published no
/// later than i and no earlier than `citation_window_start(i)`, and the first
/// and last authors of j are not both among the first/last authors of i.
/// Homophilic sets further restrict to the category of a reference paper
/// under an attribute set.
class EligibilityIndex {
 public:
  EligibilityIndex(std::span<const Paper> papers, AttributeSet attrs);

  /// Candidates for `citer`, ascending by index.
  std::vector<NodeIndex> random_set(NodeIndex citer) const;

  /// Candidates for `citer` in the category of `cited`, ascending. `cited` is
  /// always a member, even when its date falls outside the window.
  std::vector<NodeIndex> homophilic_set(NodeIndex citer, NodeIndex cited) const;

  /// Papers ordered by (pub_date, id).
  const std::vector<NodeIndex>& date_order() const { return order_; }

  int category_of(NodeIndex i) const { return category_[i]; }
  int num_categories() const { return static_cast<int>(members_.size()); }
  AttributeSet attributes() const { return attrs_; }

  bool eligible(NodeIndex citer, NodeIndex candidate) const;

 private:
  // Scans `pool` (sorted by date) for candidates of `citer`.
  std::vector<NodeIndex> window(NodeIndex citer, const std::vector<NodeIndex>& pool) const;

  std::span<const Paper> papers_;
  AttributeSet attrs_;
  std::vector<int> days_;
  std::vector<int> window_start_;
  std::vector<NodeIndex> order_;
  std::vector<int> category_;
  std::vector<std::vector<NodeIndex>> members_;  // per category, in date order
};

/// Stable (pub_date, id) order.
std::vector<NodeIndex> date_order(std::span<const Paper> papers);

std::vector<NodeIndex> eligible_set_rd(const CitationNetwork& net, NodeIndex citer);
std::vector<NodeIndex> eligible_set_hd(const CitationNetwork& net, NodeIndex citer,
                                       NodeIndex cited, AttributeSet attrs);

}  // namespace citeimb
