#include "citeimb/eligibility.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace citeimb {

namespace {

int day_number(Date d) {
  return static_cast<int>(std::chrono::sys_days{d}.time_since_epoch().count());
}

}  // namespace

std::vector<NodeIndex> date_order(std::span<const Paper> papers) {
  std::vector<NodeIndex> order(papers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
    const auto& pa = papers[a];
    const auto& pb = papers[b];
    if (pa.pub_date != pb.pub_date) return pa.pub_date < pb.pub_date;
    return pa.id < pb.id;
  });
  return order;
}

EligibilityIndex::EligibilityIndex(std::span<const Paper> papers, AttributeSet attrs)
    : papers_(papers), attrs_(attrs) {
  const auto n = papers.size();
  days_.resize(n);
  window_start_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    days_[i] = day_number(papers[i].pub_date);
    window_start_[i] = day_number(citation_window_start(papers[i].pub_date));
  }
  order_ = citeimb::date_order(papers);

  std::map<CategoryKey, int> ids;
  category_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] =
        ids.emplace(category_key(papers[i], attrs), static_cast<int>(ids.size()));
    category_[i] = it->second;
  }
  members_.resize(ids.size());
  for (const NodeIndex i : order_) members_[category_[i]].push_back(i);
}

bool EligibilityIndex::eligible(NodeIndex citer, NodeIndex candidate) const {
  if (candidate == citer) return false;
  const int d = days_[candidate];
  if (d > days_[citer] || d < window_start_[citer]) return false;
  return !shares_both_authors(papers_[citer], papers_[candidate]);
}

std::vector<NodeIndex> EligibilityIndex::window(NodeIndex citer,
                                                const std::vector<NodeIndex>& pool) const {
  const auto by_day = [&](NodeIndex a, int day) { return days_[a] < day; };
  const auto first = std::lower_bound(pool.begin(), pool.end(), window_start_[citer], by_day);
  const auto last = std::lower_bound(first, pool.end(), days_[citer] + 1, by_day);
  std::vector<NodeIndex> out;
  out.reserve(static_cast<std::size_t>(last - first));
  const Paper& p = papers_[citer];
  for (auto it = first; it != last; ++it) {
    if (*it != citer && !shares_both_authors(p, papers_[*it])) out.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeIndex> EligibilityIndex::random_set(NodeIndex citer) const {
  return window(citer, order_);
}

std::vector<NodeIndex> EligibilityIndex::homophilic_set(NodeIndex citer, NodeIndex cited) const {
  auto out = window(citer, members_[category_[cited]]);
  const auto pos = std::lower_bound(out.begin(), out.end(), cited);
  if (pos == out.end() || *pos != cited) out.insert(pos, cited);
  return out;
}

std::vector<NodeIndex> eligible_set_rd(const CitationNetwork& net, NodeIndex citer) {
  return EligibilityIndex(net.papers(), AttributeSet{}).random_set(citer);
}

std::vector<NodeIndex> eligible_set_hd(const CitationNetwork& net, NodeIndex citer,
                                       NodeIndex cited, AttributeSet attrs) {
  return EligibilityIndex(net.papers(), attrs).homophilic_set(citer, cited);
}

}  // namespace citeimb
