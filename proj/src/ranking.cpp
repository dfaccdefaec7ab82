#include "citeimb/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "citeimb/log.hpp"

namespace citeimb {

std::string_view to_string(Metric m) {
  return m == Metric::PageRank ? "pagerank" : "citations";
}

Eigen::VectorXd normalized_scores(const Eigen::VectorXd& raw, const CitationNetwork& net) {
  std::map<std::pair<int, std::string_view>, std::pair<double, int>> strata;
  const auto key = [&](NodeIndex i) {
    const Paper& p = net.paper(i);
    return std::pair<int, std::string_view>{static_cast<int>(p.pub_date.year()), p.subfield};
  };
  for (NodeIndex i = 0; i < net.size(); ++i) {
    auto& [sum, count] = strata[key(i)];
    sum += raw(i);
    ++count;
  }
  for (const auto& [k, acc] : strata) {
    if (acc.first == 0.0) {
      warn("all scores are zero in stratum year=" + std::to_string(k.first) + " subfield=" +
           std::string(k.second) + "; normalized scores set to 0");
    }
  }
  Eigen::VectorXd out(net.size());
  for (NodeIndex i = 0; i < net.size(); ++i) {
    const auto& [sum, count] = strata.at(key(i));
    out(i) = sum == 0.0 ? 0.0 : raw(i) / (sum / count);
  }
  return out;
}

namespace {

// Power iteration p <- (1 - a) t + a (walk(p) + dangling(p) t), starting at t.
// `walk` adds the citation-following mass of every non-dangling paper.
template <class Walk>
RankingResult power_iterate(const Eigen::VectorXd& teleport, const std::vector<char>& dangling,
                            Walk&& walk, const PageRankOptions& opts) {
  RankingResult r;
  r.metric = Metric::PageRank;
  r.alpha = opts.alpha;
  r.converged = false;
  const auto n = teleport.size();
  Eigen::VectorXd p = teleport;
  Eigen::VectorXd next(n);
  for (int t = 1; t <= opts.max_iterations; ++t) {
    next.setZero();
    walk(p, next);
    double dangling_mass = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dangling[i]) dangling_mass += p(i);
    }
    next = (1.0 - opts.alpha) * teleport + opts.alpha * (next + dangling_mass * teleport);
    r.residual = (next - p).cwiseAbs().sum() / static_cast<double>(n);
    p.swap(next);
    r.iterations_used = t;
    if (r.residual < opts.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.raw = std::move(p);
  return r;
}

}  // namespace

RankingResult pagerank_observed(const CitationNetwork& net, const PageRankOptions& opts) {
  const auto m = net.num_citations();
  if (m == 0) throw std::invalid_argument("PageRank needs at least one citation");
  const auto n = net.size();
  Eigen::VectorXd teleport(n);
  std::vector<char> dangling(static_cast<std::size_t>(n));
  for (NodeIndex i = 0; i < n; ++i) {
    teleport(i) = static_cast<double>(net.in_degree(i)) / static_cast<double>(m);
    dangling[i] = net.out_degree(i) == 0;
  }
  const auto walk = [&](const Eigen::VectorXd& p, Eigen::VectorXd& next) {
    for (NodeIndex i = 0; i < n; ++i) {
      const int k = net.out_degree(i);
      if (k == 0) continue;
      const double share = p(i) / k;
      for (const NodeIndex j : net.cited_by(i)) next(j) += share;
    }
  };
  auto r = power_iterate(teleport, dangling, walk, opts);
  r.source = "observed";
  r.normalized = normalized_scores(r.raw, net);
  return r;
}

RankingResult pagerank_reference(const ExpectedCitations<double>& ec, const CitationNetwork& net,
                                 const PageRankOptions& opts) {
  const auto m = net.num_citations();
  if (m == 0) throw std::invalid_argument("PageRank needs at least one citation");
  if (ec.num_papers != net.size()) {
    throw std::invalid_argument("expected citations were computed on a different network");
  }
  const auto n = net.size();
  const Eigen::VectorXd teleport = ec.c_bar / static_cast<double>(m);
  std::vector<char> dangling(static_cast<std::size_t>(n));
  for (NodeIndex i = 0; i < n; ++i) dangling[i] = net.out_degree(i) == 0;
  const auto walk = [&](const Eigen::VectorXd& p, Eigen::VectorXd& next) {
    for (const auto& g : ec.groups) {
      const int k = net.out_degree(g.citing);
      if (k == 0) continue;
      const double share = p(g.citing) * g.weight_per_member / k;
      for (const NodeIndex j : g.members) next(j) += share;
    }
  };
  auto r = power_iterate(teleport, dangling, walk, opts);
  r.source = std::string(to_string(ec.model));
  r.normalized = normalized_scores(r.raw, net);
  return r;
}

RankingResult citation_ranking(const CitationNetwork& net) {
  RankingResult r;
  r.metric = Metric::Citations;
  r.source = "observed";
  r.raw.resize(net.size());
  for (NodeIndex i = 0; i < net.size(); ++i) r.raw(i) = net.in_degree(i);
  r.normalized = normalized_scores(r.raw, net);
  return r;
}

RankingResult citation_ranking(const ExpectedCitations<double>& ec, const CitationNetwork& net) {
  RankingResult r;
  r.metric = Metric::Citations;
  r.source = std::string(to_string(ec.model));
  r.raw = ec.c_bar;
  r.normalized = normalized_scores(r.raw, net);
  return r;
}

RankingResult rank(const CitationNetwork& net, Metric metric, const ShareSource& source,
                   const PageRankOptions& opts) {
  RankingResult r;
  if (metric == Metric::Citations) {
    r = source.model ? citation_ranking(*source.model, net) : citation_ranking(net);
  } else {
    r = source.model ? pagerank_reference(*source.model, net, opts) : pagerank_observed(net, opts);
  }
  r.source = source.label;
  return r;
}

std::vector<NodeIndex> ranking_order(const Eigen::VectorXd& scores, const CitationNetwork& net) {
  std::vector<NodeIndex> order(static_cast<std::size_t>(net.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return net.paper(a).id < net.paper(b).id;
  });
  return order;
}

std::size_t top_count(double d_percent, std::size_t n) {
  if (!(d_percent > 0.0) || d_percent > 100.0) {
    throw std::invalid_argument("d must lie in (0, 100]");
  }
  // Guard against d * N / 100 landing a hair above an integer.
  const double exact = d_percent * static_cast<double>(n) / 100.0;
  return std::min(n, static_cast<std::size_t>(std::ceil(exact - 1e-9)));
}

double top_share(const Eigen::VectorXd& scores, const CitationNetwork& net, double d_percent) {
  const auto order = ranking_order(scores, net);
  const auto take = top_count(d_percent, order.size());
  if (take == 0) return 0.0;
  std::size_t women = 0;
  for (std::size_t r = 0; r < take; ++r) women += has_woman_author(net.paper(order[r]).gender);
  return static_cast<double>(women) / static_cast<double>(take);
}

std::vector<SharePoint> share_curve(const CitationNetwork& net, Metric metric,
                                    std::span<const ShareSource> sources,
                                    std::span<const double> d_grid, const PageRankOptions& opts) {
  std::vector<Eigen::VectorXd> scores;
  for (const auto& s : sources) scores.push_back(rank(net, metric, s, opts).normalized);
  std::vector<SharePoint> out;
  for (const double d : d_grid) {
    for (std::size_t s = 0; s < sources.size(); ++s) {
      out.push_back({d, sources[s].label, metric, top_share(scores[s], net, d)});
    }
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_ranking_csv(std::ostream& out, const RankingResult& r, const CitationNetwork& net) {
  const auto order = ranking_order(r.normalized, net);
  std::vector<std::size_t> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k + 1;
  out << "paper_id,raw,normalized,rank\n";
  for (NodeIndex i = 0; i < net.size(); ++i) {
    out << net.paper(i).id << ',' << fmt(r.raw(i)) << ',' << fmt(r.normalized(i)) << ','
        << position[i] << '\n';
  }
}

void write_share_curve_csv(std::ostream& out, std::span<const SharePoint> points) {
  out << "d,source,metric,ww_share\n";
  for (const auto& p : points) {
    out << fmt(p.d) << ',' << p.source << ',' << to_string(p.metric) << ',' << fmt(p.share) << '\n';
  }
}

}  // namespace citeimb
