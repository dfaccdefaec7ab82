#include "citeimb/refmodels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "citeimb/eligibility.hpp"

namespace citeimb {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::RD: return "rd";
    case Model::HD: return "hd";
    case Model::PD: return "pd";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view token) {
  if (token == "rd" || token == "RD") return Model::RD;
  if (token == "hd" || token == "HD") return Model::HD;
  if (token == "pd" || token == "PD") return Model::PD;
  return std::nullopt;
}

namespace {

// Collects one citer's groups, merging citations whose redraw sets coincide.
template <class Scalar>
class GroupBuilder {
 public:
  explicit GroupBuilder(NodeIndex citing) : citing_(citing) {}

  void add(std::vector<NodeIndex> members, NodeIndex source) {
    const auto [it, inserted] = slot_.try_emplace(members, pending_.size());
    if (inserted) {
      pending_.push_back({citing_, std::move(members), {}, Scalar{}});
    }
    pending_[it->second].sources.push_back(source);
  }

  // Appends the finished groups to `out` in first-seen order.
  void flush(std::vector<ContributionGroup<Scalar>>& out) {
    for (auto& g : pending_) {
      std::sort(g.sources.begin(), g.sources.end());
      g.weight_per_member = ratio<Scalar>(static_cast<std::int64_t>(g.sources.size()),
                                          static_cast<std::int64_t>(g.members.size()));
      out.push_back(std::move(g));
    }
    pending_.clear();
    slot_.clear();
  }

 private:
  NodeIndex citing_;
  std::vector<ContributionGroup<Scalar>> pending_;
  std::map<std::vector<NodeIndex>, std::size_t> slot_;
};

template <class Scalar>
VectorX<Scalar> sum_groups(NodeIndex n, const std::vector<ContributionGroup<Scalar>>& groups) {
  VectorX<Scalar> c = VectorX<Scalar>::Zero(n);
  for (const auto& g : groups) {
    for (const NodeIndex j : g.members) c(j) += g.weight_per_member;
  }
  return c;
}

}  // namespace

template <class Scalar>
ExpectedCitations<Scalar> random_draws(const CitationNetwork& net) {
  const EligibilityIndex index(net.papers(), AttributeSet{});
  ExpectedCitations<Scalar> ec;
  ec.model = Model::RD;
  ec.num_papers = net.size();
  for (NodeIndex i = 0; i < net.size(); ++i) {
    const int k = net.out_degree(i);
    if (k == 0) continue;
    auto members = index.random_set(i);
    if (members.empty()) {
      throw ModelError("paper '" + net.paper(i).id +
                       "' makes citations but has no eligible papers to cite");
    }
    const auto cited = net.cited_by(i);
    ContributionGroup<Scalar> g;
    g.citing = i;
    g.sources.assign(cited.begin(), cited.end());
    g.weight_per_member = ratio<Scalar>(k, static_cast<std::int64_t>(members.size()));
    g.members = std::move(members);
    ec.groups.push_back(std::move(g));
  }
  ec.c_bar = sum_groups(net.size(), ec.groups);
  return ec;
}

template <class Scalar>
ExpectedCitations<Scalar> homophilic_draws(const CitationNetwork& net, AttributeSet attrs) {
  const EligibilityIndex index(net.papers(), attrs);
  ExpectedCitations<Scalar> ec;
  ec.model = Model::HD;
  ec.attributes = attrs;
  ec.num_papers = net.size();
  for (NodeIndex i = 0; i < net.size(); ++i) {
    GroupBuilder<Scalar> builder(i);
    for (const NodeIndex cited : net.cited_by(i)) {
      builder.add(index.homophilic_set(i, cited), cited);
    }
    builder.flush(ec.groups);
  }
  ec.c_bar = sum_groups(net.size(), ec.groups);
  return ec;
}

template <class Scalar>
ExpectedCitations<Scalar> preferential_draws(const CitationNetwork& net, AttributeSet attrs,
                                             PreferentialOptions opts) {
  const EligibilityIndex index(net.papers(), attrs);
  ExpectedCitations<Scalar> ec;
  ec.model = Model::PD;
  ec.attributes = attrs;
  ec.num_papers = net.size();

  VectorX<Scalar> running = VectorX<Scalar>::Zero(net.size());
  for (const NodeIndex citer : index.date_order()) {
    const auto first_new = ec.groups.size();
    GroupBuilder<Scalar> builder(citer);
    for (const NodeIndex cited : net.cited_by(citer)) {
      auto candidates = index.homophilic_set(citer, cited);
      const Scalar& target = running(cited);
      std::erase_if(candidates, [&](NodeIndex j) {
        return !same_count(running(j), target, opts.tie_tolerance);
      });
      builder.add(std::move(candidates), cited);
    }
    builder.flush(ec.groups);
    // Apply this paper's contributions only after all of its citations have
    // been grouped against the previous state.
    for (auto g = first_new; g < ec.groups.size(); ++g) {
      for (const NodeIndex j : ec.groups[g].members) running(j) += ec.groups[g].weight_per_member;
    }
  }
  ec.c_bar = std::move(running);
  return ec;
}

template <class Scalar>
Scalar citation_probability(const ExpectedCitations<Scalar>& ec, NodeIndex i, NodeIndex j) {
  Scalar total{};
  for (const auto& g : ec.groups) {
    if (g.citing == i && std::binary_search(g.members.begin(), g.members.end(), j)) {
      total += g.weight_per_member;
    }
  }
  return total;
}

template <class Scalar>
MatrixX<Scalar> dense_weights(const ExpectedCitations<Scalar>& ec) {
  MatrixX<Scalar> w = MatrixX<Scalar>::Zero(ec.num_papers, ec.num_papers);
  for (const auto& g : ec.groups) {
    for (const NodeIndex j : g.members) w(g.citing, j) += g.weight_per_member;
  }
  return w;
}

ExpectedCitations<double> to_double(const ExpectedCitations<Rational>& ec) {
  ExpectedCitations<double> out;
  out.model = ec.model;
  out.attributes = ec.attributes;
  out.num_papers = ec.num_papers;
  out.groups.reserve(ec.groups.size());
  for (const auto& g : ec.groups) {
    out.groups.push_back({g.citing, g.members, g.sources, to_double(g.weight_per_member)});
  }
  out.c_bar.resize(ec.c_bar.size());
  for (Eigen::Index j = 0; j < ec.c_bar.size(); ++j) out.c_bar(j) = to_double(ec.c_bar(j));
  return out;
}

ExpectedCitations<double> edge_exact_model(const CitationNetwork& net) {
  ExpectedCitations<double> ec;
  ec.model = Model::HD;
  ec.num_papers = net.size();
  for (const auto& e : net.edges()) ec.groups.push_back({e.citing, {e.cited}, {e.cited}, 1.0});
  ec.c_bar = sum_groups(net.size(), ec.groups);
  return ec;
}

ExpectedCitations<double> build_model(const CitationNetwork& net, const ModelSpec& spec) {
  const PreferentialOptions pd{spec.tie_tolerance};
  if (spec.exact) {
    switch (spec.model) {
      case Model::RD: return to_double(random_draws<Rational>(net));
      case Model::HD: return to_double(homophilic_draws<Rational>(net, spec.attributes));
      case Model::PD: return to_double(preferential_draws<Rational>(net, spec.attributes, pd));
    }
  }
  switch (spec.model) {
    case Model::RD: return random_draws<double>(net);
    case Model::HD: return homophilic_draws<double>(net, spec.attributes);
    case Model::PD: return preferential_draws<double>(net, spec.attributes, pd);
  }
  throw ModelError("unknown model");
}

ConservationCheck check_conservation(const CitationNetwork& net,
                                     const ExpectedCitations<double>& ec) {
  ConservationCheck out;
  if (net.empty()) return out;
  Eigen::VectorXd row = Eigen::VectorXd::Zero(net.size());
  for (const auto& g : ec.groups) {
    row(g.citing) += g.weight_per_member * static_cast<double>(g.members.size());
  }
  for (NodeIndex i = 0; i < net.size(); ++i) {
    out.max_out_degree_error =
        std::max(out.max_out_degree_error, std::abs(row(i) - net.out_degree(i)));
  }
  out.total_error = std::abs(ec.c_bar.sum() - static_cast<double>(net.num_citations()));
  out.max_c_bar_error = (sum_groups(net.size(), ec.groups) - ec.c_bar).cwiseAbs().maxCoeff();
  return out;
}

template ExpectedCitations<double> random_draws<double>(const CitationNetwork&);
template ExpectedCitations<Rational> random_draws<Rational>(const CitationNetwork&);
template ExpectedCitations<double> homophilic_draws<double>(const CitationNetwork&, AttributeSet);
template ExpectedCitations<Rational> homophilic_draws<Rational>(const CitationNetwork&,
                                                                AttributeSet);
template ExpectedCitations<double> preferential_draws<double>(const CitationNetwork&,
                                                              AttributeSet, PreferentialOptions);
template ExpectedCitations<Rational> preferential_draws<Rational>(const CitationNetwork&,
                                                                  AttributeSet,
                                                                  PreferentialOptions);
template double citation_probability<double>(const ExpectedCitations<double>&, NodeIndex,
                                             NodeIndex);
template Rational citation_probability<Rational>(const ExpectedCitations<Rational>&, NodeIndex,
                                                 NodeIndex);
template MatrixX<double> dense_weights<double>(const ExpectedCitations<double>&);
template MatrixX<Rational> dense_weights<Rational>(const ExpectedCitations<Rational>&);

}  // namespace citeimb
