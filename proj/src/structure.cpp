#include "citeimb/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace citeimb {

SurvivalCurve survival_curve(const Eigen::VectorXd& observed, const Eigen::VectorXd& expected) {
  SurvivalCurve s;
  const double top = std::max(observed.size() ? observed.maxCoeff() : 0.0,
                              expected.size() ? expected.maxCoeff() : 0.0);
  const auto thresholds = static_cast<Eigen::Index>(std::ceil(top - kSurvivalSlack)) + 1;
  const auto fraction = [](const Eigen::VectorXd& v, double x) {
    if (v.size() == 0) return 0.0;
    return static_cast<double>((v.array() >= x - kSurvivalSlack).count()) /
           static_cast<double>(v.size());
  };
  s.observed.resize(thresholds);
  s.expected.resize(thresholds);
  for (Eigen::Index x = 0; x < thresholds; ++x) {
    s.observed(x) = fraction(observed, static_cast<double>(x));
    s.expected(x) = fraction(expected, static_cast<double>(x));
  }
  return s;
}

double ks_distance(const SurvivalCurve& curve) {
  if (curve.observed.size() == 0) return 0.0;
  return (curve.observed - curve.expected).cwiseAbs().maxCoeff();
}

CategoryPairMatrix category_pair_matrix(const CitationNetwork& net,
                                        const ExpectedCitations<double>& ec, Attribute a) {
  CategoryPairMatrix m;
  m.attribute = a;
  std::map<std::string_view, int> ids;
  for (const auto& p : net.papers()) ids.emplace(attribute_value(p, a), 0);
  int next = 0;
  for (auto& [label, id] : ids) {
    id = next++;
    m.labels.emplace_back(label);
  }
  std::vector<int> cat(static_cast<std::size_t>(net.size()));
  for (NodeIndex i = 0; i < net.size(); ++i) cat[i] = ids.at(attribute_value(net.paper(i), a));

  m.observed = Eigen::MatrixXd::Zero(next, next);
  m.expected = Eigen::MatrixXd::Zero(next, next);
  for (const auto& e : net.edges()) m.observed(cat[e.citing], cat[e.cited]) += 1.0;
  for (const auto& g : ec.groups) {
    for (const NodeIndex j : g.members) m.expected(cat[g.citing], cat[j]) += g.weight_per_member;
  }
  return m;
}

StructuralReport structural_report(const CitationNetwork& net,
                                   const ExpectedCitations<double>& ec) {
  StructuralReport r;
  r.model = ec.model;
  const auto n = net.size();
  r.out_observed.resize(n);
  r.out_expected = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd in_observed(n);
  for (NodeIndex i = 0; i < n; ++i) {
    r.out_observed(i) = net.out_degree(i);
    in_observed(i) = net.in_degree(i);
  }
  for (const auto& g : ec.groups) {
    r.out_expected(g.citing) += g.weight_per_member * static_cast<double>(g.members.size());
  }
  for (const auto a : {Attribute::Rank, Attribute::Country, Attribute::Topic}) {
    r.category_pairs.push_back(category_pair_matrix(net, ec, a));
  }
  r.in_citations = survival_curve(in_observed, ec.c_bar);
  r.ks_distance = ks_distance(r.in_citations);
  for (std::size_t g = 0; g < kKnownCategories.size(); ++g) {
    std::vector<double> obs, exp;
    for (NodeIndex i = 0; i < n; ++i) {
      if (net.paper(i).gender != kKnownCategories[g]) continue;
      obs.push_back(in_observed(i));
      exp.push_back(ec.c_bar(i));
    }
    r.in_citations_by_gender[g] =
        survival_curve(Eigen::Map<Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size())),
                       Eigen::Map<Eigen::VectorXd>(exp.data(), static_cast<Eigen::Index>(exp.size())));
  }
  return r;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::Rank: return "rank";
    case Attribute::Country: return "country";
    case Attribute::Topic: return "topic";
  }
  return "?";
}

}  // namespace

void write_structural_report(const StructuralReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    // Out-degree histogram; expected row sums are rounded to the nearest count.
    std::map<long, std::pair<long, long>> hist;
    for (Eigen::Index i = 0; i < report.out_observed.size(); ++i) {
      ++hist[std::lround(report.out_observed(i))].first;
      ++hist[std::lround(report.out_expected(i))].second;
    }
    std::ofstream out(dir / "out_degree.csv");
    out << "out_degree,observed_papers,expected_papers\n";
    for (const auto& [k, counts] : hist) out << k << ',' << counts.first << ',' << counts.second << '\n';
  }
  for (const auto& m : report.category_pairs) {
    std::ofstream out(dir / ("pairs_" + std::string(attribute_name(m.attribute)) + ".csv"));
    out << "from,to,observed,expected\n";
    for (std::size_t a = 0; a < m.labels.size(); ++a) {
      for (std::size_t b = 0; b < m.labels.size(); ++b) {
        const double o = m.observed(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        const double e = m.expected(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (o == 0.0 && e == 0.0) continue;
        out << m.labels[a] << ',' << m.labels[b] << ',' << num(o) << ',' << num(e) << '\n';
      }
    }
  }
  std::ofstream out(dir / "survival.csv");
  out << "group,threshold,observed,expected\n";
  const auto dump = [&](std::string_view group, const SurvivalCurve& s) {
    for (Eigen::Index x = 0; x < s.observed.size(); ++x) {
      out << group << ',' << x << ',' << num(s.observed(x)) << ',' << num(s.expected(x)) << '\n';
    }
  };
  dump("all", report.in_citations);
  for (std::size_t g = 0; g < kKnownCategories.size(); ++g) {
    dump(to_string(kKnownCategories[g]), report.in_citations_by_gender[g]);
  }
  std::ofstream summary(dir / "ks.csv");
  summary << "model,ks_distance\n" << to_string(report.model) << ',' << num(report.ks_distance) << '\n';
}

}  // namespace citeimb
