#include "citeimb/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "citeimb/log.hpp"

namespace citeimb {

namespace {

int gender_slot(GenderCategory g) {
  return g == GenderCategory::Unknown ? -1 : static_cast<int>(g);
}

std::vector<std::string> split_values(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Per-citer contributions used both for point estimates and resampling.
struct CiterTotals {
  std::vector<PerGender<double>> observed;
  std::vector<PerGender<double>> expected;
};

CiterTotals citer_totals(const CitationNetwork& net, const ExpectedCitations<double>& ec,
                         const PaperFilter& from, const PaperFilter& to) {
  if (ec.num_papers != net.size()) {
    throw std::invalid_argument("expected citations were computed on a different network");
  }
  const auto n = static_cast<std::size_t>(net.size());
  std::vector<char> in_from(n), in_to(n);
  std::vector<int> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = net.paper(static_cast<NodeIndex>(i));
    in_from[i] = from(p);
    in_to[i] = to(p);
    slot[i] = gender_slot(p.gender);
  }

  CiterTotals t;
  t.observed.assign(n, PerGender<double>{});
  t.expected.assign(n, PerGender<double>{});
  for (const auto& e : net.edges()) {
    if (!in_from[e.citing] || !in_to[e.cited] || slot[e.cited] < 0) continue;
    t.observed[e.citing][slot[e.cited]] += 1.0;
  }
  for (const auto& g : ec.groups) {
    if (g.citing < 0 || static_cast<std::size_t>(g.citing) >= n) {
      throw std::invalid_argument("group refers to a paper outside the network");
    }
    if (!in_from[g.citing]) continue;
    const auto landing = std::count_if(g.sources.begin(), g.sources.end(), [&](NodeIndex s) {
      return in_to[s] && slot[s] >= 0;
    });
    if (landing == 0) continue;
    PerGender<double> members{};
    double known = 0;
    for (const NodeIndex j : g.members) {
      if (slot[j] < 0) continue;
      members[slot[j]] += 1.0;
      known += 1.0;
    }
    if (known == 0) continue;
    for (std::size_t k = 0; k < 4; ++k) {
      t.expected[g.citing][k] += static_cast<double>(landing) * members[k] / known;
    }
  }
  return t;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

PaperFilter PaperFilter::parse(std::string_view text) {
  if (text.empty() || text == "all") return all();
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("paper filter must be 'all' or key=value: '" + std::string(text) + "'");
  }
  const std::string key(text.substr(0, eq));
  const auto values = split_values(text.substr(eq + 1));
  const std::set<std::string> allowed(values.begin(), values.end());
  PaperFilter f;
  f.description = std::string(text);
  if (key == "gender") {
    for (const auto& v : allowed) {
      if (!parse_gender_category(v)) throw std::invalid_argument("unknown gender category '" + v + "'");
    }
    f.test = [allowed](const Paper& p) { return allowed.contains(std::string(to_string(p.gender))); };
  } else if (key == "rank") {
    for (const auto& v : allowed) {
      if (!parse_rank(v)) throw std::invalid_argument("unknown rank '" + v + "'");
    }
    f.test = [allowed](const Paper& p) { return allowed.contains(std::string(to_string(p.rank))); };
  } else if (key == "country") {
    f.test = [allowed](const Paper& p) { return allowed.contains(p.country); };
  } else if (key == "topic") {
    f.test = [allowed](const Paper& p) { return allowed.contains(p.topic); };
  } else if (key == "subfield") {
    f.test = [allowed](const Paper& p) { return allowed.contains(p.subfield); };
  } else {
    throw std::invalid_argument("unknown filter key '" + key + "'");
  }
  return f;
}

ObservedCounts observed_by_gender(const CitationNetwork& net, const PaperFilter& from,
                                  const PaperFilter& to) {
  ObservedCounts out;
  for (const auto& e : net.edges()) {
    const Paper& cited = net.paper(e.cited);
    if (!from(net.paper(e.citing)) || !to(cited)) continue;
    const int s = gender_slot(cited.gender);
    if (s < 0) ++out.unknown;
    else ++out.by_gender[s];
  }
  return out;
}

PerGender<double> expected_by_gender(const CitationNetwork& net,
                                     const ExpectedCitations<double>& ec,
                                     const PaperFilter& from, const PaperFilter& to) {
  const auto t = citer_totals(net, ec, from, to);
  PerGender<double> out{};
  for (const auto& row : t.expected) {
    for (std::size_t k = 0; k < 4; ++k) out[k] += row[k];
  }
  return out;
}

std::optional<double> over_under(double observed, double expected) {
  if (expected == 0.0) return std::nullopt;
  return (observed - expected) / expected;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PerGender<std::optional<Interval>> bootstrap_ci(const CitationNetwork& net,
                                                const ExpectedCitations<double>& ec,
                                                const PaperFilter& from, const PaperFilter& to,
                                                const BootstrapOptions& opts) {
  if (opts.resamples < 2) throw std::invalid_argument("bootstrap needs at least 2 resamples");
  const auto t = citer_totals(net, ec, from, to);
  const auto n = static_cast<std::size_t>(net.size());
  PerGender<std::optional<Interval>> out{};
  if (n == 0) return out;

  // samples[r][g]; NaN marks an undefined ratio.
  std::vector<PerGender<double>> samples(static_cast<std::size_t>(opts.resamples));
  const auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> counts(n);
    for (std::size_t r = begin; r < end; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed),
                        static_cast<std::uint32_t>(opts.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t draw = 0; draw < n; ++draw) ++counts[pick(rng)];
      PerGender<double> obs{}, exp{};
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] == 0) continue;
        for (std::size_t k = 0; k < 4; ++k) {
          obs[k] += counts[i] * t.observed[i][k];
          exp[k] += counts[i] * t.expected[i][k];
        }
      }
      for (std::size_t k = 0; k < 4; ++k) {
        samples[r][k] = over_under(obs[k], exp[k]).value_or(std::nan(""));
      }
    }
  };

  const auto total = samples.size();
  const auto workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.threads, 1)), 1, total);
  if (workers == 1) {
    run(0, total);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(run, total * w / workers, total * (w + 1) / workers);
    }
  }

  const double tail = (1.0 - opts.level) / 2.0;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> defined;
    for (const auto& s : samples) {
      if (!std::isnan(s[k])) defined.push_back(s[k]);
    }
    if (defined.size() < 2) continue;
    out[k] = Interval{percentile(defined, tail), percentile(defined, 1.0 - tail)};
  }
  return out;
}

std::vector<ImbalanceReport> imbalance_reports(const CitationNetwork& net,
                                               const ExpectedCitations<double>& ec,
                                               const PaperFilter& from, const PaperFilter& to,
                                               const std::optional<BootstrapOptions>& bootstrap) {
  for (const auto* f : {&from, &to}) {
    if (std::none_of(net.papers().begin(), net.papers().end(), f->test)) {
      warn("filter '" + f->description + "' selects no papers; over/under-citation is undefined");
    }
  }
  const auto observed = observed_by_gender(net, from, to);
  const auto expected = expected_by_gender(net, ec, from, to);
  PerGender<std::optional<Interval>> ci{};
  if (bootstrap) ci = bootstrap_ci(net, ec, from, to, *bootstrap);

  std::vector<ImbalanceReport> out;
  for (std::size_t k = 0; k < 4; ++k) {
    ImbalanceReport r;
    r.model = ec.model;
    r.from = from.description;
    r.to = to.description;
    r.gender = kKnownCategories[k];
    r.n_obs = observed.by_gender[k];
    r.n_expected = expected[k];
    r.over_under = over_under(static_cast<double>(r.n_obs), r.n_expected);
    if (r.over_under) r.ci = ci[k];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<StratumReport> stratified_imbalance(const CitationNetwork& net,
                                                const ExpectedCitations<double>& ec,
                                                Stratifier stratifier, const PaperFilter& from,
                                                const std::optional<BootstrapOptions>& bootstrap) {
  std::vector<std::string> values;
  if (stratifier == Stratifier::ConferenceRank) {
    for (const auto r : kAllRanks) {
      const bool present = std::any_of(net.papers().begin(), net.papers().end(),
                                       [&](const Paper& p) { return p.rank == r; });
      if (present) values.emplace_back(to_string(r));
    }
  } else {
    std::set<std::string> seen;
    for (const auto& p : net.papers()) seen.insert(p.subfield);
    values.assign(seen.begin(), seen.end());
  }

  std::vector<StratumReport> out;
  for (const auto& v : values) {
    PaperFilter to;
    if (stratifier == Stratifier::ConferenceRank) {
      to.description = "rank=" + v;
      to.test = [v](const Paper& p) { return to_string(p.rank) == v; };
    } else {
      to.description = "subfield=" + v;
      to.test = [v](const Paper& p) { return p.subfield == v; };
    }
    out.push_back({v, imbalance_reports(net, ec, from, to, bootstrap)});
  }
  return out;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman needs two samples of equal length >= 2");
  }
  const auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r(static_cast<Eigen::Index>(idx[k])) = avg;
      i = j + 1;
    }
    return r;
  };
  const Eigen::VectorXd rx = ranks(x);
  const Eigen::VectorXd ry = ranks(y);
  const Eigen::VectorXd dx = rx.array() - rx.mean();
  const Eigen::VectorXd dy = ry.array() - ry.mean();
  const double sx = dx.norm();
  const double sy = dy.norm();
  if (sx == 0.0 || sy == 0.0) return std::nullopt;
  return dx.dot(dy) / (sx * sy);
}

void write_reports_csv(std::ostream& out, std::span<const ImbalanceReport> reports) {
  out << "model,from,to,gender,n_obs,n_expected,over_under,ci_low,ci_high,status\n";
  const auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (const auto& r : reports) {
    out << to_string(r.model) << ',' << quote(r.from) << ',' << quote(r.to) << ','
        << to_string(r.gender) << ',' << r.n_obs << ',' << fmt(r.n_expected) << ',';
    if (r.over_under) out << fmt(*r.over_under);
    out << ',';
    if (r.ci) out << fmt(r.ci->low);
    out << ',';
    if (r.ci) out << fmt(r.ci->high);
    out << ',' << (r.over_under ? "ok" : "undefined") << '\n';
  }
}

void write_reports_json(std::ostream& out, std::span<const ImbalanceReport> reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["model"] = to_string(r.model);
    j["from"] = r.from;
    j["to"] = r.to;
    j["gender"] = to_string(r.gender);
    j["n_obs"] = r.n_obs;
    j["n_expected"] = r.n_expected;
    j["over_under"] = r.over_under ? nlohmann::ordered_json(*r.over_under) : nullptr;
    j["ci_low"] = r.ci ? nlohmann::ordered_json(r.ci->low) : nullptr;
    j["ci_high"] = r.ci ? nlohmann::ordered_json(r.ci->high) : nullptr;
    j["status"] = r.over_under ? "ok" : "undefined";
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace citeimb
