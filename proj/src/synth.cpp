#include "citeimb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "citeimb/eligibility.hpp"

namespace citeimb {

void validate(const SynthConfig& cfg) {
  if (cfg.n_papers < 2) throw ConfigError("n_papers must be at least 2");
  if (cfg.end_year < cfg.start_year) throw ConfigError("end_year precedes start_year");
  if (cfg.n_ranks < 1 || cfg.n_ranks > 4) throw ConfigError("n_ranks must lie in [1, 4]");
  if (cfg.n_countries < 1 || cfg.n_topics < 1 || cfg.n_subfields < 1) {
    throw ConfigError("attribute pools must be nonempty");
  }
  if (cfg.n_authors < 1) throw ConfigError("n_authors must be positive");
  if (cfg.out_degree_min < 0 || cfg.out_degree_max < cfg.out_degree_min) {
    throw ConfigError("out-degree range is empty or negative");
  }
  if (cfg.out_degree_min > cfg.n_papers - 1) {
    throw ConfigError("out_degree_min exceeds the number of papers that could be cited");
  }
  double total = 0;
  for (const double w : cfg.category_weights) {
    if (!(w >= 0)) throw ConfigError("category weights must be nonnegative");
    total += w;
  }
  if (!(total > 0)) throw ConfigError("category weights must not all be zero");
  for (const double h : cfg.homophily) {
    if (!(h >= 0)) throw ConfigError("homophily strengths must be nonnegative");
  }
  if (!(cfg.pa_strength >= 0)) throw ConfigError("pa_strength must be nonnegative");
  if (!(cfg.gender_bias >= 0)) throw ConfigError("gender_bias must be nonnegative");
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return v;
}

}  // namespace

SynthConfig parse_synth_config(std::istream& in) {
  SynthConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "n_papers") cfg.n_papers = parse_value<int>(key, value);
    else if (key == "start_year") cfg.start_year = parse_value<int>(key, value);
    else if (key == "end_year") cfg.end_year = parse_value<int>(key, value);
    else if (key == "weight_mm") cfg.category_weights[0] = parse_value<double>(key, value);
    else if (key == "weight_mw") cfg.category_weights[1] = parse_value<double>(key, value);
    else if (key == "weight_wm") cfg.category_weights[2] = parse_value<double>(key, value);
    else if (key == "weight_ww") cfg.category_weights[3] = parse_value<double>(key, value);
    else if (key == "n_ranks") cfg.n_ranks = parse_value<int>(key, value);
    else if (key == "n_countries") cfg.n_countries = parse_value<int>(key, value);
    else if (key == "n_topics") cfg.n_topics = parse_value<int>(key, value);
    else if (key == "n_subfields") cfg.n_subfields = parse_value<int>(key, value);
    else if (key == "n_authors") cfg.n_authors = parse_value<int>(key, value);
    else if (key == "out_degree_min") cfg.out_degree_min = parse_value<int>(key, value);
    else if (key == "out_degree_max") cfg.out_degree_max = parse_value<int>(key, value);
    else if (key == "homophily_rank") cfg.homophily[0] = parse_value<double>(key, value);
    else if (key == "homophily_country") cfg.homophily[1] = parse_value<double>(key, value);
    else if (key == "homophily_topic") cfg.homophily[2] = parse_value<double>(key, value);
    else if (key == "pa_strength") cfg.pa_strength = parse_value<double>(key, value);
    else if (key == "gender_bias") cfg.gender_bias = parse_value<double>(key, value);
    else if (key == "bias_rank") {
      const auto r = parse_rank(value);
      if (!r) throw ConfigError("invalid value for bias_rank: '" + value + "'");
      cfg.bias_rank = *r;
    } else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

void write_synth_config(std::ostream& out, const SynthConfig& cfg) {
  out << "n_papers = " << cfg.n_papers << '\n'
      << "start_year = " << cfg.start_year << '\n'
      << "end_year = " << cfg.end_year << '\n'
      << "weight_mm = " << cfg.category_weights[0] << '\n'
      << "weight_mw = " << cfg.category_weights[1] << '\n'
      << "weight_wm = " << cfg.category_weights[2] << '\n'
      << "weight_ww = " << cfg.category_weights[3] << '\n'
      << "n_ranks = " << cfg.n_ranks << '\n'
      << "n_countries = " << cfg.n_countries << '\n'
      << "n_topics = " << cfg.n_topics << '\n'
      << "n_subfields = " << cfg.n_subfields << '\n'
      << "n_authors = " << cfg.n_authors << '\n'
      << "out_degree_min = " << cfg.out_degree_min << '\n'
      << "out_degree_max = " << cfg.out_degree_max << '\n'
      << "homophily_rank = " << cfg.homophily[0] << '\n'
      << "homophily_country = " << cfg.homophily[1] << '\n'
      << "homophily_topic = " << cfg.homophily[2] << '\n'
      << "pa_strength = " << cfg.pa_strength << '\n'
      << "gender_bias = " << cfg.gender_bias << '\n';
  if (cfg.bias_rank) out << "bias_rank = " << to_string(*cfg.bias_rank) << '\n';
  out << "seed = " << cfg.seed << '\n';
}

SyntheticCorpus generate_corpus(const SynthConfig& cfg) {
  validate(cfg);
  using namespace std::chrono;
  std::mt19937_64 rng(cfg.seed);

  const int first_day = sys_days{year{cfg.start_year} / January / 1}.time_since_epoch().count();
  const int last_day = sys_days{year{cfg.end_year} / December / 31}.time_since_epoch().count();
  std::uniform_int_distribution<int> pick_day(first_day, last_day);
  std::discrete_distribution<int> pick_gender(cfg.category_weights.begin(),
                                              cfg.category_weights.end());
  std::uniform_int_distribution<int> pick_rank(0, cfg.n_ranks - 1);
  std::uniform_int_distribution<int> pick_country(0, cfg.n_countries - 1);
  std::uniform_int_distribution<int> pick_topic(0, cfg.n_topics - 1);
  std::uniform_int_distribution<int> pick_subfield(0, cfg.n_subfields - 1);
  std::uniform_int_distribution<int> pick_author(0, cfg.n_authors - 1);

  std::vector<std::pair<int, Paper>> drafts(static_cast<std::size_t>(cfg.n_papers));
  for (auto& [day_no, p] : drafts) {
    day_no = pick_day(rng);
    p.pub_date = year_month_day{sys_days{days{day_no}}};
    p.gender = kKnownCategories[static_cast<std::size_t>(pick_gender(rng))];
    p.rank = kAllRanks[static_cast<std::size_t>(pick_rank(rng))];
    p.country = "C" + std::to_string(pick_country(rng));
    p.topic = "T" + std::to_string(pick_topic(rng));
    p.subfield = "S" + std::to_string(pick_subfield(rng));
    p.first_author = "a" + std::to_string(pick_author(rng));
    p.last_author = "a" + std::to_string(pick_author(rng));
  }
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  SyntheticCorpus out;
  out.papers.reserve(drafts.size());
  const int width = static_cast<int>(std::to_string(cfg.n_papers).size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "P%0*zu", width, i + 1);
    drafts[i].second.id = id;
    out.papers.push_back(std::move(drafts[i].second));
  }

  // Ids follow generation order, so index order is already (date, id) order.
  const EligibilityIndex index(out.papers, AttributeSet{});
  const auto& papers = out.papers;
  std::vector<double> received(papers.size(), 0.0);
  std::uniform_int_distribution<int> pick_degree(cfg.out_degree_min, cfg.out_degree_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weight;

  for (const NodeIndex i : index.date_order()) {
    const auto candidates = index.random_set(i);
    const int k = std::min<int>(pick_degree(rng), static_cast<int>(candidates.size()));
    if (k == 0) continue;
    const Paper& citer = papers[i];
    weight.resize(candidates.size());
    double total = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const Paper& p = papers[candidates[c]];
      double w = 1.0 + cfg.pa_strength * received[candidates[c]];
      const double affinity = cfg.homophily[0] * (p.rank == citer.rank) +
                              cfg.homophily[1] * (p.country == citer.country) +
                              cfg.homophily[2] * (p.topic == citer.topic);
      if (affinity != 0.0) w *= std::exp(affinity);
      if (has_woman_author(p.gender) && (!cfg.bias_rank || p.rank == *cfg.bias_rank)) {
        w *= cfg.gender_bias;
      }
      weight[c] = w;
      total += w;
    }
    auto positive = std::count_if(weight.begin(), weight.end(), [](double w) { return w > 0; });
    std::vector<NodeIndex> chosen;
    for (int draw = 0; draw < k && positive > 0; ++draw, --positive) {
      double target = unit(rng) * total;
      std::size_t c = 0;
      for (; c + 1 < candidates.size(); ++c) {
        if (weight[c] <= 0) continue;
        if (target < weight[c]) break;
        target -= weight[c];
      }
      while (weight[c] <= 0) --c;  // rounding landed past the last positive weight
      chosen.push_back(candidates[c]);
      total -= weight[c];
      weight[c] = 0;
    }
    for (const NodeIndex j : chosen) {
      out.citations.emplace_back(citer.id, papers[j].id);
      received[j] += 1.0;
    }
  }
  return out;
}

CitationNetwork generate_network(const SynthConfig& cfg) {
  auto corpus = generate_corpus(cfg);
  return filter_citations(std::move(corpus.papers), corpus.citations);
}

double closed_form_bias_over_under(const SynthConfig& cfg) {
  const auto& w = cfg.category_weights;
  const double q = (w[1] + w[2] + w[3]) / (w[0] + w[1] + w[2] + w[3]);
  const double b = cfg.gender_bias;
  return b / (b * q + 1.0 - q) - 1.0;
}

void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
  std::filesystem::create_directories(dir);
  std::ofstream papers(dir / "papers.tsv");
  write_papers(papers, corpus.papers);
  std::ofstream cites(dir / "citations.tsv");
  cites << kCitationTableHeader << '\n';
  for (const auto& [a, b] : corpus.citations) cites << a << '\t' << b << '\n';
}

}  // namespace citeimb
