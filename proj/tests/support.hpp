#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "citeimb/corpus.hpp"

namespace testing {

using namespace citeimb;

inline Paper paper(std::string id, std::string date, GenderCategory g,
                   ConferenceRank r = ConferenceRank::AStar, std::string country = "US",
                   std::string topic = "T1", std::string first = "", std::string last = "",
                   std::string subfield = "S1") {
  Paper p;
  p.pub_date = *parse_date(date);
  p.gender = g;
  p.rank = r;
  p.country = std::move(country);
  p.topic = std::move(topic);
  p.subfield = std::move(subfield);
  p.first_author = first.empty() ? id + "-first" : std::move(first);
  p.last_author = last.empty() ? id + "-last" : std::move(last);
  p.id = std::move(id);
  return p;
}

// Builds a network without filtering; edges are given by paper id.
inline CitationNetwork network(std::vector<Paper> papers,
                               const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<Edge> e;
  for (const auto& [a, b] : edges) {
    NodeIndex ia = -1, ib = -1;
    for (std::size_t k = 0; k < papers.size(); ++k) {
      if (papers[k].id == a) ia = static_cast<NodeIndex>(k);
      if (papers[k].id == b) ib = static_cast<NodeIndex>(k);
    }
    e.push_back({ia, ib});
  }
  return CitationNetwork(std::move(papers), std::move(e));
}

// Four papers with distinct authors: P1 (2010, MM), P2 (2010, WW), P3 (2011,
// MM, topic T2), P4 (2012, WW). P3 cites P1; P4 cites P1 and P2.
inline CitationNetwork toy4() {
  using G = GenderCategory;
  return network({paper("P1", "2010-01-01", G::MM), paper("P2", "2010-01-01", G::WW),
                  paper("P3", "2011-01-01", G::MM, ConferenceRank::AStar, "US", "T2"),
                  paper("P4", "2012-01-01", G::WW)},
                 {{"P3", "P1"}, {"P4", "P1"}, {"P4", "P2"}});
}

// P1 and P2 share a category; P3 has P2's authors, so P2 is not a candidate
// for it. After P3 cites P1, P1 is ahead of P2 when P4 cites P1.
inline CitationNetwork toy_pd() {
  using G = GenderCategory;
  using R = ConferenceRank;
  return network({paper("P0", "2009-01-01", G::MM, R::AStar, "US", "T9"),
                  paper("P1", "2010-01-01", G::WW, R::AStar, "US", "T1"),
                  paper("P2", "2011-01-01", G::MM, R::AStar, "US", "T1", "b1", "b2"),
                  paper("P3", "2012-01-01", G::MW, R::B, "DE", "T2", "b1", "b2"),
                  paper("P4", "2013-01-01", G::WM, R::B, "DE", "T2")},
                 {{"P2", "P0"}, {"P3", "P1"}, {"P4", "P1"}});
}

// Random small network: papers over a few years, a few attribute values and a
// small author pool so author exclusions occur. Papers left isolated are
// dropped by filter_citations.
inline CitationNetwork random_network(int n, double edge_prob, std::uint64_t seed,
                                      int n_topics = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> day(0, 6 * 365);
  std::uniform_int_distribution<int> gender(0, 3), rank(0, 2), country(0, 1), topic(0, n_topics - 1),
      author(0, n / 2);
  std::bernoulli_distribution cite(edge_prob);
  std::vector<Paper> papers;
  for (int i = 0; i < n; ++i) {
    Paper p;
    p.id = "R" + std::to_string(i);
    p.pub_date = std::chrono::year_month_day{std::chrono::sys_days{
        std::chrono::year{2005} / std::chrono::January / 1} + std::chrono::days{day(rng)}};
    p.gender = kKnownCategories[static_cast<std::size_t>(gender(rng))];
    p.rank = kAllRanks[static_cast<std::size_t>(rank(rng))];
    p.country = "C" + std::to_string(country(rng));
    p.topic = "T" + std::to_string(topic(rng));
    p.subfield = "S" + std::to_string(i % 2);
    p.first_author = "a" + std::to_string(author(rng));
    p.last_author = "a" + std::to_string(author(rng));
    papers.push_back(std::move(p));
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || papers[j].pub_date > papers[i].pub_date) continue;
      if (cite(rng)) edges.emplace_back(papers[i].id, papers[j].id);
    }
  }
  return filter_citations(std::move(papers), edges);
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("citeimb-" + name + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Exact element-wise equality; Eigen's operator== does not compile for
// multiprecision scalars.
template <class A, class B>
bool same(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (!(a(r, c) == b(r, c))) return false;
  return true;
}

}  // namespace testing
