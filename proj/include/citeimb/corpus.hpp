#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace citeimb {

using Date = std::chrono::year_month_day;
using NodeIndex = std::int32_t;

enum class Gender : std::uint8_t { M, W, Unknown };

// First letter: first author, second letter: last author.
enum class GenderCategory : std::uint8_t { MM = 0, MW = 1, WM = 2, WW = 3, Unknown = 4 };

inline constexpr std::array<GenderCategory, 4> kKnownCategories = {
    GenderCategory::MM, GenderCategory::MW, GenderCategory::WM, GenderCategory::WW};

enum class ConferenceRank : std::uint8_t { AStar, A, B, C, Unranked };

inline constexpr std::array<ConferenceRank, 5> kAllRanks = {
    ConferenceRank::AStar, ConferenceRank::A, ConferenceRank::B, ConferenceRank::C,
    ConferenceRank::Unranked};

std::string_view to_string(GenderCategory g);
std::string_view to_string(ConferenceRank r);
std::optional<GenderCategory> parse_gender_category(std::string_view token);
std::optional<ConferenceRank> parse_rank(std::string_view token);

// Any category with a W in either slot.
inline bool has_woman_author(GenderCategory g) {
  return g == GenderCategory::MW || g == GenderCategory::WM || g == GenderCategory::WW;
}

GenderCategory gender_category(Gender first, Gender last, bool sole_author);

struct Paper {
  std::string id;
  Date pub_date;
  GenderCategory gender = GenderCategory::Unknown;
  ConferenceRank rank = ConferenceRank::Unranked;
  std::string country;
  std::string topic;
  std::string subfield;
  std::string first_author;
  std::string last_author;
};

/// Parses `YYYY-MM-DD` or a bare `YYYY` (mapped to January 1).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Earliest publication date a paper dated `d` may still cite: `d` minus ten
/// calendar years, with Feb 29 clamped to Feb 28 in non-leap targets.
Date citation_window_start(Date d);

/// True when both the first and the last author of `cited` are among the
/// first/last authors of `citing`.
bool shares_both_authors(const Paper& citing, const Paper& cited);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kPaperTableHeader =
    "id\tpub_date\tgender\trank\tcountry\ttopic\tsubfield\tfirst_author\tlast_author";
inline constexpr std::string_view kCitationTableHeader = "citing_id\tcited_id";

std::vector<Paper> parse_papers(std::istream& in);
std::vector<std::pair<std::string, std::string>> parse_citations(std::istream& in);

void write_papers(std::ostream& out, std::span<const Paper> papers);

// ---------------------------------------------------------------------------
// Attribute projections used for homophilic grouping.

enum class Attribute : std::uint8_t { Rank = 0, Country = 1, Topic = 2 };

class AttributeSet {
 public:
  constexpr AttributeSet() = default;
  static constexpr AttributeSet all() { return AttributeSet(0b111); }
  static AttributeSet parse(std::string_view csv);  // "rank,country,topic"; "" or "none" is empty

  constexpr AttributeSet with(Attribute a) const {
    return AttributeSet(bits_ | (1u << static_cast<unsigned>(a)));
  }
  constexpr bool contains(Attribute a) const { return bits_ & (1u << static_cast<unsigned>(a)); }
  constexpr bool empty() const { return bits_ == 0; }
  std::string to_string() const;

  friend constexpr bool operator==(AttributeSet, AttributeSet) = default;

 private:
  constexpr explicit AttributeSet(unsigned bits) : bits_(bits) {}
  unsigned bits_ = 0;
};

std::string_view attribute_value(const Paper& p, Attribute a);

using CategoryKey = std::vector<std::string>;

/// Projection of `p` onto `attrs` in rank, country, topic order.
CategoryKey category_key(const Paper& p, AttributeSet attrs);

// ---------------------------------------------------------------------------

struct Edge {
  NodeIndex citing;
  NodeIndex cited;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple directed citation graph. Node ids are positions in
/// `papers()`. Construction validates: unique paper ids, in-range endpoints,
/// no self-loops, no duplicate edges, and no isolated papers.
class CitationNetwork {
 public:
  CitationNetwork() = default;
  CitationNetwork(std::vector<Paper> papers, std::vector<Edge> edges);

  NodeIndex size() const { return static_cast<NodeIndex>(papers_.size()); }
  std::int64_t num_citations() const { return static_cast<std::int64_t>(edges_.size()); }
  bool empty() const { return papers_.empty(); }

  const std::vector<Paper>& papers() const { return papers_; }
  const Paper& paper(NodeIndex i) const { return papers_[static_cast<std::size_t>(i)]; }
  /// Sorted by (citing, cited).
  const std::vector<Edge>& edges() const { return edges_; }

  int out_degree(NodeIndex i) const { return out_offsets_[i + 1] - out_offsets_[i]; }
  int in_degree(NodeIndex j) const { return in_offsets_[j + 1] - in_offsets_[j]; }

  /// Papers cited by `i`, ascending.
  std::span<const NodeIndex> cited_by(NodeIndex i) const {
    return {out_targets_.data() + out_offsets_[i], static_cast<std::size_t>(out_degree(i))};
  }
  /// Papers citing `j`, ascending.
  std::span<const NodeIndex> citers_of(NodeIndex j) const {
    return {in_sources_.data() + in_offsets_[j], static_cast<std::size_t>(in_degree(j))};
  }

  std::optional<NodeIndex> find(std::string_view id) const;

 private:
  std::vector<Paper> papers_;
  std::vector<Edge> edges_;
  std::vector<int> out_offsets_{0};
  std::vector<NodeIndex> out_targets_;
  std::vector<int> in_offsets_{0};
  std::vector<NodeIndex> in_sources_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Applies the citation filters (ten-year window, shared first+last authors),
/// collapses duplicates, drops papers left without any citation, and
/// reindexes the survivors in input order.
CitationNetwork filter_citations(std::vector<Paper> papers,
                                 std::span<const std::pair<std::string, std::string>> raw_edges);

// ---------------------------------------------------------------------------
// Record matching between bibliographic sources.

struct PublicationRecord {
  std::string title;
  int year = 0;
  std::vector<std::string> author_last_names;
};

/// Edit distance over Unicode code points (UTF-8 input).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Lower-cases ASCII letters and collapses runs of whitespace.
std::string normalize_title(std::string_view title);

/// Final whitespace-separated token of an author name.
std::string last_name(std::string_view author);

std::size_t utf8_length(std::string_view s);

inline constexpr double kTitleDistanceThreshold = 0.25;

bool match_records(const PublicationRecord& a, const PublicationRecord& b);

std::vector<PublicationRecord> parse_records(std::istream& in);

}  // namespace citeimb
