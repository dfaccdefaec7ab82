#include "citeimb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "citeimb/log.hpp"

namespace citeimb {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view chomp(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Reads the header line; returns false on an empty stream.
bool expect_header(std::istream& in, std::string_view header, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (chomp(line) != header) {
    throw ParseError(line_no, "expected header '" + std::string(header) + "'");
  }
  return true;
}

}  // namespace

std::string_view to_string(GenderCategory g) {
  switch (g) {
    case GenderCategory::MM: return "MM";
    case GenderCategory::MW: return "MW";
    case GenderCategory::WM: return "WM";
    case GenderCategory::WW: return "WW";
    case GenderCategory::Unknown: break;
  }
  return "UNKNOWN";
}

std::string_view to_string(ConferenceRank r) {
  switch (r) {
    case ConferenceRank::AStar: return "A*";
    case ConferenceRank::A: return "A";
    case ConferenceRank::B: return "B";
    case ConferenceRank::C: return "C";
    case ConferenceRank::Unranked: break;
  }
  return "Unranked";
}

std::optional<GenderCategory> parse_gender_category(std::string_view token) {
  if (token == "MM") return GenderCategory::MM;
  if (token == "MW") return GenderCategory::MW;
  if (token == "WM") return GenderCategory::WM;
  if (token == "WW") return GenderCategory::WW;
  if (token == "UNKNOWN") return GenderCategory::Unknown;
  return std::nullopt;
}

std::optional<ConferenceRank> parse_rank(std::string_view token) {
  if (token == "A*") return ConferenceRank::AStar;
  if (token == "A") return ConferenceRank::A;
  if (token == "B") return ConferenceRank::B;
  if (token == "C") return ConferenceRank::C;
  if (token == "Unranked") return ConferenceRank::Unranked;
  return std::nullopt;
}

GenderCategory gender_category(Gender first, Gender last, bool sole_author) {
  if (sole_author) last = first;
  if (first == Gender::Unknown || last == Gender::Unknown) return GenderCategory::Unknown;
  if (first == Gender::M) return last == Gender::M ? GenderCategory::MM : GenderCategory::MW;
  return last == Gender::M ? GenderCategory::WM : GenderCategory::WW;
}

std::optional<Date> parse_date(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  if (text.size() == 4) {
    const auto y = parse_int<int>(text);
    if (!y) return std::nullopt;
    return year_month_day{year{*y}, January, day{1}};
  }
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_int<int>(text.substr(0, 4));
  const auto m = parse_int<unsigned>(text.substr(5, 2));
  const auto d = parse_int<unsigned>(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const year_month_day ymd{year{*y}, month{*m}, day{*d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date citation_window_start(Date d) {
  using namespace std::chrono;
  Date shifted = d - years{10};
  if (!shifted.ok()) shifted = year_month_day{year_month_day_last{shifted.year(), month_day_last{shifted.month()}}};
  return shifted;
}

bool shares_both_authors(const Paper& citing, const Paper& cited) {
  const auto is_author = [&](const std::string& a) {
    return a == citing.first_author || a == citing.last_author;
  };
  return is_author(cited.first_author) && is_author(cited.last_author);
}

std::vector<Paper> parse_papers(std::istream& in) {
  std::vector<Paper> papers;
  std::size_t line_no = 0;
  if (!expect_header(in, kPaperTableHeader, line_no)) {
    throw ParseError(1, "missing paper table header");
  }
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 9) {
      throw ParseError(line_no, "expected 9 columns, got " + std::to_string(cols.size()));
    }
    Paper p;
    p.id = std::string(cols[0]);
    if (p.id.empty()) throw ParseError(line_no, "empty paper id");
    const auto date = parse_date(cols[1]);
    if (!date) throw ParseError(line_no, "invalid date '" + std::string(cols[1]) + "'");
    p.pub_date = *date;
    if (const auto g = parse_gender_category(cols[2])) {
      p.gender = *g;
    } else {
      warn("line " + std::to_string(line_no) + ": unknown gender category '" +
           std::string(cols[2]) + "', using UNKNOWN");
    }
    if (const auto r = parse_rank(cols[3])) {
      p.rank = *r;
    } else {
      warn("line " + std::to_string(line_no) + ": unknown conference rank '" +
           std::string(cols[3]) + "', using Unranked");
    }
    p.country = std::string(cols[4]);
    p.topic = std::string(cols[5]);
    p.subfield = std::string(cols[6]);
    p.first_author = std::string(cols[7]);
    p.last_author = std::string(cols[8]);
    if (p.last_author.empty()) p.last_author = p.first_author;
    if (p.first_author.empty()) p.first_author = p.last_author;
    papers.push_back(std::move(p));
  }
  return papers;
}

std::vector<std::pair<std::string, std::string>> parse_citations(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::size_t line_no = 0;
  if (!expect_header(in, kCitationTableHeader, line_no)) return edges;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw ParseError(line_no, "expected 'citing_id<TAB>cited_id'");
    }
    edges.emplace_back(std::string(cols[0]), std::string(cols[1]));
  }
  return edges;
}

void write_papers(std::ostream& out, std::span<const Paper> papers) {
  out << kPaperTableHeader << '\n';
  for (const auto& p : papers) {
    out << p.id << '\t' << format_date(p.pub_date) << '\t' << to_string(p.gender) << '\t'
        << to_string(p.rank) << '\t' << p.country << '\t' << p.topic << '\t' << p.subfield
        << '\t' << p.first_author << '\t' << p.last_author << '\n';
  }
}

// ---------------------------------------------------------------------------

AttributeSet AttributeSet::parse(std::string_view csv) {
  AttributeSet s;
  csv = trim(csv);
  if (csv.empty() || csv == "none") return s;
  for (auto tok : split(csv, ',')) {
    tok = trim(tok);
    if (tok == "rank") s = s.with(Attribute::Rank);
    else if (tok == "country") s = s.with(Attribute::Country);
    else if (tok == "topic") s = s.with(Attribute::Topic);
    else throw std::invalid_argument("unknown attribute '" + std::string(tok) + "'");
  }
  return s;
}

std::string AttributeSet::to_string() const {
  std::string out;
  const auto add = [&](Attribute a, const char* name) {
    if (!contains(a)) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(Attribute::Rank, "rank");
  add(Attribute::Country, "country");
  add(Attribute::Topic, "topic");
  return out;
}

std::string_view attribute_value(const Paper& p, Attribute a) {
  switch (a) {
    case Attribute::Rank: return to_string(p.rank);
    case Attribute::Country: return p.country;
    case Attribute::Topic: return p.topic;
  }
  return {};
}

CategoryKey category_key(const Paper& p, AttributeSet attrs) {
  CategoryKey key;
  for (const auto a : {Attribute::Rank, Attribute::Country, Attribute::Topic}) {
    if (attrs.contains(a)) key.emplace_back(attribute_value(p, a));
  }
  return key;
}

// ---------------------------------------------------------------------------

CitationNetwork::CitationNetwork(std::vector<Paper> papers, std::vector<Edge> edges)
    : papers_(std::move(papers)), edges_(std::move(edges)) {
  const auto n = static_cast<NodeIndex>(papers_.size());
  index_.reserve(papers_.size());
  for (NodeIndex i = 0; i < n; ++i) {
    if (!index_.emplace(papers_[i].id, i).second) {
      throw IngestError("duplicate paper id '" + papers_[i].id + "'");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    if (u < 0 || u >= n || v < 0 || v >= n) throw IngestError("edge endpoint out of range");
    if (u == v) throw IngestError("self-citation on paper '" + papers_[u].id + "'");
    if (e > 0 && edges_[e - 1] == edges_[e]) {
      throw IngestError("duplicate citation " + papers_[u].id + " -> " + papers_[v].id);
    }
  }

  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.citing + 1];
    ++in_offsets_[e.cited + 1];
  }
  for (NodeIndex i = 0; i < n; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_targets_.resize(edges_.size());
  in_sources_.resize(edges_.size());
  auto in_fill = in_offsets_;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    out_targets_[e] = edges_[e].cited;  // edges are sorted by citing
    in_sources_[in_fill[edges_[e].cited]++] = edges_[e].citing;
  }
  for (NodeIndex i = 0; i < n; ++i) {
    if (out_degree(i) + in_degree(i) == 0) {
      throw IngestError("paper '" + papers_[i].id + "' neither makes nor receives citations");
    }
  }
}

std::optional<NodeIndex> CitationNetwork::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CitationNetwork filter_citations(std::vector<Paper> papers,
                                 std::span<const std::pair<std::string, std::string>> raw_edges) {
  std::unordered_map<std::string_view, NodeIndex> index;
  index.reserve(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i) {
    if (!index.emplace(papers[i].id, static_cast<NodeIndex>(i)).second) {
      throw IngestError("duplicate paper id '" + papers[i].id + "'");
    }
  }

  std::vector<Edge> kept;
  kept.reserve(raw_edges.size());
  for (const auto& [from, to] : raw_edges) {
    const auto u = index.find(from);
    const auto v = index.find(to);
    if (u == index.end() || v == index.end()) {
      throw IngestError("citation " + from + " -> " + to + ": unknown paper id '" +
                        (u == index.end() ? from : to) + "'");
    }
    const Paper& citing = papers[u->second];
    const Paper& cited = papers[v->second];
    if (u->second == v->second) continue;
    if (cited.pub_date < citation_window_start(citing.pub_date)) continue;
    if (shares_both_authors(citing, cited)) continue;
    kept.push_back({u->second, v->second});
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  std::vector<char> touched(papers.size(), 0);
  for (const auto& e : kept) touched[e.citing] = touched[e.cited] = 1;
  std::vector<NodeIndex> remap(papers.size(), -1);
  std::vector<Paper> survivors;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    if (!touched[i]) continue;
    remap[i] = static_cast<NodeIndex>(survivors.size());
    survivors.push_back(std::move(papers[i]));
  }
  for (auto& e : kept) e = {remap[e.citing], remap[e.cited]};
  return CitationNetwork(std::move(survivors), std::move(kept));
}

// ---------------------------------------------------------------------------

namespace {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = c >= 0xF0 ? 3 : c >= 0xE0 ? 2 : c >= 0xC0 ? 1 : 0;
    if (c >= 0x80 && c < 0xC0) extra = 0;  // stray continuation byte
    if (extra > 0 && i + extra >= s.size()) extra = 0;
    char32_t cp = extra == 0 ? c : c & (0x3F >> extra);
    bool valid = true;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!valid) {
      out.push_back(c);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

}  // namespace

std::size_t utf8_length(std::string_view s) { return decode_utf8(s).size(); }

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const auto s = decode_utf8(a);
  const auto t = decode_utf8(b);
  std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (const char ch : title) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

std::string last_name(std::string_view author) {
  author = trim(author);
  const auto pos = author.find_last_of(" \t");
  return std::string(pos == std::string_view::npos ? author : author.substr(pos + 1));
}

bool match_records(const PublicationRecord& a, const PublicationRecord& b) {
  if (a.year != b.year) return false;
  auto names_a = a.author_last_names;
  auto names_b = b.author_last_names;
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) return false;
  const auto ta = normalize_title(a.title);
  const auto tb = normalize_title(b.title);
  const auto longer = std::max(utf8_length(ta), utf8_length(tb));
  if (longer == 0) return false;
  return static_cast<double>(levenshtein(ta, tb)) / static_cast<double>(longer) <=
         kTitleDistanceThreshold;
}

std::vector<PublicationRecord> parse_records(std::istream& in) {
  std::vector<PublicationRecord> records;
  std::size_t line_no = 0;
  if (!expect_header(in, "title\tyear\tlast_names", line_no)) return records;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 3) throw ParseError(line_no, "expected 3 columns");
    PublicationRecord r;
    r.title = std::string(cols[0]);
    const auto y = parse_int<int>(trim(cols[1]));
    if (!y) throw ParseError(line_no, "invalid year '" + std::string(cols[1]) + "'");
    r.year = *y;
    for (const auto name : split(cols[2], ';')) {
      if (!trim(name).empty()) r.author_last_names.push_back(last_name(name));
    }
    if (r.author_last_names.empty()) throw ParseError(line_no, "record without authors");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace citeimb
