#include "citeimb/archive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

namespace citeimb {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw ArchiveError("SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(byte, sizeof byte, "%02x", digest[k]);
    hex += byte;
  }
  return hex;
}

CorpusSummary summarize(const CitationNetwork& net) {
  CorpusSummary s;
  s.papers = net.size();
  s.citations = net.num_citations();
  for (const auto g : kKnownCategories) s.by_gender[std::string(to_string(g))] = 0;
  s.by_gender["unknown"] = 0;
  for (const auto& p : net.papers()) {
    ++s.by_gender[p.gender == GenderCategory::Unknown ? "unknown" : std::string(to_string(p.gender))];
    ++s.by_rank[std::string(to_string(p.rank))];
    ++s.by_subfield[p.subfield];
    const int y = static_cast<int>(p.pub_date.year());
    s.first_year = s.first_year == 0 ? y : std::min(s.first_year, y);
    s.last_year = std::max(s.last_year, y);
  }
  return s;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArchiveError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot read " + path.string());
  return in;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_archive(const fs::path& dir, const CitationNetwork& net) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "papers.tsv");
    write_papers(out, net.papers());
  }
  {
    auto out = open_out(dir / "citations.tsv");
    out << kCitationTableHeader << '\n';
    for (const auto& e : net.edges()) {
      out << net.paper(e.citing).id << '\t' << net.paper(e.cited).id << '\n';
    }
  }
  const auto s = summarize(net);
  json j;
  j["papers"] = s.papers;
  j["citations"] = s.citations;
  j["first_year"] = s.first_year;
  j["last_year"] = s.last_year;
  j["by_gender"] = s.by_gender;
  j["by_rank"] = s.by_rank;
  j["by_subfield"] = s.by_subfield;
  auto out = open_out(dir / "summary.json");
  out << j.dump(2) << '\n';
}

CitationNetwork load_archive(const fs::path& dir) {
  auto papers_in = open_in(dir / "papers.tsv");
  auto cites_in = open_in(dir / "citations.tsv");
  auto papers = parse_papers(papers_in);
  const auto raw = parse_citations(cites_in);
  std::unordered_map<std::string_view, NodeIndex> index;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    index.emplace(papers[i].id, static_cast<NodeIndex>(i));
  }
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) {
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw ArchiveError("archive citation " + a + " -> " + b + " names an unknown paper");
    }
    edges.push_back({ia->second, ib->second});
  }
  try {
    return CitationNetwork(std::move(papers), std::move(edges));
  } catch (const std::exception& e) {
    throw ArchiveError(std::string("invalid archive: ") + e.what());
  }
}

void write_model_artifact(const fs::path& dir, const ModelSpec& spec,
                          const ExpectedCitations<double>& ec, const CitationNetwork& net) {
  fs::create_directories(dir);
  json j;
  j["model"] = std::string(to_string(spec.model));
  j["attributes"] = spec.model == Model::RD ? std::string() : spec.attributes.to_string();
  j["exact"] = spec.exact;
  j["tie_tolerance"] = spec.tie_tolerance;
  j["papers"] = net.size();
  j["citations"] = net.num_citations();
  {
    auto out = open_out(dir / "model.json");
    out << j.dump(2) << '\n';
  }
  auto out = open_out(dir / "expected.tsv");
  out << "paper_id\tc_bar\n";
  for (NodeIndex i = 0; i < net.size(); ++i) {
    out << net.paper(i).id << '\t' << fmt(ec.c_bar(i)) << '\n';
  }
}

void write_groups(const fs::path& path, const ExpectedCitations<double>& ec,
                  const CitationNetwork& net) {
  auto out = open_out(path);
  out << "citing_id\tmember_count\tweight\tmember_ids\n";
  for (const auto& g : ec.groups) {
    out << net.paper(g.citing).id << '\t' << g.members.size() << '\t' << fmt(g.weight_per_member);
    for (const NodeIndex j : g.members) out << '\t' << net.paper(j).id;
    out << '\n';
  }
}

ModelArtifact load_model_artifact(const fs::path& dir, const CitationNetwork& net) {
  auto in = open_in(dir / "model.json");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ArchiveError("model.json: " + std::string(e.what()));
  }
  ModelArtifact a;
  try {
    const auto model = parse_model(j.at("model").get<std::string>());
    if (!model) throw ArchiveError("model.json: unknown model");
    a.spec.model = *model;
    a.spec.attributes = AttributeSet::parse(j.at("attributes").get<std::string>());
    a.spec.exact = j.at("exact").get<bool>();
    a.spec.tie_tolerance = j.at("tie_tolerance").get<double>();
    if (j.at("papers").get<std::int64_t>() != net.size() ||
        j.at("citations").get<std::int64_t>() != net.num_citations()) {
      throw ArchiveError("model artifact was built on a different network");
    }
  } catch (const json::exception& e) {
    throw ArchiveError("model.json: " + std::string(e.what()));
  }

  a.expected = build_model(net, a.spec);
  auto table = open_in(dir / "expected.tsv");
  std::string line;
  std::getline(table, line);
  if (line != "paper_id\tc_bar") throw ArchiveError("expected.tsv: bad header");
  NodeIndex i = 0;
  while (std::getline(table, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (i >= net.size() || tab == std::string::npos || line.substr(0, tab) != net.paper(i).id) {
      throw ArchiveError("expected.tsv does not match the archive's papers");
    }
    const double stored = std::strtod(line.c_str() + tab + 1, nullptr);
    if (std::abs(stored - a.expected.c_bar(i)) > 1e-9) {
      throw ArchiveError("expected.tsv disagrees with its recipe at paper " + net.paper(i).id);
    }
    ++i;
  }
  if (i != net.size()) throw ArchiveError("expected.tsv does not match the archive's papers");
  return a;
}

void record_outputs(RunManifest& m, const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    m.outputs.emplace_back(fs::relative(f, dir).generic_string(), sha256_file(f));
  }
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["command_line"] = m.command_line;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["model"] = m.model ? json(*m.model) : json(nullptr);
  j["attributes"] = m.attributes ? json(*m.attributes) : json(nullptr);
  j["bootstrap_resamples"] = m.resamples ? json(*m.resamples) : json(nullptr);
  json inputs = json::array();
  for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"sha256", digest}});
  j["inputs"] = inputs;
  json outputs = json::array();
  for (const auto& [path, digest] : m.outputs) outputs.push_back({{"path", path}, {"sha256", digest}});
  j["outputs"] = outputs;
  if (m.timestamp) j["timestamp"] = *m.timestamp;
  fs::create_directories(dir);
  auto out = open_out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace citeimb
