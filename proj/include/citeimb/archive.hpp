#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "citeimb/corpus.hpp"
#include "citeimb/refmodels.hpp"

namespace citeimb {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct CorpusSummary {
  std::int64_t papers = 0;
  std::int64_t citations = 0;
  std::map<std::string, std::int64_t> by_gender;  // MM, MW, WM, WW, unknown
  std::map<std::string, std::int64_t> by_rank;
  std::map<std::string, std::int64_t> by_subfield;
  int first_year = 0;
  int last_year = 0;
};

CorpusSummary summarize(const CitationNetwork& net);

/// A network archive is a directory holding papers.tsv, citations.tsv and
/// summary.json. The tables use the same formats as ingest input.
void write_archive(const std::filesystem::path& dir, const CitationNetwork& net);

/// Reads an archive without re-filtering; the tables must already describe a
/// valid network.
CitationNetwork load_archive(const std::filesystem::path& dir);

/// model.json (the recipe) plus expected.tsv (paper_id, c_bar).
void write_model_artifact(const std::filesystem::path& dir, const ModelSpec& spec,
                          const ExpectedCitations<double>& ec, const CitationNetwork& net);

/// Diagnostic dump: `citing_id member_count weight member_ids...`, one group
/// per line.
void write_groups(const std::filesystem::path& path, const ExpectedCitations<double>& ec,
                  const CitationNetwork& net);

struct ModelArtifact {
  ModelSpec spec;
  ExpectedCitations<double> expected;
};

/// Rebuilds the model from its recipe and checks the stored c_bar against it
/// (per paper, absolute 1e-9). Throws ArchiveError when the artifact belongs
/// to a different network.
ModelArtifact load_model_artifact(const std::filesystem::path& dir, const CitationNetwork& net);

struct RunManifest {
  std::vector<std::string> command_line;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // file name, sha256
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<std::string> attributes;
  std::optional<int> resamples;  // bootstrap S
  std::string tool_version{kToolVersion};
  /// Seconds since the epoch from SOURCE_DATE_EPOCH; omitted otherwise so
  /// reruns stay byte-identical.
  std::optional<std::int64_t> timestamp;
};

/// Adds a digest entry for every regular file in `dir` except manifest.json,
/// in file-name order.
void record_outputs(RunManifest& m, const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace citeimb
