#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "citeimb/corpus.hpp"

namespace citeimb {

/// Parameters of the synthetic citation process. Papers are generated in
/// date order; paper i picks its references without replacement from its
/// eligible predecessors with weight
///   (1 + pa_strength * c_j) * exp(sum_a homophily[a] * [attr_a(i) == attr_a(j)])
///     * (gender_bias if j has a woman first or last author)
/// where c_j counts citations received so far.
struct SynthConfig {
  int n_papers = 1000;
  int start_year = 2000;
  int end_year = 2019;
  std::array<double, 4> category_weights = {0.7, 0.1, 0.1, 0.1};  // MM, MW, WM, WW
  int n_ranks = 4;  // drawn from A*, A, B, C
  int n_countries = 5;
  int n_topics = 10;
  int n_subfields = 3;
  int n_authors = 5000;
  int out_degree_min = 3;
  int out_degree_max = 8;
  std::array<double, 3> homophily = {0, 0, 0};  // rank, country, topic
  double pa_strength = 0;
  double gender_bias = 1;
  std::optional<ConferenceRank> bias_rank;  // restrict the bias to targets of this rank
  std::uint64_t seed = 1;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const SynthConfig& cfg);

/// Flat `key = value` lines; `#` starts a comment.
SynthConfig parse_synth_config(std::istream& in);
void write_synth_config(std::ostream& out, const SynthConfig& cfg);

struct SyntheticCorpus {
  std::vector<Paper> papers;
  std::vector<std::pair<std::string, std::string>> citations;
};

/// Raw generated tables; each paper's out-degree is drawn uniformly from
/// [out_degree_min, out_degree_max] and capped at its eligible-set size.
SyntheticCorpus generate_corpus(const SynthConfig& cfg);

/// generate_corpus followed by filter_citations.
CitationNetwork generate_network(const SynthConfig& cfg);

/// Large-N over/under-citation of a woman-authored category under the
/// random-draws model when only `gender_bias` is active:
///   b / (b q + 1 - q) - 1, q = share of papers with a woman first or last author.
double closed_form_bias_over_under(const SynthConfig& cfg);

void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus);

}  // namespace citeimb
