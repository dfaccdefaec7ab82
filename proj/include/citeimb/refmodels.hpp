#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "citeimb/corpus.hpp"
#include "citeimb/scalar.hpp"

namespace citeimb {

// Random draws (RD), homophilic draws (HD), preferential draws (PD).
enum class Model : std::uint8_t { RD, HD, PD };

std::string_view to_string(Model m);
std::optional<Model> parse_model(std::string_view token);

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A uniform draw over `members` made on behalf of the observed citations
/// `citing -> s` for every s in `sources`. Each member receives
/// |sources| / |members| expected citations from `citing`.
template <class Scalar>
struct ContributionGroup {
  NodeIndex citing = 0;
  std::vector<NodeIndex> members;  // ascending
  std::vector<NodeIndex> sources;  // ascending
  Scalar weight_per_member{};
};

/// Expected citation weights of a reference model, stored as groups rather
/// than a dense N x N matrix. `c_bar[j]` is the expected number of citations
/// paper j receives.
template <class Scalar>
struct ExpectedCitations {
  Model model = Model::RD;
  AttributeSet attributes;
  NodeIndex num_papers = 0;
  std::vector<ContributionGroup<Scalar>> groups;
  VectorX<Scalar> c_bar;
};

struct PreferentialOptions {
  /// Absolute tolerance when comparing running expected counts in floating
  /// point; ignored for exact rationals.
  double tie_tolerance = 1e-9;
};

template <class Scalar>
ExpectedCitations<Scalar> random_draws(const CitationNetwork& net);

template <class Scalar>
ExpectedCitations<Scalar> homophilic_draws(const CitationNetwork& net, AttributeSet attrs);

/// Processes citers in (pub_date, id) order. A citation i -> i' is redrawn
/// among the homophilic candidates whose running expected in-citations equal
/// that of i' before i is processed; all citations of one paper read the same
/// state.
template <class Scalar>
ExpectedCitations<Scalar> preferential_draws(const CitationNetwork& net, AttributeSet attrs,
                                             PreferentialOptions opts = {});

/// w_ij: expected number of citations from i to j.
template <class Scalar>
Scalar citation_probability(const ExpectedCitations<Scalar>& ec, NodeIndex i, NodeIndex j);

/// Dense w matrix; for small networks and tests.
template <class Scalar>
MatrixX<Scalar> dense_weights(const ExpectedCitations<Scalar>& ec);

ExpectedCitations<double> to_double(const ExpectedCitations<Rational>& ec);

/// The observed network written as singleton groups, one per edge.
ExpectedCitations<double> edge_exact_model(const CitationNetwork& net);

struct ModelSpec {
  Model model = Model::RD;
  AttributeSet attributes = AttributeSet::all();
  bool exact = false;  // rational arithmetic, converted to double at the end
  double tie_tolerance = 1e-9;
};

ExpectedCitations<double> build_model(const CitationNetwork& net, const ModelSpec& spec);

struct ConservationCheck {
  double max_out_degree_error = 0;  // max_i |sum_j w_ij - k_i|
  double total_error = 0;           // |sum_j c_bar_j - M|
  double max_c_bar_error = 0;       // c_bar vs. re-summed groups
};

ConservationCheck check_conservation(const CitationNetwork& net,
                                     const ExpectedCitations<double>& ec);

extern template ExpectedCitations<double> random_draws<double>(const CitationNetwork&);
extern template ExpectedCitations<Rational> random_draws<Rational>(const CitationNetwork&);
extern template ExpectedCitations<double> homophilic_draws<double>(const CitationNetwork&,
                                                                   AttributeSet);
extern template ExpectedCitations<Rational> homophilic_draws<Rational>(const CitationNetwork&,
                                                                       AttributeSet);
extern template ExpectedCitations<double> preferential_draws<double>(const CitationNetwork&,
                                                                     AttributeSet,
                                                                     PreferentialOptions);
extern template ExpectedCitations<Rational> preferential_draws<Rational>(const CitationNetwork&,
                                                                         AttributeSet,
                                                                         PreferentialOptions);
extern template double citation_probability<double>(const ExpectedCitations<double>&, NodeIndex,
                                                    NodeIndex);
extern template Rational citation_probability<Rational>(const ExpectedCitations<Rational>&,
                                                        NodeIndex, NodeIndex);
extern template MatrixX<double> dense_weights<double>(const ExpectedCitations<double>&);
extern template MatrixX<Rational> dense_weights<Rational>(const ExpectedCitations<Rational>&);

}  // namespace citeimb
