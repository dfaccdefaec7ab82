#include <doctest.h>

#include "citeimb/structure.hpp"
#include "citeimb/synth.hpp"
#include "support.hpp"

using namespace citeimb;

TEST_CASE("survival curves count papers at or above each threshold") {
  const Eigen::VectorXd obs = (Eigen::VectorXd(4) << 0, 1, 1, 3).finished();
  const Eigen::VectorXd exp = (Eigen::VectorXd(4) << 0.5, 0.5, 1.5, 2.5).finished();
  const auto s = survival_curve(obs, exp);
  REQUIRE(s.observed.size() == 4);
  CHECK(s.observed(0) == 1.0);
  CHECK(s.observed(1) == 0.75);
  CHECK(s.observed(2) == 0.25);
  CHECK(s.observed(3) == 0.25);
  CHECK(s.expected(0) == 1.0);
  CHECK(s.expected(1) == 0.5);
  CHECK(s.expected(2) == 0.25);
  CHECK(s.expected(3) == 0.0);
  CHECK(ks_distance(s) == 0.25);
}

TEST_CASE("expected counts a rounding error short of an integer reach it") {
  const Eigen::VectorXd obs = (Eigen::VectorXd(1) << 2).finished();
  const Eigen::VectorXd exp = (Eigen::VectorXd(1) << 2 - 1e-12).finished();
  CHECK(ks_distance(survival_curve(obs, exp)) == 0.0);
}

TEST_CASE("HD report on TOY4") {
  const auto net = testing::toy4();
  const auto ec = build_model(net, {Model::HD, AttributeSet::all()});
  const auto r = structural_report(net, ec);
  CHECK((r.out_observed - r.out_expected).cwiseAbs().maxCoeff() <= 1e-12);
  const auto& rank = r.category_pairs[0];
  CHECK(rank.attribute == Attribute::Rank);
  REQUIRE(rank.labels == std::vector<std::string>{"A*"});
  CHECK(rank.observed(0, 0) == 3.0);
  CHECK(rank.expected(0, 0) == doctest::Approx(3.0));
  CHECK(r.in_citations.observed(0) == 1.0);
  CHECK(r.in_citations.expected(0) == 1.0);
}

TEST_CASE("random draws lose topic homophily on a homophilous network") {
  SynthConfig cfg;
  cfg.n_papers = 600;
  cfg.n_topics = 4;
  cfg.homophily = {0, 0, 2.0};
  cfg.seed = 5;
  const auto net = generate_network(cfg);
  const auto ec = build_model(net, {Model::RD});
  const auto m = category_pair_matrix(net, ec, Attribute::Topic);
  CHECK(m.expected.trace() < m.observed.trace());
  const auto hd = category_pair_matrix(net, build_model(net, {Model::HD}), Attribute::Topic);
  CHECK(std::abs(hd.expected.trace() - hd.observed.trace()) <= 1e-9);
}

TEST_CASE("structural report tables are written") {
  const auto net = testing::toy4();
  const auto r = structural_report(net, build_model(net, {Model::RD}));
  testing::TempDir dir("structure");
  write_structural_report(r, dir.path());
  for (const auto* name : {"out_degree.csv", "pairs_rank.csv", "pairs_country.csv",
                           "pairs_topic.csv", "survival.csv", "ks.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(testing::read_file(dir / "out_degree.csv") ==
        "out_degree,observed_papers,expected_papers\n0,2,2\n1,1,1\n2,1,1\n");
}
