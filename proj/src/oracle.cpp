#include "citeimb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace citeimb {

namespace {

// Ten calendar years back, clamping the day to the target month's length.
std::chrono::sys_days ten_years_back(Date d) {
  using namespace std::chrono;
  const year y = d.year() - years{10};
  const day last = year_month_day_last{y, month_day_last{d.month()}}.day();
  return sys_days{year_month_day{y, d.month(), std::min(d.day(), last)}};
}

bool can_cite(const Paper& citer, const Paper& cand) {
  const std::chrono::sys_days when{cand.pub_date};
  if (when > std::chrono::sys_days{citer.pub_date} || when < ten_years_back(citer.pub_date)) {
    return false;
  }
  const bool first_in = cand.first_author == citer.first_author ||
                        cand.first_author == citer.last_author;
  const bool last_in = cand.last_author == citer.first_author ||
                       cand.last_author == citer.last_author;
  return !(first_in && last_in);
}

bool same_category(const Paper& a, const Paper& b, AttributeSet attrs) {
  if (attrs.contains(Attribute::Rank) && a.rank != b.rank) return false;
  if (attrs.contains(Attribute::Country) && a.country != b.country) return false;
  if (attrs.contains(Attribute::Topic) && a.topic != b.topic) return false;
  return true;
}

struct Draw {
  NodeIndex citer;
  NodeIndex cited;                // observed target (HD/PD)
  std::vector<NodeIndex> pool;    // RD/HD candidates
};

}  // namespace

OracleResult monte_carlo_oracle(const CitationNetwork& net, Model model, AttributeSet attrs,
                                long samples, std::uint64_t seed, int threads) {
  const NodeIndex n = net.size();
  if (n > kOracleMaxPapers) {
    throw std::invalid_argument("Monte Carlo oracle is limited to " +
                                std::to_string(kOracleMaxPapers) + " papers");
  }
  if (samples < 2) throw std::invalid_argument("oracle needs at least 2 samples");
  const auto& P = net.papers();

  std::vector<Draw> draws;
  for (NodeIndex i = 0; i < n; ++i) {
    if (model == Model::RD) {
      std::vector<NodeIndex> pool;
      for (NodeIndex j = 0; j < n; ++j) {
        if (j != i && can_cite(P[i], P[j])) pool.push_back(j);
      }
      for (const NodeIndex cited : net.cited_by(i)) draws.push_back({i, cited, pool});
      continue;
    }
    for (const NodeIndex cited : net.cited_by(i)) {
      std::vector<NodeIndex> pool;
      for (NodeIndex j = 0; j < n; ++j) {
        if (j == cited || (j != i && can_cite(P[i], P[j]) && same_category(P[j], P[cited], attrs))) {
          pool.push_back(j);
        }
      }
      draws.push_back({i, cited, std::move(pool)});
    }
  }
  if (model == Model::PD) {
    std::vector<NodeIndex> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
      return std::tie(P[a].pub_date, P[a].id) < std::tie(P[b].pub_date, P[b].id);
    });
    std::vector<int> rank_of(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = static_cast<int>(r);
    std::stable_sort(draws.begin(), draws.end(), [&](const Draw& a, const Draw& b) {
      return rank_of[a.citer] < rank_of[b.citer];
    });
  }

  const auto nn = static_cast<std::size_t>(n);
  struct Totals {
    std::vector<double> sum, sumsq, in_sum, in_sumsq;
  };
  // Each sample owns a generator seeded from (seed, sample index), so the
  // result does not depend on how samples are split across threads.
  const auto run_block = [&](long first, long last, Totals& t) {
    t.sum.assign(nn * nn, 0.0);
    t.sumsq.assign(nn * nn, 0.0);
    t.in_sum.assign(nn, 0.0);
    t.in_sumsq.assign(nn, 0.0);
    std::vector<int> count(nn * nn, 0);
    std::vector<std::size_t> touched;
    std::vector<int> realized(nn), pending(nn), in_count(nn);
    std::vector<NodeIndex> live;
    for (long s = first; s < last; ++s) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
      std::mt19937_64 rng(seq);
      touched.clear();
      std::fill(in_count.begin(), in_count.end(), 0);
      std::fill(realized.begin(), realized.end(), 0);
      std::fill(pending.begin(), pending.end(), 0);
      NodeIndex current = draws.empty() ? 0 : draws.front().citer;
      for (const auto& d : draws) {
        NodeIndex pick;
        if (model == Model::PD) {
          if (d.citer != current) {
            for (std::size_t j = 0; j < nn; ++j) realized[j] += std::exchange(pending[j], 0);
            current = d.citer;
          }
          live.clear();
          for (const NodeIndex j : d.pool) {
            if (realized[j] == realized[d.cited]) live.push_back(j);
          }
          pick = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
          ++pending[pick];
        } else {
          pick = d.pool[std::uniform_int_distribution<std::size_t>(0, d.pool.size() - 1)(rng)];
        }
        const std::size_t cell = static_cast<std::size_t>(d.citer) * nn + pick;
        if (count[cell]++ == 0) touched.push_back(cell);
        ++in_count[pick];
      }
      for (const auto cell : touched) {
        const double c = count[cell];
        t.sum[cell] += c;
        t.sumsq[cell] += c * c;
        count[cell] = 0;
      }
      for (std::size_t j = 0; j < nn; ++j) {
        t.in_sum[j] += in_count[j];
        t.in_sumsq[j] += static_cast<double>(in_count[j]) * in_count[j];
      }
    }
  };

  const long workers = std::clamp<long>(threads, 1, samples);
  std::vector<Totals> parts(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (long w = 1; w < workers; ++w) {
      pool.emplace_back(run_block, samples * w / workers, samples * (w + 1) / workers,
                        std::ref(parts[static_cast<std::size_t>(w)]));
    }
    run_block(0, samples / workers, parts[0]);
  }
  // Totals are sums of small integers, so the reduction is exact in any order.
  auto& total = parts[0];
  for (std::size_t w = 1; w < parts.size(); ++w) {
    for (std::size_t c = 0; c < nn * nn; ++c) {
      total.sum[c] += parts[w].sum[c];
      total.sumsq[c] += parts[w].sumsq[c];
    }
    for (std::size_t j = 0; j < nn; ++j) {
      total.in_sum[j] += parts[w].in_sum[j];
      total.in_sumsq[j] += parts[w].in_sumsq[j];
    }
  }
  const auto& sum = total.sum;
  const auto& sumsq = total.sumsq;
  const auto& in_sum = total.in_sum;
  const auto& in_sumsq = total.in_sumsq;

  const double S = static_cast<double>(samples);
  const auto stderr_of = [S](double total, double total_sq) {
    const double mean = total / S;
    const double var = std::max(0.0, (total_sq - S * mean * mean) / (S - 1.0));
    return std::sqrt(var / S);
  };
  OracleResult r;
  r.samples = samples;
  r.mean.resize(n, n);
  r.se.resize(n, n);
  r.in_mean.resize(n);
  r.in_se.resize(n);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const auto cell = i * nn + j;
      r.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum[cell] / S;
      r.se(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = stderr_of(sum[cell], sumsq[cell]);
    }
    r.in_mean(static_cast<Eigen::Index>(i)) = in_sum[i] / S;
    r.in_se(static_cast<Eigen::Index>(i)) = stderr_of(in_sum[i], in_sumsq[i]);
  }
  return r;
}

OracleAgreement compare_to_oracle(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& se,
                                  const Eigen::MatrixXd& analytic, double z) {
  OracleAgreement a;
  for (Eigen::Index i = 0; i < empirical.rows(); ++i) {
    for (Eigen::Index j = 0; j < empirical.cols(); ++j) {
      const double diff = std::abs(empirical(i, j) - analytic(i, j));
      ++a.checked;
      if (se(i, j) == 0.0) {
        if (diff > 1e-12) {
          ++a.violations;
          a.flagged.emplace_back(i, j);
        }
        continue;
      }
      const double score = diff / se(i, j);
      a.max_z = std::max(a.max_z, score);
      if (score > z) {
        ++a.violations;
        a.flagged.emplace_back(i, j);
      }
    }
  }
  return a;
}

}  // namespace citeimb
