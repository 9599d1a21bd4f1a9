#include <gtest/gtest.h>

#include <algorithm>

#include "crl/bayes.hpp"
#include "crl/common.hpp"
#include "oracles.hpp"

using namespace crl;
using namespace crl::testing;

namespace {

Matrix rows_tm(int t1m1, int t0m0) {
  Matrix x(t1m1 + t0m0, 2);
  for (int i = 0; i < t1m1; ++i) x.row(i) << 1, 1;
  for (int i = 0; i < t0m0; ++i) x.row(t1m1 + i) << 0, 0;
  return x;
}

}  // namespace

TEST(Bayes, NoDataGivesHalf) {
  DirectedGraph g({"texture", "movability"}, {{"texture", "movability"}});
  const auto net = fit_cpds(g, Matrix(0, 2), 1.0);
  for (const auto& c : net.cpds)
    for (double p : c.table) EXPECT_DOUBLE_EQ(p, 0.5);
  EXPECT_DOUBLE_EQ(query_movability(net, {}), 0.5);
  EXPECT_DOUBLE_EQ(query_movability(net, {{"texture", 1}}), 0.5);
}

TEST(Bayes, LaplaceElevenTwelfths) {
  DirectedGraph g({"texture", "movability"}, {{"texture", "movability"}});
  const auto net = fit_cpds(g, rows_tm(10, 10), 1.0);
  EXPECT_EQ(net.cpds[1].prob(1, 1), 11.0 / 12.0);
  EXPECT_EQ(query_movability(net, {{"texture", 1}}), 11.0 / 12.0);
  EXPECT_NEAR(query_movability(net, {{"texture", 0}}), 1.0 / 12.0, 1e-15);
}

TEST(Bayes, EmpiricalFrequencyWithoutSmoothing) {
  DirectedGraph g({"texture", "movability"});
  Matrix x = Matrix::Zero(10, 2);
  for (int i = 0; i < 7; ++i) x(i, 1) = 1;
  for (int i = 0; i < 10; i += 2) x(i, 0) = 1;
  const auto net = fit_cpds(g, x, 0.0);
  EXPECT_DOUBLE_EQ(net.cpds[1].prob(1, 0), 0.7);
  // no parents: the query ignores texture
  EXPECT_DOUBLE_EQ(query_movability(net, {{"texture", 0}}), 0.7);
  EXPECT_DOUBLE_EQ(query_movability(net, {{"texture", 1}}), 0.7);
}

TEST(Bayes, Errors) {
  DirectedGraph cyc({"a", "movability"}, {{"a", "movability"}, {"movability", "a"}});
  EXPECT_THROW(fit_cpds(cyc, Matrix::Zero(2, 2)), Error);
  DirectedGraph g({"texture", "movability"});
  EXPECT_THROW(fit_cpds(g, Matrix::Zero(2, 3)), Error);
  EXPECT_THROW(fit_cpds(g, Matrix::Zero(2, 2), -1.0), Error);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 0.5;
  EXPECT_THROW(fit_cpds(g, bad), Error);
  const auto net = fit_cpds(g, Matrix::Zero(2, 2));
  EXPECT_THROW(query_movability(net, {{"colour", 1}}), Error);
  EXPECT_THROW(query(net, "nope", 1, {}), Error);
}

TEST(Bayes, CptRowsSumToOne) {
  DirectedGraph g({"a", "b", "movability"}, {{"a", "movability"}, {"b", "movability"}, {"a", "b"}});
  Rng rng(1);
  Matrix x(30, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = bernoulli(rng, 0.4) ? 1 : 0;
  const auto net = fit_cpds(g, x, 0.5);
  for (const auto& c : net.cpds)
    for (std::size_t cfg = 0; cfg * 2 < c.table.size(); ++cfg) EXPECT_NEAR(c.prob(0, cfg) + c.prob(1, cfg), 1.0, 1e-12);
}

TEST(Bayes, QueriesMatchJointTableOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + uniform_index(rng, 3);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i + 1 < d; ++i) labels.push_back("v" + std::to_string(i));
    labels.emplace_back("movability");
    DirectedGraph g(labels);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a + 1; b < d; ++b)
        if (bernoulli(rng, 0.5)) {
          if (bernoulli(rng, 0.5))
            g.add_edge(a, b);
          else if (!g.has_edge(a, b))
            g.add_edge(b, a);
        }
    if (!is_acyclic(g)) continue;
    const auto n = static_cast<Eigen::Index>(uniform_index(rng, 25));
    Matrix x(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = bernoulli(rng, 0.5) ? 1 : 0;
    const double alpha = trial % 3 == 0 ? 0.5 : 1.0;
    const auto net = fit_cpds(g, x, alpha);
    for (std::size_t target = 0; target < d; ++target) {
      Evidence ev;
      std::map<std::size_t, int> ev_idx;
      for (std::size_t k = 0; k < d; ++k)
        if (k != target && bernoulli(rng, 0.5)) {
          const int v = bernoulli(rng, 0.5) ? 1 : 0;
          ev[labels[k]] = v;
          ev_idx[k] = v;
        }
      const double p1 = query(net, labels[target], 1, ev);
      EXPECT_NEAR(p1, joint_oracle(g, x, alpha, target, 1, ev_idx), 1e-9);
      EXPECT_NEAR(p1 + query(net, labels[target], 0, ev), 1.0, 1e-9);
      EXPECT_GE(p1, 0.0);
      EXPECT_LE(p1, 1.0);
    }
  }
}

TEST(Bayes, InvariantUnderRowPermutation) {
  DirectedGraph g({"texture", "shape", "movability"}, {{"texture", "movability"}, {"shape", "movability"}});
  Rng rng(3);
  Matrix x(40, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = bernoulli(rng, 0.5) ? 1 : 0;
  std::vector<Eigen::Index> perm(40);
  for (Eigen::Index i = 0; i < 40; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[3], perm[17]);
  Matrix y(40, 3);
  for (Eigen::Index i = 0; i < 40; ++i) y.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
  const auto a = fit_cpds(g, x), b = fit_cpds(g, y);
  for (int t = 0; t < 2; ++t)
    for (int s = 0; s < 2; ++s)
      EXPECT_EQ(query_movability(a, {{"texture", t}, {"shape", s}}), query_movability(b, {{"texture", t}, {"shape", s}}));
}
