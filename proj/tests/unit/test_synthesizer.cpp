#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "petbench/error.hpp"
#include "petbench/rng.hpp"
#include "petbench/synthesizer.hpp"

using namespace petbench;

namespace {

Dataset categorical(const std::vector<std::string>& names, const std::vector<Row>& rows) {
  std::vector<AttributeSchema> s;
  for (const auto& n : names) s.push_back({n, AttributeKind::categorical, PrivacyClass::insensitive, "?"});
  return Dataset(s, rows, names.back());
}

// I(a; b) straight from string counts.
double string_mi(const Dataset& d, std::size_t a, const std::vector<std::size_t>& b) {
  std::map<std::string, double> pa, pb, pab;
  const double n = static_cast<double>(d.n());
  for (const auto& row : d.rows()) {
    std::string kb;
    for (auto j : b) kb += row[j] + '\x1f';
    pa[row[a]] += 1 / n;
    pb[kb] += 1 / n;
    pab[row[a] + '\x1e' + kb] += 1 / n;
  }
  double mi = 0.0;
  for (const auto& [key, p] : pab) {
    const auto cut = key.find('\x1e');
    mi += p * std::log2(p / (pa[key.substr(0, cut)] * pb[key.substr(cut + 1)]));
  }
  return mi;
}

double string_entropy(const Dataset& d, std::size_t a) {
  std::map<std::string, double> p;
  for (const auto& row : d.rows()) p[row[a]] += 1.0 / static_cast<double>(d.n());
  double h = 0.0;
  for (const auto& [_, q] : p) h -= q * std::log2(q);
  return h;
}

struct Structure {
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> parents;
};

// Greedy criterion evaluated by listing every (child, parent set) candidate.
Structure greedy_oracle(const Dataset& d, std::size_t degree) {
  const auto m = d.width();
  std::vector<std::size_t> names(m);
  std::iota(names.begin(), names.end(), 0);
  std::sort(names.begin(), names.end(), [&](auto x, auto y) { return d.schema()[x].name < d.schema()[y].name; });
  Structure s;
  s.parents.assign(m, {});
  std::size_t root = names[0];
  for (auto a : names) {
    if (string_entropy(d, a) > string_entropy(d, root) + 1e-12) root = a;
  }
  s.order.push_back(root);
  while (s.order.size() < m) {
    std::vector<std::size_t> placed(s.order);
    std::sort(placed.begin(), placed.end(), [&](auto x, auto y) { return d.schema()[x].name < d.schema()[y].name; });
    const auto k = std::min(degree, placed.size());
    double best = -1;
    std::size_t child = m;
    std::vector<std::size_t> parents;
    for (auto c : names) {
      if (std::find(s.order.begin(), s.order.end(), c) != s.order.end()) continue;
      std::vector<bool> mask(placed.size(), false);
      std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
      do {
        std::vector<std::size_t> ps;
        for (std::size_t i = 0; i < placed.size(); ++i) {
          if (mask[i]) ps.push_back(placed[i]);
        }
        const double mi = string_mi(d, c, ps);
        if (mi > best + 1e-12) {
          best = mi;
          child = c;
          parents = ps;
        }
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }
    s.order.push_back(child);
    s.parents[child] = parents;
  }
  return s;
}

}  // namespace

TEST(MutualInformation, SelfInformationOfUniformBinaryIsOneBit) {
  const auto d = categorical({"a", "b"}, {{"0", "0"}, {"0", "0"}, {"1", "1"}, {"1", "1"}});
  EXPECT_NEAR(mutual_information(d, "a", {"b"}), 1.0, 1e-12);
}

TEST(MutualInformation, ConstantIsZero) {
  const auto d = categorical({"a", "b"}, {{"k", "0"}, {"k", "1"}, {"k", "1"}});
  EXPECT_NEAR(mutual_information(d, "a", {"b"}), 0.0, 1e-12);
}

TEST(MutualInformation, HandComputedJoint) {
  // counts {(0,0):2, (0,1):1, (1,1):1}
  const auto d = categorical({"a", "b"}, {{"0", "0"}, {"0", "0"}, {"0", "1"}, {"1", "1"}});
  const double expected = 0.5 * std::log2(0.5 / (0.75 * 0.5)) + 0.25 * std::log2(0.25 / (0.75 * 0.5)) +
                          0.25 * std::log2(0.25 / (0.25 * 0.5));
  EXPECT_NEAR(mutual_information(d, "a", {"b"}), expected, 1e-12);
  EXPECT_NEAR(expected, 0.311278124459, 1e-9);
}

TEST(MutualInformation, SymmetricAndNonnegative) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Row> rows;
    for (int r = 0; r < 40; ++r) rows.push_back({std::to_string(rng.below(3)), std::to_string(rng.below(4)), std::to_string(rng.below(2))});
    const auto d = categorical({"a", "b", "c"}, rows);
    EXPECT_NEAR(mutual_information(d, "a", {"b"}), mutual_information(d, "b", {"a"}), 1e-12);
    EXPECT_GE(mutual_information(d, "a", {"b", "c"}), -1e-12);
    EXPECT_NEAR(mutual_information(d, "a", {"b", "c"}), string_mi(d, 0, {1, 2}), 1e-12);
  }
}

TEST(MutualInformation, EmptyParentSetAndEmptyTableAreErrors) {
  const auto d = categorical({"a", "b"}, {{"0", "1"}});
  EXPECT_THROW(mutual_information(d, "a", {}), std::invalid_argument);
  EXPECT_THROW(mutual_information(categorical({"a", "b"}, {}), "a", {"b"}), Error);
}

TEST(GreedyBayes, SingleAttributeHasNoParents) {
  const auto net = greedy_bayes(categorical({"a"}, {{"x"}, {"y"}}), SynthesizerConfig{});
  EXPECT_EQ(net.order, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(net.parents[0].empty());
}

TEST(GreedyBayes, CorrelatedPairLinks) {
  const auto d = categorical({"a", "b"}, {{"0", "x"}, {"1", "y"}, {"2", "z"}, {"0", "x"}});
  const auto net = greedy_bayes(d, SynthesizerConfig{});
  ASSERT_EQ(net.order.size(), 2u);
  EXPECT_EQ(net.parents[net.order[1]], (std::vector<std::size_t>{net.order[0]}));
}

TEST(GreedyBayes, MatchesCandidateEnumerationOnSmallTables) {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.below(3);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back(std::string(1, static_cast<char>('p' + j)));
    std::vector<Row> rows;
    for (int r = 0; r < 25; ++r) {
      Row row;
      const auto base = rng.below(3);
      for (std::size_t j = 0; j < m; ++j) row.push_back(std::to_string(rng.below(4) < 2 ? base : rng.below(3)));
      rows.push_back(row);
    }
    const auto d = categorical(names, rows);
    const auto net = greedy_bayes(d, SynthesizerConfig{});
    const auto expected = greedy_oracle(d, 2);
    EXPECT_EQ(net.order, expected.order) << "trial " << trial;
    EXPECT_EQ(net.parents, expected.parents) << "trial " << trial;
    for (std::size_t a = 0; a < m; ++a) EXPECT_LE(net.parents[a].size(), 2u);
  }
}

TEST(FitCpts, LaplaceSmoothing) {
  const auto d = categorical({"c"}, {{"a"}, {"a"}, {"a"}, {"b"}});
  auto net = fit_cpts(d, greedy_bayes(d, SynthesizerConfig{}), 1.0);
  ASSERT_EQ(net.cpts[0].rows(), 1u);
  EXPECT_NEAR(net.cpts[0].row(0)[0], 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(net.cpts[0].row(0)[1], 2.0 / 6.0, 1e-15);
}

TEST(FitCpts, UnobservedParentCombinationIsUniform) {
  // Child domain 4 under a single parent: every row normalizes, smoothed or not.
  const auto d = categorical({"p", "c"}, {{"x", "1"}, {"x", "2"}, {"y", "3"}, {"y", "4"}});
  auto net = greedy_bayes(d, SynthesizerConfig{});
  net.parents = {{}, {0}};
  net.order = {0, 1};
  for (double smoothing : {0.0, 1.0}) {
    const auto fitted = fit_cpts(d, net, smoothing);
    const auto& cpt = fitted.cpts[1];
    ASSERT_EQ(cpt.child_domain, 4u);
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      double sum = 0.0;
      for (double p : cpt.row(r)) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
  // Two-parent table over binary parents with one combination unseen.
  const auto d2 = categorical({"p", "q", "c"}, {{"0", "0", "a"}, {"0", "1", "b"}, {"1", "0", "c"}, {"1", "0", "d"}});
  auto net2 = greedy_bayes(d2, SynthesizerConfig{});
  net2.order = {0, 1, 2};
  net2.parents = {{}, {0}, {0, 1}};
  const auto fitted = fit_cpts(d2, net2, 0.0);
  const std::vector<std::uint32_t> codes{1, 1, 0};  // p = 1, q = 1 never observed
  const auto row = fitted.cpts[2].row(fitted.cpts[2].row_index(codes));
  for (double p : row) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Sample, DeterministicForASeed) {
  Rng rng(4);
  std::vector<Row> rows;
  for (int r = 0; r < 60; ++r) rows.push_back({std::to_string(rng.below(3)), std::to_string(rng.below(2)), rng.below(2) ? "y" : "n"});
  const auto d = categorical({"a", "b", "c"}, rows);
  SynthesizerConfig c;
  c.seed = 99;
  EXPECT_EQ(synthesize(d, c), synthesize(d, c));
  c.n_out = 0;
  EXPECT_EQ(synthesize(d, c).n(), 0u);
  c.n_out = 17;
  EXPECT_EQ(synthesize(d, c).n(), 17u);
}

TEST(Sample, EdgelessBinaryMatchesItsCpt) {
  std::vector<Row> rows;
  for (int i = 0; i < 7; ++i) rows.push_back({"a"});
  for (int i = 0; i < 3; ++i) rows.push_back({"b"});
  const auto d = categorical({"c"}, rows);
  SynthesizerConfig c;
  c.seed = 2;
  c.n_out = 10000;
  const auto net = fit_cpts(d, greedy_bayes(d, c), 0.0);
  EXPECT_DOUBLE_EQ(net.cpts[0].row(0)[0], 0.7);
  const auto out = sample(net, c);
  std::size_t a = 0;
  for (const auto& row : out.rows()) a += row[0] == "a";
  EXPECT_NEAR(static_cast<double>(a) / 10000.0, 0.7, 0.02);
}

TEST(Sample, NumericValuesStayInsideTheOriginalRange) {
  std::vector<AttributeSchema> s{{"x", AttributeKind::integer, PrivacyClass::insensitive, "?"},
                                 {"y", AttributeKind::categorical, PrivacyClass::sensitive, "?"}};
  std::vector<Row> rows;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) rows.push_back({std::to_string(17 + rng.below(60)), rng.below(2) ? "p" : "f"});
  const Dataset d(s, rows, "y");
  SynthesizerConfig c;
  c.bins = 5;
  BayesianNetwork net;
  const auto out = synthesize(d, c, &net);
  EXPECT_EQ(net.attributes[0].encoding, DiscreteAttribute::Encoding::binned);
  for (const auto& row : out.rows()) {
    const double v = std::stod(row[0]);
    EXPECT_GE(v, 17);
    EXPECT_LE(v, 76);
    EXPECT_EQ(v, std::floor(v));
    EXPECT_TRUE(row[1] == "p" || row[1] == "f");
  }
  for (const auto& cpt : net.cpts) {
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      double sum = 0.0;
      for (double p : cpt.row(r)) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
  EXPECT_FALSE(describe(net).empty());
}
