#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "specdiff/cluster.hpp"
#include "specdiff/procgen.hpp"
#include "test_support.hpp"

using namespace specdiff;
using namespace specdiff::cluster;

namespace {

constexpr double kPi = std::numbers::pi;

DistanceMatrix three_leaf() {
  return DistanceMatrix({"A", "B", "C"}, {0.0, 0.1, 0.9, 0.1, 0.0, 0.9, 0.9, 0.9, 0.0});
}

DistanceMatrix random_matrix(std::size_t m, std::uint64_t seed, std::vector<std::string> labels = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) v[i * m + j] = v[j * m + i] = u(rng);
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < m; ++i) labels.push_back("s" + std::to_string(i));
  }
  return DistanceMatrix(std::move(labels), std::move(v));
}

DistanceMatrix permuted(const DistanceMatrix& d, const std::vector<std::size_t>& perm) {
  const std::size_t m = d.size();
  std::vector<std::string> labels(m);
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    labels[i] = d.labels()[perm[i]];
    for (std::size_t j = 0; j < m; ++j) v[i * m + j] = d(perm[i], perm[j]);
  }
  return DistanceMatrix(std::move(labels), std::move(v));
}

/// Population distance sqrt(int (f - g)^2 / (int f^2 + int g^2)) by quadrature.
double population_distance(const procgen::ModelSpec& a, const procgen::ModelSpec& b) {
  const auto f = [&](double l) { return procgen::model_spectral_density(a, l); };
  const auto g = [&](double l) { return procgen::model_spectral_density(b, l); };
  const double ff = testkit::trapezoid([&](double l) { return f(l) * f(l); }, -kPi, kPi, 20000);
  const double gg = testkit::trapezoid([&](double l) { return g(l) * g(l); }, -kPi, kPi, 20000);
  const double fg = testkit::trapezoid([&](double l) { return f(l) * g(l); }, -kPi, kPi, 20000);
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * fg / (ff + gg)));
}

}  // namespace

TEST(Distance, AlgebraicEndpoints) {
  EXPECT_EQ(distance_from_statistics(0.7, 0.7, 0.7), 0.0);
  EXPECT_EQ(distance_from_statistics(0.3, 0.5, 0.0), 1.0);
  EXPECT_NEAR(distance_from_statistics(1.0, 1.0, 0.25), std::sqrt(0.5), 1e-15);
  EXPECT_THROW((void)distance_from_statistics(0.0, 0.0, 0.0), DegenerateInput);
}

TEST(Distance, BoundedAndSymmetricOnRandomSeries) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto a = testkit::gaussian_series(64 + seed * 7, seed, "a");
    const auto b = testkit::simulate_model(procgen::Ar1{}, 64 + seed * 11, seed + 100, "b");
    const double ab = spectral_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    if (a.size() != b.size()) EXPECT_EQ(ab, spectral_distance(b, a));
  }
}

TEST(Distance, IdenticalSeriesAreClose) {
  const std::size_t reps = 100;
  double sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto x = testkit::gaussian_series(1024, 3000 + r);
    sum += spectral_distance(x, x);
  }
  EXPECT_LT(sum / reps, 0.15);
}

TEST(Distance, ConvergesToPopulationValueForArVersusMa) {
  const procgen::Ar1 x2;
  const procgen::Ma1 x3;
  const double want = population_distance(x2, x3);
  const std::size_t reps = 100;
  double sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    sum += spectral_distance(testkit::simulate_model(x2, 4096, 50 + r, "a"),
                             testkit::simulate_model(x3, 4096, 5000 + r, "b"), false);
  }
  EXPECT_NEAR(sum / reps, want, 0.05);
}

TEST(DistanceMatrixType, ValidatesInvariants) {
  EXPECT_THROW(DistanceMatrix({"a", "b"}, {0.0, 0.5, 0.4, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({"a", "b"}, {0.1, 0.5, 0.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({"a", "b"}, {0.0, 1.5, 1.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({"a", "b"}, {0.0, 0.5, 0.5}), std::invalid_argument);
  EXPECT_NO_THROW(DistanceMatrix({"a", "b"}, {0.0, 0.5, 0.5, 0.0}));
}

TEST(DistanceMatrixType, CsvLayout) {
  const DistanceMatrix d({"a", "b,c"}, {0.0, 0.25, 0.25, 0.0});
  EXPECT_EQ(d.to_csv(), "label,a,\"b,c\"\na,0,0.25\n\"b,c\",0.25,0\n");
}

TEST(DistanceMatrixBuild, SymmetricZeroDiagonalAndOrderIndependent) {
  std::vector<TimeSeries> series{testkit::gaussian_series(256, 1, "w1"),
                                 testkit::simulate_model(procgen::Ma1{}, 300, 2, "m1"),
                                 testkit::gaussian_series(256, 3, "w2"),
                                 testkit::simulate_model(procgen::Ar1{}, 200, 4, "a1")};
  const auto d = distance_matrix(series);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(d(i, i), 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(d(i, j), d(j, i));
      EXPECT_GE(d(i, j), 0.0);
      EXPECT_LE(d(i, j), 1.0);
    }
  }
  std::vector<TimeSeries> reversed(series.rbegin(), series.rend());
  const auto r = distance_matrix(reversed);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(d(i, j), r(3 - i, 3 - j));
  }
  EXPECT_THROW((void)distance_matrix(std::span<const TimeSeries>(series.data(), 1)), std::invalid_argument);
}

TEST(DistanceMatrixBuild, ConstantSeriesIsRejectedByName) {
  try {
    const TimeSeries flat(std::vector<double>(64, 1.0), "flatline");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("flatline"), std::string::npos);
  }
}

TEST(DistanceMatrixBuild, PairsSeparateFromEachOther) {
  std::size_t good = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const std::vector<TimeSeries> series{testkit::gaussian_series(2048, 4 * run + 1, "a1"),
                                         testkit::gaussian_series(2048, 4 * run + 2, "a2"),
                                         testkit::simulate_model(procgen::Ma1{}, 2048, 4 * run + 3, "b1"),
                                         testkit::simulate_model(procgen::Ma1{}, 2048, 4 * run + 4, "b2")};
    const auto d = distance_matrix(series, true);
    const double within = std::max(d(0, 1), d(2, 3));
    const double between = std::min({d(0, 2), d(0, 3), d(1, 2), d(1, 3)});
    good += within < between;
  }
  EXPECT_GE(good, 95u);
}

TEST(Agglomerate, TwoLeaves) {
  const auto t = agglomerate(DistanceMatrix({"A", "B"}, {0.0, 0.3, 0.3, 0.0}));
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.nodes()[2].height, 0.3);
  EXPECT_EQ(to_newick(t), "(A:0.3,B:0.3);");
}

TEST(Agglomerate, ThreeLeavesEveryLinkage) {
  for (auto linkage : {Linkage::average, Linkage::complete, Linkage::single}) {
    const auto t = agglomerate(three_leaf(), linkage);
    ASSERT_EQ(t.nodes().size(), 5u);
    EXPECT_EQ(t.heights(), (std::vector<double>{0.1, 0.9}));
    EXPECT_EQ(t.leaves_under(3), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(to_newick(t), "((A:0.1,B:0.1):0.8,C:0.9);") << to_string(linkage);
  }
}

TEST(Agglomerate, LinkageRulesDiffer) {
  // d(A,B)=0.1, d(C,A)=0.3, d(C,B)=0.7
  const DistanceMatrix d({"A", "B", "C"}, {0.0, 0.1, 0.3, 0.1, 0.0, 0.7, 0.3, 0.7, 0.0});
  EXPECT_DOUBLE_EQ(agglomerate(d, Linkage::single).heights()[1], 0.3);
  EXPECT_DOUBLE_EQ(agglomerate(d, Linkage::complete).heights()[1], 0.7);
  EXPECT_DOUBLE_EQ(agglomerate(d, Linkage::average).heights()[1], 0.5);
}

TEST(Agglomerate, NewickNestedExample) {
  const DistanceMatrix d({"A", "B", "C"}, {0.0, 0.1, 0.3, 0.1, 0.0, 0.3, 0.3, 0.3, 0.0});
  EXPECT_EQ(to_newick(agglomerate(d, Linkage::complete)), "((A:0.1,B:0.1):0.2,C:0.3);");
}

TEST(Agglomerate, TiesBreakByLabel) {
  const DistanceMatrix d({"d", "b", "c", "a"}, std::vector<double>{0, .5, .5, .5, .5, 0, .5, .5, .5, .5, 0, .5,
                                                                   .5, .5, .5, 0});
  const auto t = agglomerate(d);
  EXPECT_EQ(t.leaves_under(4), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.leaves_under(5), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(to_newick(t), "(((a:0.5,b:0.5):0,c:0.5):0,d:0.5);");
}

TEST(Agglomerate, HeightsNondecreasing) {
  for (auto linkage : {Linkage::average, Linkage::complete, Linkage::single}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto h = agglomerate(random_matrix(9, seed), linkage).heights();
      ASSERT_EQ(h.size(), 8u);
      EXPECT_TRUE(std::is_sorted(h.begin(), h.end())) << to_string(linkage) << " seed " << seed;
    }
  }
}

TEST(Agglomerate, PermutationGivesIsomorphicTree) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = random_matrix(7, seed);
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5, 6};
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto linkage : {Linkage::average, Linkage::complete, Linkage::single}) {
      EXPECT_EQ(to_newick(agglomerate(d, linkage)), to_newick(agglomerate(permuted(d, perm), linkage)));
    }
  }
}

TEST(Dendrogram, LeafSetMatchesInput) {
  const auto d = random_matrix(6, 3);
  const auto t = agglomerate(d);
  auto leaves = t.leaves_under(t.root());
  std::sort(leaves.begin(), leaves.end());
  auto labels = d.labels();
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(leaves, labels);
}

TEST(Dendrogram, CutRecoversGroups) {
  const DistanceMatrix d({"a", "b", "c", "d"}, {0, .1, .8, .9, .1, 0, .85, .95, .8, .85, 0, .2, .9, .95, .2, 0});
  const auto t = agglomerate(d);
  EXPECT_EQ(t.cut(1), (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(t.cut(2), (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(t.cut(4), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_THROW((void)t.cut(0), std::invalid_argument);
  EXPECT_THROW((void)t.cut(5), std::invalid_argument);
}

TEST(Dendrogram, RejectsMalformedTrees) {
  using Node = Dendrogram::Node;
  EXPECT_THROW(Dendrogram({Node{"a"}, Node{"b"}}), std::invalid_argument);
  EXPECT_THROW(Dendrogram({Node{"a"}, Node{"", 0, 0, 1.0}, Node{"b"}}), std::invalid_argument);
  EXPECT_NO_THROW(Dendrogram({Node{"a"}, Node{"b"}, Node{"", 0, 1, 1.0}}));
}

TEST(Export, JsonShapeAndRoundTrip) {
  const auto t = agglomerate(three_leaf(), Linkage::complete);
  const auto doc = nlohmann::json::parse(to_json(t));
  EXPECT_EQ(doc["height"], 0.9);
  ASSERT_EQ(doc["children"].size(), 2u);
  EXPECT_EQ(doc["children"][1]["label"], "C");
  EXPECT_EQ(doc["children"][1]["height"], 0.0);
  EXPECT_EQ(dendrogram_from_json(to_json(t)), t);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = agglomerate(random_matrix(8, seed));
    const auto back = dendrogram_from_json(export_dendrogram(r, TreeFormat::json));
    EXPECT_EQ(to_json(back), to_json(r));
    EXPECT_EQ(back.heights(), r.heights());
  }
}

TEST(Export, LabelsAreEscaped) {
  EXPECT_EQ(escape_label("ab_C-1.x"), "ab_C-1.x");
  EXPECT_EQ(escape_label("a b(c):d"), "a%20b%28c%29%3Ad");
  const auto t = agglomerate(DistanceMatrix({"x y", "z"}, {0.0, 0.5, 0.5, 0.0}));
  EXPECT_EQ(to_newick(t), "(x%20y:0.5,z:0.5);");
}

TEST(Export, NamesParse) {
  EXPECT_EQ(linkage_from_name("single"), Linkage::single);
  EXPECT_EQ(linkage_from_name("complete"), Linkage::complete);
  EXPECT_EQ(linkage_from_name("average"), Linkage::average);
  EXPECT_THROW((void)linkage_from_name("ward"), std::invalid_argument);
  EXPECT_EQ(tree_format_from_name("json"), TreeFormat::json);
  EXPECT_THROW((void)tree_format_from_name("xml"), std::invalid_argument);
}
