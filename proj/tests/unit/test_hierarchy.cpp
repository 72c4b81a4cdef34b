#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "petbench/error.hpp"
#include "petbench/hierarchy.hpp"
#include "petbench/rng.hpp"

using namespace petbench;

namespace {

// For every pair of values and every level: equal at l implies equal at l+1.
bool coarsens(const Hierarchy& h) {
  const auto n = h.domain_size();
  for (std::size_t l = 0; l < h.depth(); ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (h.at(i, l) == h.at(j, l) && h.at(i, l + 1) != h.at(j, l + 1)) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST(Hierarchy, ReadsZipLadder) {
  const auto h = parse_hierarchy("1013;101*;*\n1014;101*;*\n", "zip");
  EXPECT_EQ(h.depth(), 2u);
  EXPECT_EQ(h.generalize("1013", 1), "101*");
  EXPECT_EQ(h.generalize("1014", 0), "1014");
  EXPECT_EQ(h.generalize("1014", 2), "*");
}

TEST(Hierarchy, SingleColumnIsIdentity) {
  const auto h = parse_hierarchy("a\nb\n", "x");
  EXPECT_EQ(h.depth(), 0u);
  EXPECT_EQ(h.generalize("b", 0), "b");
}

TEST(Hierarchy, ReadsBackIntermediateLevel) {
  const auto h = parse_hierarchy("A;X;*\nB;X;*\nC;Y;*\n", "x");
  EXPECT_EQ(h.generalize("C", 1), "Y");
  EXPECT_EQ(h.generalize("A", 1), h.generalize("B", 1));
}

TEST(Hierarchy, ConflictingDuplicateIsAConsistencyError) {
  EXPECT_THROW(parse_hierarchy("A;X;*\nA;Y;*\n", "x"), ConsistencyError);
  EXPECT_NO_THROW(parse_hierarchy("A;X;*\nA;X;*\n", "x"));
}

TEST(Hierarchy, SplittingPartitionIsAHierarchyError) {
  // A and B share level 1 but part at level 2.
  EXPECT_THROW(parse_hierarchy("A;X;P;*\nB;X;Q;*\n", "x"), HierarchyError);
  EXPECT_THROW(parse_hierarchy("A;X;Y\nB;X;Y\n", "x"), HierarchyError);  // top must be "*"
  EXPECT_THROW(parse_hierarchy("A;X;*\nB;*\n", "x"), std::exception);   // ragged
}

TEST(Hierarchy, OutOfDomainAndOutOfRange) {
  const auto h = parse_hierarchy("A;*\n", "x");
  EXPECT_THROW(h.generalize("Z", 0), DomainError);
  EXPECT_THROW(h.generalize("A", 2), RangeError);
}

TEST(Hierarchy, FileRoundTrip) {
  const auto h = parse_hierarchy("1013;101*;1***;*\n1014;101*;1***;*\n2044;204*;2***;*\n", "zip");
  const auto dir = std::filesystem::path(PETBENCH_TEST_TMP);
  std::filesystem::create_directories(dir);
  const auto path = dir / "zip.csv";
  write_hierarchy(h, path);
  EXPECT_EQ(load_hierarchy(path), h);
  EXPECT_EQ(parse_hierarchy(to_text(h), "zip"), h);
}

TEST(IntervalHierarchy, SingleWidthBins) {
  const std::vector<std::string> ages{"23", "27", "31"};
  const std::vector<double> widths{10};
  const auto h = synthesize_interval_hierarchy("age", ages, widths);
  EXPECT_EQ(h.depth(), 2u);
  EXPECT_EQ(h.generalize("23", 1), "[20,30)");
  EXPECT_EQ(h.generalize("27", 1), "[20,30)");
  EXPECT_EQ(h.generalize("31", 1), "[30,40)");
  EXPECT_EQ(h.generalize("31", 2), "*");
}

TEST(IntervalHierarchy, NestedWidths) {
  const std::vector<std::string> ages{"23"};
  const std::vector<double> widths{5, 10};
  const auto h = synthesize_interval_hierarchy("age", ages, widths);
  EXPECT_EQ(h.generalize("23", 1), "[20,25)");
  EXPECT_EQ(h.generalize("23", 2), "[20,30)");
  EXPECT_EQ(h.generalize("23", 3), "*");
}

TEST(IntervalHierarchy, EmptyWidthsGiveIdentityAndTop) {
  const std::vector<std::string> v{"1", "2"};
  const auto h = synthesize_interval_hierarchy("v", v, std::vector<double>{});
  EXPECT_EQ(h.depth(), 1u);
  EXPECT_EQ(h.generalize("2", 1), "*");
}

TEST(IntervalHierarchy, RejectsNonIncreasingWidths) {
  const std::vector<std::string> v{"1"};
  EXPECT_THROW(synthesize_interval_hierarchy("v", v, std::vector<double>{10, 5}), HierarchyError);
}

TEST(IntervalHierarchy, CoarseningHoldsForRandomInputs) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> values;
    const auto count = 1 + rng.below(25);
    for (std::size_t i = 0; i < count; ++i) values.push_back(std::to_string(static_cast<long long>(rng.below(200)) - 50));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> widths;
    double w = 0.0;
    const auto levels = rng.below(4);
    for (std::size_t i = 0; i < levels; ++i) {
      w += 1.0 + static_cast<double>(rng.below(15));
      widths.push_back(w);
    }
    const auto h = synthesize_interval_hierarchy("v", values, widths);
    ASSERT_TRUE(coarsens(h)) << "trial " << trial;
    for (const auto& v : values) ASSERT_EQ(h.generalize(v, h.depth()), "*");
  }
}

TEST(MaskingHierarchy, MasksTrailingDigits) {
  const std::vector<std::string> zips{"1013", "1014", "2044"};
  const std::vector<std::size_t> masked{1, 3};
  const auto h = synthesize_masking_hierarchy("zip", zips, masked);
  EXPECT_EQ(h.generalize("1013", 1), "101*");
  EXPECT_EQ(h.generalize("2044", 2), "2***");
  EXPECT_EQ(h.generalize("2044", 3), "*");
  EXPECT_TRUE(coarsens(h));
}
