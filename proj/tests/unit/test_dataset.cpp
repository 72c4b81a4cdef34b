#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "petbench/config.hpp"
#include "petbench/dataset.hpp"
#include "petbench/encoding.hpp"
#include "petbench/error.hpp"

using namespace petbench;

namespace {

std::vector<AttributeSchema> small_schema() {
  return {{"age", AttributeKind::integer, PrivacyClass::quasi_identifying, "?"},
          {"city", AttributeKind::categorical, PrivacyClass::quasi_identifying, "?"},
          {"label", AttributeKind::categorical, PrivacyClass::sensitive, "?"}};
}

Dataset labelled(std::size_t per_class_a, std::size_t per_class_b) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < per_class_a; ++i) rows.push_back({std::to_string(20 + i), "x", "a"});
  for (std::size_t i = 0; i < per_class_b; ++i) rows.push_back({std::to_string(40 + i), "y", "b"});
  return Dataset(small_schema(), rows, "label");
}

}  // namespace

TEST(LoadCsv, HeaderMayBeAnyPermutationOfTheSchema) {
  const auto d = parse_csv("label,age,city\na,31,Paris\nb,40,Rome\n", small_schema(), "label");
  ASSERT_EQ(d.n(), 2u);
  EXPECT_EQ(d.row(0), (Row{"31", "Paris", "a"}));
  EXPECT_EQ(d.row(1), (Row{"40", "Rome", "b"}));
}

TEST(LoadCsv, EmptyFileWithHeaderGivesNoRows) {
  EXPECT_EQ(parse_csv("age,city,label\n", small_schema(), "label").n(), 0u);
}

TEST(LoadCsv, WrongArityReportsTheLine) {
  try {
    parse_csv("age,city,label\n1,a,x\n2,b\n", small_schema(), "label");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadCsv, UnknownColumnIsASchemaError) {
  EXPECT_THROW(parse_csv("age,town,label\n", small_schema(), "label"), SchemaError);
  EXPECT_THROW(parse_csv("age,label\n", small_schema(), "label"), SchemaError);
}

TEST(LoadCsv, NonNumericValueInNumericColumnIsRejected) {
  EXPECT_THROW(parse_csv("age,city,label\nold,a,x\n", small_schema(), "label"), ParseError);
  EXPECT_NO_THROW(parse_csv("age,city,label\n?,a,x\n", small_schema(), "label"));
}

TEST(LoadCsv, SemicolonDelimiterAndQuotedFields) {
  CsvOptions o;
  o.delimiter = ';';
  const auto d = parse_csv("age;city;label\n5;\"a;b\";\"multi\nline\"\n", small_schema(), "label", o);
  ASSERT_EQ(d.n(), 1u);
  EXPECT_EQ(d.row(0)[1], "a;b");
  EXPECT_EQ(d.row(0)[2], "multi\nline");
}

TEST(LoadCsv, RoundTripsThroughWriter) {
  const auto d = parse_csv("age,city,label\n5,\"a,b\",\"q\"\"uote\"\n", small_schema(), "label");
  EXPECT_EQ(parse_csv(to_csv(d), small_schema(), "label"), d);
}

TEST(Clean, DropsRowsWithMissingValuesKeepingOrder) {
  const Dataset d(small_schema(), {{"1", "a", "x"}, {"?", "b", "y"}, {"3", "c", "z"}}, "label");
  const auto c = clean(d);
  ASSERT_EQ(c.n(), 2u);
  EXPECT_EQ(c.row(0)[0], "1");
  EXPECT_EQ(c.row(1)[0], "3");
  EXPECT_EQ(clean(c), c);
}

TEST(Clean, NoMissingValuesIsIdentity) {
  const auto d = labelled(3, 2);
  EXPECT_EQ(clean(d), d);
}

TEST(Binarize, ThresholdIsInclusive) {
  std::vector<AttributeSchema> s{{"g", AttributeKind::integer, PrivacyClass::sensitive, "?"}};
  const Dataset d(s, {{"9"}, {"10"}, {"20"}}, "g");
  const auto b = binarize_target(d, 10);
  EXPECT_EQ(b.n(), 3u);
  EXPECT_EQ(b.row(0)[0], "fail");
  EXPECT_EQ(b.row(1)[0], "pass");
  EXPECT_EQ(b.row(2)[0], "pass");
  EXPECT_EQ(b.schema()[0].kind, AttributeKind::categorical);
  const auto all_fail = binarize_target(Dataset(s, {{"1"}, {"2"}}, "g"), 10);
  EXPECT_EQ(all_fail.row(0)[0], "fail");
  EXPECT_EQ(all_fail.row(1)[0], "fail");
}

TEST(Binarize, NonNumericTargetIsATypeError) {
  EXPECT_THROW(binarize_target(labelled(2, 2), 10), TypeError);
}

TEST(Split, TenRowsGiveEightTwoAndRepeatExactly) {
  const auto d = labelled(5, 5);
  const auto a = split(d, 0.2, 42);
  const auto b = split(d, 0.2, 42);
  EXPECT_EQ(a.train.n(), 8u);
  EXPECT_EQ(a.test.n(), 2u);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  // stratified: one of each class in the test split
  EXPECT_NE(a.test.row(0)[2], a.test.row(1)[2]);
}

TEST(Split, HalfOfTwoRowsPutsOneClassOnEachSide) {
  const auto s = split(labelled(1, 1), 0.5, 1);
  ASSERT_EQ(s.train.n(), 1u);
  ASSERT_EQ(s.test.n(), 1u);
  EXPECT_NE(s.train.row(0)[2], s.test.row(0)[2]);
}

TEST(Split, IsAPartition) {
  const auto d = labelled(13, 8);
  const auto s = split(d, 0.3, 9);
  std::multiset<Row> all(d.rows().begin(), d.rows().end());
  std::multiset<Row> parts(s.train.rows().begin(), s.train.rows().end());
  parts.insert(s.test.rows().begin(), s.test.rows().end());
  EXPECT_EQ(all, parts);
  EXPECT_EQ(s.test.n(), 6u);  // round(0.3 * 21)
}

TEST(Split, DifferentSeedsChangeTestMembership) {
  const auto d = labelled(30, 30);
  const auto reference = split(d, 0.2, 0).test;
  int differing = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) differing += split(d, 0.2, seed).test != reference;
  EXPECT_GE(differing, 99);
}

TEST(Split, EmptySideIsAStratificationError) {
  EXPECT_THROW(split(labelled(1, 1), 0.1, 0), StratificationError);
  EXPECT_THROW(split(labelled(2, 2), 0.0, 0), std::exception);
}

TEST(Encoder, OneHotAndMinMaxExamples) {
  std::vector<AttributeSchema> s{{"n", AttributeKind::integer, PrivacyClass::insensitive, "?"},
                                 {"c", AttributeKind::categorical, PrivacyClass::insensitive, "?"},
                                 {"y", AttributeKind::categorical, PrivacyClass::sensitive, "?"}};
  const Dataset d(s, {{"0", "A", "no"}, {"5", "B", "yes"}, {"10", "A", "no"}}, "y");
  const auto enc = Encoder::fit(d, std::nullopt, Encoder::Scaling::min_max);
  const auto e = enc.transform(d);
  ASSERT_EQ(e.cols(), 3u);
  EXPECT_DOUBLE_EQ(e.features(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(e.features(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(e.features(2, 0), 1.0);
  EXPECT_EQ(e.features(0, 1), 1.0);
  EXPECT_EQ(e.features(0, 2), 0.0);
  EXPECT_EQ(e.labels, (Labels{0, 1, 0}));
}

TEST(Encoder, StandardizesByDefault) {
  std::vector<AttributeSchema> s{{"n", AttributeKind::integer, PrivacyClass::insensitive, "?"},
                                 {"y", AttributeKind::categorical, PrivacyClass::sensitive, "?"}};
  const Dataset d(s, {{"0", "no"}, {"5", "yes"}, {"10", "no"}}, "y");
  const auto e = Encoder::fit(d).transform(d);
  const double sd = std::sqrt(50.0 / 3.0);
  EXPECT_NEAR(e.features(0, 0), -5.0 / sd, 1e-12);
  EXPECT_NEAR(e.features(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(e.features(2, 0), 5.0 / sd, 1e-12);
}

TEST(Encoder, GeneralizedValuesAreDistinctCategoriesAndUnseenIsZero) {
  std::vector<AttributeSchema> s{{"zip", AttributeKind::integer, PrivacyClass::quasi_identifying, "?"},
                                 {"y", AttributeKind::categorical, PrivacyClass::sensitive, "?"}};
  const Dataset train(s, {{"1*", "a"}, {"10", "b"}, {"*", "a"}}, "y");
  const auto enc = Encoder::fit(train);
  EXPECT_EQ(enc.feature_count(), 3u);
  EXPECT_NE(enc.category_index("zip", "1*"), enc.category_index("zip", "10"));
  for (const std::string v : {"1*", "10", "*"}) EXPECT_EQ(enc.category("zip", *enc.category_index("zip", v)), v);
  const auto e = enc.transform(Dataset(s, {{"99", "a"}}, "y"));
  EXPECT_EQ(e.features.row(0).sum(), 0.0);
}

TEST(Adult, RawAndCleanedRowCountsMatchThePublishedFile) {
  const std::filesystem::path csv = std::filesystem::path(PETBENCH_SOURCE_DIR) / "data/adult/adult.csv";
  if (!std::filesystem::exists(csv)) GTEST_SKIP() << "run data/adult/prepare.py first";
  const auto config = load_config(std::filesystem::path(PETBENCH_SOURCE_DIR) / "configs/adult.yaml");
  CsvOptions o;
  const auto raw = load_csv(config.dataset.path, config.dataset.attributes, config.dataset.target, o);
  EXPECT_EQ(raw.n(), 48842u);
  EXPECT_EQ(raw.width(), 15u);
  const auto cleaned = clean(raw);
  EXPECT_EQ(cleaned.n(), 45222u);
  std::size_t rich = 0;
  for (const auto& row : cleaned.rows()) rich += row.back() == ">50K";
  EXPECT_EQ(rich, 11208u);
}
