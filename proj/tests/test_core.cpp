#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "specdiff/core.hpp"
#include "test_support.hpp"

using namespace specdiff;

namespace {

TimeSeries parse(const std::string& text, const std::optional<ColumnSelector>& column = std::nullopt) {
  std::istringstream in(text);
  return parse_csv(in, "mem", column);
}

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  return v;
}

}  // namespace

TEST(TimeSeries, RejectsShortSeries) {
  EXPECT_THROW(TimeSeries(std::vector<double>(7, 1.0), "s"), InputError);
  EXPECT_NO_THROW(TimeSeries(ramp(8), "s"));
}

TEST(TimeSeries, RejectsNonFiniteAndConstant) {
  auto v = ramp(10);
  v[4] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TimeSeries(v, "nan"), InputError);
  v[4] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(TimeSeries(v, "inf"), InputError);
  EXPECT_THROW(TimeSeries(std::vector<double>(10, 2.5), "flat"), InputError);
}

TEST(TimeSeries, CenteredHasZeroMeanAndIsIdempotent) {
  const TimeSeries x(ramp(100), "r");
  const auto c = x.centered();
  EXPECT_NEAR(c.mean(), 0.0, 1e-13);
  const auto cc = c.centered();
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(cc.values()[i], c.values()[i], 1e-13);
  EXPECT_EQ(c.label(), "r");
}

TEST(FourierGrid, FrequenciesAreIncreasingInHalfOpenInterval) {
  for (std::size_t n1 : {2u, 8u, 9u, 256u, 257u}) {
    const FourierGrid grid(n1);
    const auto f = grid.frequencies();
    ASSERT_EQ(f.size(), n1 / 2);
    for (std::size_t k = 0; k < f.size(); ++k) {
      EXPECT_GT(f[k], 0.0);
      EXPECT_LE(f[k], std::numbers::pi);
      if (k > 0) EXPECT_GT(f[k], f[k - 1]);
      EXPECT_DOUBLE_EQ(f[k], 2.0 * std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(n1));
    }
  }
  EXPECT_DOUBLE_EQ(FourierGrid(8).frequency(4), std::numbers::pi);
  EXPECT_THROW(FourierGrid(1), std::invalid_argument);
  EXPECT_THROW((void)FourierGrid(8).frequency(0), std::out_of_range);
  EXPECT_THROW((void)FourierGrid(8).frequency(5), std::out_of_range);
}

TEST(PrepareComparison, ShorterSeriesGoesFirst) {
  const auto a = testkit::gaussian_series(512, 1, "a");
  const auto b = testkit::gaussian_series(256, 2, "b");
  const auto input = prepare_comparison(a, b, false);
  EXPECT_EQ(input.shorter.label(), "b");
  EXPECT_EQ(input.longer.label(), "a");
  EXPECT_TRUE(input.swapped);
  EXPECT_DOUBLE_EQ(input.ratio(), 2.0);
}

TEST(PrepareComparison, TiesKeepCallerOrder) {
  const auto a = testkit::gaussian_series(256, 1, "a");
  const auto b = testkit::gaussian_series(256, 2, "b");
  const auto input = prepare_comparison(a, b, false);
  EXPECT_EQ(input.shorter.label(), "a");
  EXPECT_FALSE(input.swapped);
}

TEST(PrepareComparison, CenteringRemovesEachMean) {
  const TimeSeries a(ramp(64), "a");
  const TimeSeries b(ramp(100), "b");
  const auto input = prepare_comparison(a, b, true);
  EXPECT_NEAR(input.shorter.mean(), 0.0, 1e-12);
  EXPECT_NEAR(input.longer.mean(), 0.0, 1e-12);
  const auto raw = prepare_comparison(a, b, false);
  EXPECT_DOUBLE_EQ(raw.shorter.mean(), 32.5);
}

TEST(PrepareComparison, IdempotentOnItsOwnOutput) {
  const auto a = testkit::gaussian_series(300, 3, "a");
  const auto b = testkit::gaussian_series(200, 4, "b");
  const auto once = prepare_comparison(a, b, true);
  const auto twice = prepare_comparison(once.shorter, once.longer, true);
  EXPECT_FALSE(twice.swapped);
  ASSERT_EQ(twice.n1(), once.n1());
  for (std::size_t i = 0; i < once.n1(); ++i) {
    EXPECT_NEAR(twice.shorter.values()[i], once.shorter.values()[i], 1e-14);
  }
  for (std::size_t i = 0; i < once.n2(); ++i) {
    EXPECT_NEAR(twice.longer.values()[i], once.longer.values()[i], 1e-14);
  }
}

TEST(Csv, ParsesPlainColumn) {
  const auto x = parse("1.0\n-1.0\n1.0\n-1.0\n1.0\n-1.0\n1.0\n-1.0\n");
  ASSERT_EQ(x.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(x.values()[i], i % 2 == 0 ? 1.0 : -1.0);
  EXPECT_EQ(x.label(), "mem");
}

TEST(Csv, HeaderNamesTheSeries) {
  const auto x = parse("ret\n1\n2\n3\n4\n5\n6\n7\n9\n");
  ASSERT_EQ(x.size(), 8u);
  EXPECT_EQ(x.label(), "ret");
  EXPECT_EQ(x.values()[7], 9.0);
}

TEST(Csv, BlankLinesAndWhitespaceAreTolerated) {
  const auto x = parse("\n  ret \n1\n\n2\n3 \n 4\n5\r\n6\n7\n8\n\n");
  EXPECT_EQ(x.size(), 8u);
  EXPECT_EQ(x.label(), "ret");
}

TEST(Csv, NonNumericCellNamesItsRow) {
  try {
    (void)parse("1\n2\nabc\n4\n5\n6\n7\n8\n9\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    ASSERT_TRUE(e.row().has_value());
    EXPECT_EQ(*e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Csv, TooFewRowsAndConstantColumnsFail) {
  EXPECT_THROW((void)parse("1\n2\n3\n4\n5\n6\n7\n"), InputError);
  EXPECT_THROW((void)parse("h\n1\n2\n3\n4\n5\n6\n7\n"), InputError);
  EXPECT_THROW((void)parse("2\n2\n2\n2\n2\n2\n2\n2\n"), InputError);
}

TEST(Csv, SelectsColumnsByIndexOrName) {
  const std::string text = "a,b\n1,10\n2,20\n3,30\n4,40\n5,50\n6,60\n7,70\n8,81\n";
  const auto by_name = parse(text, ColumnSelector{std::string("b")});
  EXPECT_EQ(by_name.label(), "b");
  EXPECT_EQ(by_name.values()[7], 81.0);
  const auto by_index = parse(text, ColumnSelector{std::size_t{1}});
  EXPECT_EQ(by_index, by_name);
  EXPECT_THROW((void)parse(text, ColumnSelector{std::string("c")}), InputError);
  EXPECT_THROW((void)parse(text, ColumnSelector{std::size_t{2}}), InputError);
}

TEST(Csv, UnreadableFileFails) {
  EXPECT_THROW((void)load_csv("/nonexistent/dir/file.csv"), InputError);
}

TEST(Csv, RoundTripIsExact) {
  const auto values = testkit::gaussian(500, 77);
  const auto path = std::filesystem::temp_directory_path() / "specdiff_roundtrip_series.csv";
  {
    std::ofstream out(path);
    write_csv(out, values);
  }
  const auto x = load_csv(path);
  EXPECT_EQ(x.label(), "specdiff_roundtrip_series");
  ASSERT_EQ(x.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_EQ(x.values()[i], values[i]);
  std::filesystem::remove(path);
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, -1e-300, 1.0 / 3.0, 123456789.125, std::numbers::pi}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
