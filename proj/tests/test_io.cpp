#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "magflow/io.hpp"
#include "magflow/random.hpp"

using namespace magflow;

TEST(FormatDouble, RoundTrips) {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform(-300.0, 300.0)));
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(std::strtod(format_double(std::numeric_limits<double>::denorm_min()).c_str(), nullptr),
              std::numeric_limits<double>::denorm_min());
}

TEST(Csv, ConfigLineHeaderAndRows) {
    std::ostringstream out;
    const json config{{"command", "spectrum"}, {"k", 10}, {"B", 0.5}};
    CsvWriter w(out, config, {"k", "m", "value"});
    w.cell(10).cell(0).cell(4.5);
    w.end_row();
    w.cell(10).empty().cell(std::string("x"));
    w.end_row();
    EXPECT_EQ(out.str(), "# config {\"command\":\"spectrum\",\"k\":10,\"B\":0.5}\nk,m,value\n10,0,4.5\n10,,x\n");
}

TEST(Json, Helpers) {
    EXPECT_EQ(to_json(std::complex<double>(1.5, -2.0)).dump(), "{\"re\":1.5,\"im\":-2.0}");
    EXPECT_EQ(optional_json(std::optional<int>{}).dump(), "null");
    EXPECT_EQ(optional_json(std::optional<int>{3}).dump(), "3");
    // json keeps insertion order, so dumps are reproducible
    json a;
    a["z"] = 1;
    a["a"] = 2;
    EXPECT_EQ(a.dump(), "{\"z\":1,\"a\":2}");
}
