// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "runsafe/errors.hpp"
#include "runsafe/eval.hpp"

using namespace runsafe;

namespace {

// scipy.stats.qmc.Sobol(d=6, scramble=False).random(33)[1:]
constexpr double kSobolOracle[32][6] = {
    {0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
    {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
    {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
    {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
    {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
    {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
    {0.125, 0.625, 0.375, 0.125, 0.125, 0.375},
    {0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125},
    {0.6875, 0.8125, 0.4375, 0.9375, 0.0625, 0.8125},
    {0.9375, 0.0625, 0.6875, 0.1875, 0.3125, 0.5625},
    {0.4375, 0.5625, 0.1875, 0.6875, 0.8125, 0.0625},
    {0.3125, 0.1875, 0.3125, 0.5625, 0.9375, 0.4375},
    {0.8125, 0.6875, 0.8125, 0.0625, 0.4375, 0.9375},
    {0.5625, 0.4375, 0.0625, 0.8125, 0.1875, 0.6875},
    {0.0625, 0.9375, 0.5625, 0.3125, 0.6875, 0.1875},
    {0.09375, 0.46875, 0.46875, 0.65625, 0.28125, 0.96875},
    {0.59375, 0.96875, 0.96875, 0.15625, 0.78125, 0.46875},
    {0.84375, 0.21875, 0.21875, 0.90625, 0.53125, 0.21875},
    {0.34375, 0.71875, 0.71875, 0.40625, 0.03125, 0.71875},
    {0.46875, 0.09375, 0.84375, 0.28125, 0.15625, 0.84375},
    {0.96875, 0.59375, 0.34375, 0.78125, 0.65625, 0.34375},
    {0.71875, 0.34375, 0.59375, 0.03125, 0.90625, 0.09375},
    {0.21875, 0.84375, 0.09375, 0.53125, 0.40625, 0.59375},
    {0.15625, 0.15625, 0.53125, 0.84375, 0.84375, 0.65625},
    {0.65625, 0.65625, 0.03125, 0.34375, 0.34375, 0.15625},
    {0.90625, 0.40625, 0.78125, 0.59375, 0.09375, 0.40625},
    {0.40625, 0.90625, 0.28125, 0.09375, 0.59375, 0.90625},
    {0.28125, 0.28125, 0.15625, 0.21875, 0.71875, 0.53125},
    {0.78125, 0.78125, 0.65625, 0.71875, 0.21875, 0.03125},
    {0.53125, 0.03125, 0.40625, 0.46875, 0.46875, 0.28125},
    {0.03125, 0.53125, 0.90625, 0.96875, 0.96875, 0.78125},
    {0.046875, 0.265625, 0.703125, 0.546875, 0.140625, 0.921875},
};

DoeSpec small_spec(Procedure p, std::size_t n) {
    DoeSpec s = DoeSpec::defaults(p);
    s.num_points = n;
    s.threads = 2;
    return s;
}

}  // namespace

TEST(Sobol, MatchesReferenceSequence) {
    const auto pts = sobol_unit(32, 6);
    ASSERT_EQ(pts.size(), 32u);
    for (std::size_t i = 0; i < 32; ++i) {
        ASSERT_EQ(pts[i].size(), 6u);
        for (std::size_t d = 0; d < 6; ++d) EXPECT_DOUBLE_EQ(pts[i][d], kSobolOracle[i][d]) << i << "," << d;
    }
}

TEST(Sobol, PointsInsideUnitCubeAndDistinct) {
    const auto pts = sobol_unit(1024, kSobolMaxDimension);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (double x : pts[i]) {
            EXPECT_GT(x, 0.0);
            EXPECT_LT(x, 1.0);
        }
        if (i > 0) {
            EXPECT_NE(pts[i], pts[i - 1]);
        }
    }
}

TEST(Sobol, StratifiesEveryDimension) {
    // Sequence indices 16..31 (counting the skipped origin as 0) form a
    // 16-point block that puts exactly one point in each 1/16 bin per axis.
    const auto pts = sobol_unit(31, kSobolMaxDimension);
    for (std::size_t d = 0; d < kSobolMaxDimension; ++d) {
        std::vector<int> bins(16, 0);
        for (std::size_t i = 15; i < 31; ++i) ++bins[static_cast<int>(pts[i][d] * 16.0)];
        for (int b : bins) EXPECT_EQ(b, 1) << "dimension " << d;
    }
}

TEST(Sobol, DimensionLimit) {
    try {
        sobol_unit(4, kSobolMaxDimension + 1);
        FAIL() << "expected DimensionLimit";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionLimit);
    }
}

TEST(DoeSpecTest, PointsRespectBounds) {
    const DoeSpec spec = small_spec(Procedure::Takeoff, 64);
    const auto pts = sobol_points(spec);
    ASSERT_EQ(pts.size(), 64u);
    for (const auto& p : pts) {
        ASSERT_EQ(p.size(), spec.dimensions.size());
        for (std::size_t d = 0; d < p.size(); ++d) {
            EXPECT_GE(p[d], spec.dimensions[d].lower);
            EXPECT_LE(p[d], spec.dimensions[d].upper);
        }
    }
}

TEST(DoeSpecTest, SinglePointIsCentre) {
    DoeSpec spec = small_spec(Procedure::Takeoff, 1);
    const auto pts = sobol_points(spec);
    ASSERT_EQ(pts.size(), 1u);
    for (std::size_t d = 0; d < spec.dimensions.size(); ++d) {
        const auto& dim = spec.dimensions[d];
        EXPECT_DOUBLE_EQ(pts[0][d], 0.5 * (dim.lower + dim.upper));
    }
}

TEST(DoeSpecTest, JsonRoundTripAndValidation) {
    const DoeSpec spec = DoeSpec::defaults(Procedure::Landing);
    EXPECT_TRUE(validate(spec).empty());
    const auto back = doe_spec_from_json(to_json(spec));
    EXPECT_EQ(to_json(back), to_json(spec));

    DoeSpec bad = spec;
    bad.num_points = 0;
    bad.dimensions[0].lower = bad.dimensions[0].upper + 1.0;
    EXPECT_GE(validate(bad).size(), 2u);

    auto j = to_json(spec);
    j["dimensions"][0]["path"] = "aircraft.wingspan";
    EXPECT_THROW(doe_spec_from_json(j), ValidationError);
}

TEST(DoeSpecTest, ApplyDimensionCoupledSpeeds) {
    Scenario s = base_scenario(Procedure::Takeoff);
    apply_dimension(s, "v1", 66.0);
    EXPECT_DOUBLE_EQ(s.takeoff.v1, 66.0);
    EXPECT_DOUBLE_EQ(s.takeoff.vr, 69.0);
    EXPECT_DOUBLE_EQ(s.takeoff.v2, 74.0);
    EXPECT_DOUBLE_EQ(s.rto_speed, 66.0);
    EXPECT_THROW(apply_dimension(s, "bogus", 1.0), ValidationError);
}

TEST(Convergence, HandSeries) {
    const std::vector<SeriesPoint> series{
        {10, 1100}, {11, 1070}, {12, 1015}, {13, 1030}, {15, 1010}, {16, 1005}, {17, 1000},
    };
    EXPECT_DOUBLE_EQ(convergence_time(series, 1000.0, 0.02), 15.0);
    EXPECT_DOUBLE_EQ(convergence_time(series, 1000.0, 0.2), 10.0);
    EXPECT_THROW(convergence_time({{1, 5.0}}, 100.0, 0.02), Error);
    EXPECT_THROW(convergence_time({}, 100.0, 0.02), Error);
}

TEST(Summary, HandRows) {
    std::vector<DoeRow> rows(4);
    const double dev[] = {0.01, -0.01, 0.03, 0.0};
    for (std::size_t i = 0; i < 4; ++i) {
        rows[i].index = i;
        rows[i].truth_total = 1000.0;
        rows[i].static_total = 1000.0 * (1.0 + dev[i]);
        rows[i].deviation = dev[i];
        rows[i].convergence = 10.0 + static_cast<double>(i);
    }
    rows[3].feasible = false;
    const auto s = summarize(rows);
    EXPECT_EQ(s.runs, 3u);
    EXPECT_EQ(s.infeasible, 1u);
    EXPECT_NEAR(s.deviation_mean, 0.01, 1e-12);
    EXPECT_NEAR(s.deviation_std, 0.02, 1e-12);
    EXPECT_NEAR(s.conservative_fraction, 2.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(s.convergence.p50, 11.0);
    EXPECT_DOUBLE_EQ(s.convergence.max, 12.0);

    DoeThresholds t;
    t.max_abs_mean_deviation = 0.005;
    t.max_deviation_std = 0.05;
    const auto v = check_thresholds(s, t);
    ASSERT_EQ(v.size(), 1u);
    t.max_abs_mean_deviation = 0.02;
    EXPECT_TRUE(check_thresholds(s, t).empty());
}

TEST(RunDoe, TakeoffReproducibleCsvAndSummary) {
    const DoeSpec spec = small_spec(Procedure::Takeoff, 6);
    const auto a = run_doe(spec);
    DoeSpec serial = spec;
    serial.threads = 1;
    const auto b = run_doe(serial);
    ASSERT_EQ(a.rows.size(), 6u);
    EXPECT_EQ(rows_csv(a), rows_csv(b));

    const auto again = summarize(a.rows);
    EXPECT_DOUBLE_EQ(again.deviation_mean, a.summary.deviation_mean);
    for (const auto& r : a.rows) {
        ASSERT_TRUE(r.feasible) << r.failure;
        EXPECT_NEAR(r.deviation, (r.static_total - r.truth_total) / r.truth_total, 1e-12);
        EXPECT_LT(std::abs(r.deviation), 0.01);
        EXPECT_TRUE(r.convergence);
        EXPECT_TRUE(r.rto_convergence);
    }
    const auto j = summary_json(a);
    EXPECT_TRUE(j.contains("passed"));
    EXPECT_EQ(rows_csv(a).find("latency"), std::string::npos);
}

TEST(RunDoe, LandingRowsFeasible) {
    const auto r = run_doe(small_spec(Procedure::Landing, 4));
    ASSERT_EQ(r.rows.size(), 4u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.feasible) << row.failure;
        EXPECT_GT(row.static_total, 0.0);
        EXPECT_GT(row.truth_total, 0.0);
    }
}

TEST(Histogram, BinsCoverAllFeasibleRows) {
    std::vector<DoeRow> rows(3);
    rows[0].deviation = 0.001;
    rows[1].deviation = 0.006;
    rows[2].deviation = 0.0071;
    const std::string csv = histogram_csv(rows, 0.005);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    EXPECT_GE(lines, 3u);  // header plus two bins
}

TEST(Latency, UpdateOrdering) {
    const auto rep = latency_bench(2000);
    EXPECT_GE(rep.acceleration.samples, 2000u);
    EXPECT_GE(rep.braking.samples, 2000u);
    EXPECT_GT(rep.acceleration.mean_ms, 0.0);
    EXPECT_LT(rep.acceleration.mean_ms, 1.0);
    EXPECT_LT(rep.braking.mean_ms, 1.0);
}
