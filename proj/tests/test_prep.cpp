#include <catch2/catch_amalgamated.hpp>

#include "isatk/prep.hpp"

using namespace isatk;

namespace {

Eigen::MatrixXd row_matrix(const std::vector<double>& v) {
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
    return m;
}

std::vector<prep::FeaturePrep> blank_report(std::size_t f) {
    std::vector<prep::FeaturePrep> rep(f);
    for (std::size_t i = 0; i < f; ++i) rep[i].name = "f" + std::to_string(i);
    return rep;
}

std::vector<double> as_vector(const Eigen::MatrixXd& m, Eigen::Index r = 0) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
    return v;
}

}  // namespace

TEST_CASE("bound_outliers clamps to median +- 5 IQR") {
    SECTION("small spread untouched") {
        auto rep = blank_report(1);
        auto out = prep::bound_outliers(row_matrix({1, 2, 3}), rep);
        CHECK(as_vector(out) == std::vector<double>{1, 2, 3});
    }
    SECTION("degenerate sample with interpolated IQR 1 passes through") {
        auto rep = blank_report(1);
        std::vector<std::string> warn;
        auto out = prep::bound_outliers(row_matrix({5, 5, 5, 9}), rep, &warn);
        CHECK(as_vector(out) == std::vector<double>{5, 5, 5, 9});
    }
    SECTION("IQR 0 skips clamping with a warning") {
        auto rep = blank_report(1);
        std::vector<std::string> warn;
        auto out = prep::bound_outliers(row_matrix({5, 5, 5, 5, 9}), rep, &warn);
        CHECK(as_vector(out) == std::vector<double>{5, 5, 5, 5, 9});
        REQUIRE(warn.size() == 1);
        CHECK(warn[0].find("IQR") != std::string::npos);
        CHECK_FALSE(rep[0].clamped);
    }
    SECTION("hand oracle: Q1=2.25 Q3=4.75 -> 100 clamps to 16") {
        auto rep = blank_report(1);
        auto out = prep::bound_outliers(row_matrix({1, 2, 3, 4, 5, 100}), rep);
        CHECK(as_vector(out) == std::vector<double>{1, 2, 3, 4, 5, 16});
        CHECK(rep[0].clamp_hi == Catch::Approx(16.0));
        CHECK(rep[0].clamp_lo == Catch::Approx(-9.0));
    }
    SECTION("idempotent on random heavy-tailed features") {
        Rng rng(11);
        for (int rep_i = 0; rep_i < 20; ++rep_i) {
            std::vector<double> x(50);
            for (auto& v : x) v = std::exp(3.0 * rng.normal());
            auto rep1 = blank_report(1);
            auto once = prep::bound_outliers(row_matrix(x), rep1);
            auto rep2 = blank_report(1);
            auto twice = prep::bound_outliers(once, rep2);
            CHECK(once == twice);
        }
    }
}

TEST_CASE("boxcox_normalize") {
    SECTION("lambda=1 transform is a shift: z-scores match raw z-scores") {
        std::vector<double> x{2, 4, 7, 11, 3};
        auto y = stats::boxcox_apply(x, 1.0);
        double my = stats::mean(y), sy = stats::stddev_pop(y);
        double mx = stats::mean(x), sx = stats::stddev_pop(x);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK((y[i] - my) / sy == Catch::Approx((x[i] - mx) / sx));
    }
    SECTION("positive data gets no shift, data with min<=0 is rebased to 1") {
        Eigen::MatrixXd F(2, 4);
        F << 1, 2, 3, 4, -2, 0, 1, 5;
        auto rep = blank_report(2);
        prep::boxcox_normalize(F, rep);
        CHECK(rep[0].shift == 0.0);
        CHECK(rep[1].shift == 3.0);  // -(-2) + 1
    }
    SECTION("constant feature passes through flagged") {
        auto rep = blank_report(1);
        std::vector<std::string> warn;
        auto out = prep::boxcox_normalize(row_matrix({4, 4, 4}), rep, &warn);
        CHECK(as_vector(out) == std::vector<double>{4, 4, 4});
        CHECK(rep[0].reason == "constant");
        CHECK(warn.size() == 1);
    }
    SECTION("rank preservation: spearman(pre, post) == 1") {
        Rng rng(13);
        for (int rep_i = 0; rep_i < 20; ++rep_i) {
            std::vector<double> x(30);
            for (auto& v : x) v = rng.normal() * 10.0 + 3.0;
            auto rep = blank_report(1);
            auto out = prep::boxcox_normalize(row_matrix(x), rep);
            CHECK(stats::spearman(x, as_vector(out)) == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("spearman_filter") {
    SECTION("feature equal to a performance row is retained with rho 1") {
        Rng rng(3);
        Eigen::MatrixXd Y(1, 10);
        for (int c = 0; c < 10; ++c) Y(0, c) = rng.uniform();
        Eigen::MatrixXd F = Y;
        auto rep = blank_report(1);
        auto res = prep::spearman_filter(F, Y, {"f0"}, rep);
        CHECK(res.retained == std::vector<int>{0});
        CHECK(res.rho_feature_technique(0, 0) == Catch::Approx(1.0));
    }
    SECTION("exact duplicate features: one dropped, weaker correlate goes") {
        Rng rng(4);
        Eigen::MatrixXd Y(1, 20);
        for (int c = 0; c < 20; ++c) Y(0, c) = rng.uniform();
        Eigen::MatrixXd F(3, 20);
        F.row(0) = Y.row(0);
        F.row(1) = Y.row(0);  // exact copy of retained feature
        for (int c = 0; c < 20; ++c) F(2, c) = rng.normal();
        auto rep = blank_report(3);
        auto res = prep::spearman_filter(F, Y, {"a", "b", "noise"}, rep);
        REQUIRE(res.retained.size() == 1);
        CHECK(res.retained[0] == 0);  // rho tie, lexicographically smaller name kept
        CHECK(rep[1].reason == "duplicate_of:a");
    }
    SECTION("fewer than 3 instances errors") {
        Eigen::MatrixXd F(1, 2), Y(1, 2);
        F << 1, 2;
        Y << 0.1, 0.2;
        auto rep = blank_report(1);
        CHECK_THROWS_AS(prep::spearman_filter(F, Y, {"f"}, rep), Error);
    }
}

TEST_CASE("run_prep end to end keeps informative features") {
    Rng rng(21);
    meta::Metadata md;
    const int i = 60;
    md.feature_names = {"signal", "noise", "copy"};
    md.technique_names = {"T"};
    md.F.resize(3, i);
    md.Y.resize(1, i);
    for (int c = 0; c < i; ++c) {
        double s = rng.normal();
        md.F(0, c) = s;
        md.F(1, c) = rng.normal();
        md.F(2, c) = s;  // duplicate of signal
        md.Y(0, c) = std::clamp(0.5 + 0.3 * s + 0.01 * rng.normal(), 0.0, 1.0);
        md.instance_ids.push_back("i" + std::to_string(c));
    }
    auto res = prep::run_prep(md);
    REQUIRE(res.transformed.n_features() == 1);
    CHECK(res.transformed.feature_names[0] == "copy");  // rho tie: lexicographic keep
    // transformed features are z-scored
    auto v = as_vector(res.transformed.F);
    CHECK(stats::mean(v) == Catch::Approx(0.0).margin(1e-9));
    CHECK(stats::stddev_pop(v) == Catch::Approx(1.0).margin(1e-9));
    // report covers every input feature exactly once
    CHECK(res.report.features.size() == 3);
    CHECK(res.report.features[1].reason == "low_correlation");
}

TEST_CASE("apply_feature_prep replays the training transform") {
    Rng rng(8);
    meta::Metadata md;
    const int i = 40;
    md.feature_names = {"a"};
    md.technique_names = {"T"};
    md.F.resize(1, i);
    md.Y.resize(1, i);
    for (int c = 0; c < i; ++c) {
        md.F(0, c) = std::exp(rng.normal()) * 5.0;
        md.Y(0, c) = std::clamp(md.F(0, c) / 50.0, 0.0, 1.0);
        md.instance_ids.push_back("i" + std::to_string(c));
    }
    auto res = prep::run_prep(md);
    REQUIRE(res.transformed.n_features() == 1);
    const auto& fp = res.report.features[0];
    for (int c = 0; c < i; ++c)
        CHECK(prep::apply_feature_prep(fp, md.F(0, c)) ==
              Catch::Approx(res.transformed.F(0, c)).margin(1e-12));
    // params json round-trip
    auto j = prep::params_json(res.report);
    auto back = prep::params_from_json(j);
    REQUIRE(back.size() == 1);
    CHECK(prep::apply_feature_prep(back[0], 7.5) ==
          Catch::Approx(prep::apply_feature_prep(fp, 7.5)));
}
