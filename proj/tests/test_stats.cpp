#include <catch2/catch_amalgamated.hpp>

#include "isatk/stats.hpp"

using namespace isatk;

TEST_CASE("quantiles use linear interpolation of order statistics") {
    // hand oracle for (1,2,3,4,5,100): positions (n-1)p -> 1.25 and 3.75
    std::vector<double> x{1, 2, 3, 4, 5, 100};
    CHECK(stats::quantile(x, 0.25) == Catch::Approx(2.25));
    CHECK(stats::quantile(x, 0.75) == Catch::Approx(4.75));
    CHECK(stats::median(x) == Catch::Approx(3.5));
    CHECK(stats::quantile(x, 0.0) == 1.0);
    CHECK(stats::quantile(x, 1.0) == 100.0);
}

TEST_CASE("average ranks handle ties") {
    std::vector<double> x{3.0, 1.0, 1.0, 2.0};
    auto r = stats::ranks_average(x);
    CHECK(r[0] == 4.0);
    CHECK(r[1] == 1.5);
    CHECK(r[2] == 1.5);
    CHECK(r[3] == 3.0);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(40), b(40);
        for (int i = 0; i < 40; ++i) {
            a[i] = rng.normal();
            b[i] = 0.5 * a[i] + rng.normal();
        }
        double rho = stats::spearman(a, b);
        // random strictly monotone map: scaled exp or cube, applied to a
        std::vector<double> am(a);
        int pick = static_cast<int>(rng.index(3));
        for (auto& v : am)
            v = pick == 0 ? std::exp(0.7 * v) : pick == 1 ? v * v * v : 3.0 * v + 11.0;
        CHECK(stats::spearman(am, b) == Catch::Approx(rho).margin(1e-12));
    }
}

TEST_CASE("spearman self-correlation is 1") {
    std::vector<double> a{0.1, 0.9, 0.4, 0.4, 0.7};
    CHECK(stats::spearman(a, a) == Catch::Approx(1.0));
}

TEST_CASE("box-cox lambda grid recovers canonical cases") {
    // lambda = 0: lognormal sample (strictly positive, no shift needed)
    Rng rng(42);
    std::vector<double> x(10000);
    for (auto& v : x) v = std::exp(rng.normal());
    auto fit = stats::boxcox_fit(x);
    CHECK(std::abs(fit.lambda) <= 0.15);

    // lambda = 0 limit definition: transform is ln
    auto y = stats::boxcox_apply(std::vector<double>{1.0, std::exp(1.0)}, 0.0);
    CHECK(y[0] == Catch::Approx(0.0));
    CHECK(y[1] == Catch::Approx(1.0));

    // lambda = 1: pure shift by -1
    auto y1 = stats::boxcox_apply(std::vector<double>{2.0, 5.0}, 1.0);
    CHECK(y1[0] == Catch::Approx(1.0));
    CHECK(y1[1] == Catch::Approx(4.0));
}

TEST_CASE("box-cox rejects non-positive input") {
    std::vector<double> x{1.0, 0.0, 2.0};
    CHECK_THROWS_AS(stats::boxcox_fit(x), Error);
}

TEST_CASE("population stddev") {
    std::vector<double> x{2.0, 4.0};
    CHECK(stats::stddev_pop(x) == Catch::Approx(1.0));
    std::vector<double> one{5.0};
    CHECK(stats::stddev_pop(one) == 0.0);
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(123), b(123);
    CHECK(a.u64() == b.u64());
    Rng c = a.derive(1), d = b.derive(2);
    CHECK(c.u64() != d.u64());
    Rng e(123);
    Rng f = e.derive(1);
    e.u64();
    Rng g = Rng(123).derive(1);  // derivation ignores parent stream position
    CHECK(f.u64() == g.u64());
}
