#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "isatk/featsel.hpp"

using namespace isatk;

namespace {

// two Gaussian blobs along z1, labels split by blob
struct Blobs {
    Eigen::MatrixXd F;  // features x instances
    std::vector<int> labels;
    std::vector<std::string> ids;
};

Blobs make_blobs(int per_side, double sep, std::uint64_t seed) {
    Rng rng(seed);
    Blobs b;
    const int n = 2 * per_side;
    b.F.resize(3, n);
    for (int c = 0; c < n; ++c) {
        int side = c < per_side ? 0 : 1;
        b.F(0, c) = (side ? sep : -sep) / 2.0 + rng.normal();
        b.F(1, c) = rng.normal();
        b.F(2, c) = rng.normal();
        b.labels.push_back(side);
        b.ids.push_back("i" + std::to_string(c));
    }
    return b;
}

}  // namespace

TEST_CASE("pca on 2D data is a distance-preserving rotation") {
    Rng rng(17);
    Eigen::MatrixXd X(2, 25);
    for (int c = 0; c < 25; ++c) {
        X(0, c) = rng.normal() * 3.0;
        X(1, c) = rng.normal();
    }
    auto p = pca::fit_pca2(X);
    Eigen::MatrixXd Z = p.transform(X);
    for (int a = 0; a < 25; ++a)
        for (int b = a + 1; b < 25; ++b) {
            double dx = (X.col(a) - X.col(b)).norm();
            double dz = (Z.col(a) - Z.col(b)).norm();
            CHECK(dx == Catch::Approx(dz).margin(1e-9));
        }
    // deterministic sign: largest-magnitude loading positive
    for (int c = 0; c < 2; ++c) {
        Eigen::Index arg;
        p.loadings.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(p.loadings(arg, c) > 0.0);
    }
}

TEST_CASE("cluster_features groups duplicated features") {
    Rng rng(23);
    Eigen::MatrixXd F(4, 30);
    for (int c = 0; c < 30; ++c) {
        double a = rng.normal(), b = rng.normal();
        F(0, c) = a;
        F(1, c) = a;
        F(2, c) = b;
        F(3, c) = b;
    }
    auto cs = featsel::cluster_features(F, 2, Rng(1));
    CHECK(cs.k == 2);
    CHECK(cs.assignment[0] == cs.assignment[1]);
    CHECK(cs.assignment[2] == cs.assignment[3]);
    CHECK(cs.assignment[0] != cs.assignment[2]);
}

TEST_CASE("cluster_features: orthogonal features in singleton clusters") {
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(3, 9);
    for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 9; ++c) F(j, c) = (c % 3 == j) ? 1.0 : 0.0;
    auto cs = featsel::cluster_features(F, 3, Rng(2));
    std::set<int> distinct(cs.assignment.begin(), cs.assignment.end());
    CHECK(distinct.size() == 3);
}

TEST_CASE("silhouette-selected k recovers 4 prototype groups") {
    Rng rng(99);
    const int i = 60;
    Eigen::MatrixXd protos(4, i);
    for (int p = 0; p < 4; ++p)
        for (int c = 0; c < i; ++c) protos(p, c) = rng.normal();
    Eigen::MatrixXd F(12, i);
    for (int p = 0; p < 4; ++p)
        for (int copy = 0; copy < 3; ++copy)
            for (int c = 0; c < i; ++c)
                F(3 * p + copy, c) = protos(p, c) + 0.1 * rng.normal();
    // z-score rows, as the pipeline would deliver them
    for (int r = 0; r < 12; ++r) {
        double m = F.row(r).mean();
        double s = std::sqrt((F.row(r).array() - m).square().mean());
        F.row(r) = (F.row(r).array() - m) / s;
    }
    auto cs = featsel::cluster_features(F, 0, Rng(5));
    CHECK(cs.k == 4);
    // copies of one prototype share a cluster
    for (int p = 0; p < 4; ++p) {
        CHECK(cs.assignment[3 * p] == cs.assignment[3 * p + 1]);
        CHECK(cs.assignment[3 * p] == cs.assignment[3 * p + 2]);
    }
}

TEST_CASE("enumerate_candidates") {
    featsel::FeatureClusterSet cs;
    SECTION("cartesian product of sizes (2,3) -> 6") {
        cs.k = 2;
        cs.assignment = {0, 0, 1, 1, 1};
        auto combos = featsel::enumerate_candidates(cs, 1000, Rng(1));
        CHECK(combos.size() == 6);
        std::set<std::vector<int>> uniq(combos.begin(), combos.end());
        CHECK(uniq.size() == 6);
    }
    SECTION("singleton clusters -> 1 candidate") {
        cs.k = 3;
        cs.assignment = {0, 1, 2};
        auto combos = featsel::enumerate_candidates(cs, 1000, Rng(1));
        REQUIRE(combos.size() == 1);
        CHECK(combos[0] == std::vector<int>{0, 1, 2});
    }
    SECTION("cap rule: sizes (10,10,10,10) capped at 1000 distinct") {
        cs.k = 4;
        cs.assignment.resize(40);
        for (int f = 0; f < 40; ++f) cs.assignment[f] = f / 10;
        auto combos = featsel::enumerate_candidates(cs, 1000, Rng(7));
        CHECK(combos.size() == 1000);
        std::set<std::vector<int>> uniq(combos.begin(), combos.end());
        CHECK(uniq.size() == 1000);
    }
}

TEST_CASE("score_candidate separates blobs and scores noise at chance") {
    auto b = make_blobs(40, 8.0, 31);
    meta::GoodnessMatrix g;
    g.good.resize(1, b.F.cols());
    for (int c = 0; c < b.F.cols(); ++c) g.good(0, c) = b.labels[static_cast<std::size_t>(c)];
    auto order = featsel::canonical_instance_order(b.ids);

    auto cs = featsel::score_candidate({0, 1, 2}, b.F, g, order, Rng(41));
    CHECK(cs.mean_error <= 0.05);

    // coin-flip labels hover near 0.5
    Rng coin(55);
    for (int c = 0; c < b.F.cols(); ++c) g.good(0, c) = coin.uniform() < 0.5 ? 1 : 0;
    auto cs2 = featsel::score_candidate({0, 1, 2}, b.F, g, order, Rng(42));
    CHECK(cs2.mean_error >= 0.4);
    CHECK(cs2.mean_error <= 0.6);
}

TEST_CASE("single-class technique excluded from the mean") {
    auto b = make_blobs(10, 6.0, 3);
    meta::GoodnessMatrix g;
    g.good.setZero(2, b.F.cols());
    for (int c = 0; c < b.F.cols(); ++c) g.good(0, c) = b.labels[static_cast<std::size_t>(c)];
    g.good.row(1).setOnes();  // single-class
    auto order = featsel::canonical_instance_order(b.ids);
    auto cs = featsel::score_candidate({0, 1}, b.F, g, order, Rng(4));
    REQUIRE(cs.technique_excluded.size() == 2);
    CHECK_FALSE(cs.technique_excluded[0]);
    CHECK(cs.technique_excluded[1]);
    CHECK(cs.technique_error[1] == 0.0);
    CHECK(cs.mean_error == Catch::Approx(cs.technique_error[0]));
}

TEST_CASE("scores are invariant to instance order") {
    auto b = make_blobs(15, 5.0, 77);
    meta::GoodnessMatrix g;
    g.good.resize(1, b.F.cols());
    for (int c = 0; c < b.F.cols(); ++c) g.good(0, c) = b.labels[static_cast<std::size_t>(c)];
    auto order = featsel::canonical_instance_order(b.ids);
    auto base = featsel::score_candidate({0, 1, 2}, b.F, g, order, Rng(9));

    // permute instances, keep ids attached
    std::vector<int> perm(static_cast<std::size_t>(b.F.cols()));
    std::iota(perm.begin(), perm.end(), 0);
    Rng(123).shuffle(perm);
    Eigen::MatrixXd F2(b.F.rows(), b.F.cols());
    meta::GoodnessMatrix g2;
    g2.good.resize(1, b.F.cols());
    std::vector<std::string> ids2(b.ids.size());
    for (int c = 0; c < b.F.cols(); ++c) {
        F2.col(c) = b.F.col(perm[static_cast<std::size_t>(c)]);
        g2.good(0, c) = g.good(0, perm[static_cast<std::size_t>(c)]);
        ids2[static_cast<std::size_t>(c)] =
            b.ids[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
    }
    auto order2 = featsel::canonical_instance_order(ids2);
    auto permuted = featsel::score_candidate({0, 1, 2}, F2, g2, order2, Rng(9));
    CHECK(permuted.mean_error == Catch::Approx(base.mean_error));
    CHECK(permuted.technique_error[0] == Catch::Approx(base.technique_error[0]));
}

TEST_CASE("select_features picks the informative candidate deterministically") {
    auto b = make_blobs(30, 7.0, 19);
    meta::GoodnessMatrix g;
    g.good.resize(1, b.F.cols());
    for (int c = 0; c < b.F.cols(); ++c) g.good(0, c) = b.labels[static_cast<std::size_t>(c)];
    auto order = featsel::canonical_instance_order(b.ids);
    // candidate 0 has the label-generating feature 0; candidate 1 is noise only
    auto informative = featsel::score_candidate({0, 1}, b.F, g, order, Rng(6));
    auto noise = featsel::score_candidate({1, 2}, b.F, g, order, Rng(6));
    std::vector<featsel::CandidateScore> scores{informative, noise};
    CHECK(featsel::select_features(scores) == 0);

    // single candidate returned
    std::vector<featsel::CandidateScore> one{noise};
    CHECK(featsel::select_features(one) == 0);

    // exact tie -> first in enumeration order
    std::vector<featsel::CandidateScore> tie{noise, noise};
    CHECK(featsel::select_features(tie) == 0);
}
