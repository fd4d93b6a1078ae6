#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "isatk/graph_metrics.hpp"

using namespace isatk;
using cfg::CfgGraph;

namespace {

CfgGraph path3() { return {"p3", 3, {{0, 1}, {1, 2}}}; }
CfgGraph triangle() { return {"k3", 3, {{0, 1}, {1, 2}, {2, 0}}}; }

CfgGraph complete(int n) {
    CfgGraph g{"k" + std::to_string(n), n, {}};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) g.edges.push_back({a, b});
    return g;
}

}  // namespace

TEST_CASE("P3 metrics match hand counts") {
    auto m = cfg::method_metrics(path3());
    CHECK(m.radius == 1.0);
    CHECK(m.diameter == 2.0);
    CHECK(m.center_size == 1.0);
    CHECK(m.periphery_size == 2.0);
    CHECK(m.avg_shortest_path == Catch::Approx(8.0 / 6.0));
    CHECK(m.cyclomatic_complexity == 1.0);  // 2 - 3 + 2
    // eigen oracle: P3 Laplacian spectrum {0, 1, 3}
    CHECK(m.algebraic_connectivity == Catch::Approx(1.0).margin(1e-9));
    CHECK(m.vertex_connectivity == 1.0);
    CHECK(m.edge_connectivity == 1.0);
    CHECK(m.transitivity == 0.0);
}

TEST_CASE("K3 metrics") {
    auto m = cfg::method_metrics(triangle());
    CHECK(m.radius == 1.0);
    CHECK(m.diameter == 1.0);
    CHECK(m.transitivity == 1.0);
    CHECK(m.density == 1.0);
    CHECK(m.cyclomatic_complexity == 2.0);  // 3 - 3 + 2
    // eigen oracle: K3 Laplacian spectrum {0, 3, 3}
    CHECK(m.algebraic_connectivity == Catch::Approx(3.0).margin(1e-9));
    CHECK(m.vertex_connectivity == 2.0);
    CHECK(m.edge_connectivity == 2.0);
}

TEST_CASE("if-then-else diamond has cc 2") {
    CfgGraph g{"diamond", 4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}};
    CHECK(cfg::method_metrics(g).cyclomatic_complexity == 2.0);
}

TEST_CASE("K_n transitivity and density are 1 for n >= 3") {
    for (int n = 3; n <= 6; ++n) {
        auto m = cfg::method_metrics(complete(n));
        CHECK(m.transitivity == Catch::Approx(1.0));
        CHECK(m.density == Catch::Approx(1.0));
        CHECK(m.vertex_connectivity == n - 1.0);
    }
}

TEST_CASE("single-node graph uses zero conventions") {
    CfgGraph g{"one", 1, {}};
    auto m = cfg::method_metrics(g);
    CHECK(m.radius == 0.0);
    CHECK(m.diameter == 0.0);
    CHECK(m.algebraic_connectivity == 0.0);
    CHECK(m.vertex_connectivity == 0.0);
    CHECK(m.edge_connectivity == 0.0);
    CHECK(m.density == 0.0);
    CHECK(m.cyclomatic_complexity == 1.0);  // 0 - 1 + 2
}

TEST_CASE("disconnected graph errors naming components") {
    CfgGraph g{"split", 4, {{0, 1}, {2, 3}}};
    try {
        cfg::method_metrics(g);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("2 components") != std::string::npos);
    }
}

TEST_CASE("self-loops and duplicate edges are dropped") {
    CfgGraph g{"dups", 3, {{0, 1}, {0, 1}, {1, 1}, {1, 2}}};
    auto m = cfg::method_metrics(g);
    CHECK(m.edges == 2);
    CHECK(m.cyclomatic_complexity == 1.0);
}

TEST_CASE("metrics are invariant under node relabeling") {
    Rng rng(31);
    for (int rep = 0; rep < 15; ++rep) {
        // random connected graph: spanning path + extra edges
        int n = 3 + static_cast<int>(rng.index(8));
        CfgGraph g{"rand", n, {}};
        for (int v = 1; v < n; ++v) g.edges.push_back({v - 1, v});
        int extra = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
        for (int e = 0; e < extra; ++e) {
            int a = static_cast<int>(rng.index(n)), b = static_cast<int>(rng.index(n));
            if (a != b) g.edges.push_back({a, b});
        }
        auto base = cfg::method_metrics(g);

        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        CfgGraph h{"perm", n, {}};
        for (auto [a, b] : g.edges) h.edges.push_back({perm[a], perm[b]});
        auto pm = cfg::method_metrics(h);

        CHECK(pm.radius == base.radius);
        CHECK(pm.diameter == base.diameter);
        CHECK(pm.center_size == base.center_size);
        CHECK(pm.periphery_size == base.periphery_size);
        CHECK(pm.avg_shortest_path == Catch::Approx(base.avg_shortest_path));
        CHECK(pm.algebraic_connectivity ==
              Catch::Approx(base.algebraic_connectivity).margin(1e-9));
        CHECK(pm.vertex_connectivity == base.vertex_connectivity);
        CHECK(pm.edge_connectivity == base.edge_connectivity);
        CHECK(pm.transitivity == Catch::Approx(base.transitivity));
        CHECK(pm.cyclomatic_complexity == base.cyclomatic_complexity);
    }
}

TEST_CASE("adding an edge never increases radius, diameter or path lengths") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 4 + static_cast<int>(rng.index(6));
        CfgGraph g{"grow", n, {}};
        for (int v = 1; v < n; ++v) g.edges.push_back({v - 1, v});
        auto before = cfg::method_metrics(g);
        int a = static_cast<int>(rng.index(n)), b = static_cast<int>(rng.index(n));
        if (a == b) b = (b + 1) % n;
        g.edges.push_back({a, b});
        auto after = cfg::method_metrics(g);
        CHECK(after.radius <= before.radius);
        CHECK(after.diameter <= before.diameter);
        CHECK(after.avg_shortest_path <= before.avg_shortest_path + 1e-12);
    }
}

TEST_CASE("class aggregation") {
    SECTION("per_cc10 and avg_cc") {
        std::vector<CfgGraph> methods(4, path3());
        std::vector<double> cc{12, 3, 5, 11};
        auto f = cfg::class_features(methods, cc);
        CHECK(f.per_cc10 == 50.0);
        CHECK(f.avg_cc == Catch::Approx(7.75));
    }
    SECTION("single method: avg=min=max, std_cc = 0") {
        std::vector<CfgGraph> methods{triangle()};
        auto f = cfg::class_features(methods);
        CHECK(f.vertices_avg == f.vertices_min);
        CHECK(f.vertices_avg == f.vertices_max);
        CHECK(f.edges_avg == f.edges_min);
        CHECK(f.std_cc == 0.0);
        CHECK(f.std_deg == 0.0);
    }
    SECTION("two copies of P3 equal the P3 metrics") {
        std::vector<CfgGraph> methods{path3(), path3()};
        auto f = cfg::class_features(methods);
        auto m = cfg::method_metrics(path3());
        CHECK(f.avg_rad == m.radius);
        CHECK(f.avg_diam == m.diameter);
        CHECK(f.avg_spl == Catch::Approx(m.avg_shortest_path));
        CHECK(f.vertices_avg == 3.0);
        CHECK(f.avg_cc == m.cyclomatic_complexity);
    }
    SECTION("empty class errors") {
        CHECK_THROWS_AS(cfg::class_features({}), Error);
    }
}

TEST_CASE("class graphs load from JSON") {
    auto p = std::filesystem::temp_directory_path() / "cfg_class.json";
    {
        std::ofstream out(p);
        out << R"([{"class":"com.example.A","methods":[
                {"id":"m1","n":3,"edges":[[0,1],[1,2]]},
                {"id":"m2","n":1,"edges":[]}]},
               {"class":"com.example.B","methods":[
                {"id":"m","n":3,"edges":[[0,1],[1,2],[2,0]]}]}])";
    }
    auto classes = cfg::load_class_graphs(p.string());
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].class_id == "com.example.A");
    REQUIRE(classes[0].methods.size() == 2);
    CHECK(classes[0].methods[0].node_count == 3);
    auto f = cfg::class_features(classes[1].methods);
    CHECK(f.transitivity == 1.0);
}
