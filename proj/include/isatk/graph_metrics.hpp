#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/stats.hpp"

namespace isatk::cfg {

// Method-level control-flow graph. Nodes are statements, edges control flow.
struct CfgGraph {
    std::string method_id;
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
};

struct MethodMetrics {
    int vertices = 0;
    int edges = 0;  // directed simple count, same view as cyclomatic complexity
    double radius = 0.0;
    double diameter = 0.0;
    double center_size = 0.0;
    double periphery_size = 0.0;
    double avg_shortest_path = 0.0;
    double algebraic_connectivity = 0.0;
    double avg_degree = 0.0;
    double density = 0.0;
    double vertex_connectivity = 0.0;
    double edge_connectivity = 0.0;
    double transitivity = 0.0;
    double cyclomatic_complexity = 0.0;
};

// Aggregated per-class feature vector (one real per CFG feature plus the
// cyclomatic-complexity summaries).
struct ClassCfgFeatures {
    double vertices_avg = 0, vertices_min = 0, vertices_max = 0;
    double edges_avg = 0, edges_min = 0, edges_max = 0;
    double avg_rad = 0;
    double avg_diam = 0;
    double avg_center = 0;
    double avg_periphery = 0;
    double avg_spl = 0;
    double alg_conn = 0;
    double avg_deg = 0;
    double std_deg = 0;
    double avg_density = 0;
    double vertex_conn = 0;
    double avg_edge_conn = 0;
    double transitivity = 0;
    double avg_cc = 0;
    double std_cc = 0;
    double per_cc10 = 0;
};

inline const std::vector<std::pair<std::string, double ClassCfgFeatures::*>>&
class_feature_fields() {
    static const std::vector<std::pair<std::string, double ClassCfgFeatures::*>> fields = {
        {"vertices_avg", &ClassCfgFeatures::vertices_avg},
        {"vertices_min", &ClassCfgFeatures::vertices_min},
        {"vertices_max", &ClassCfgFeatures::vertices_max},
        {"edges_avg", &ClassCfgFeatures::edges_avg},
        {"edges_min", &ClassCfgFeatures::edges_min},
        {"edges_max", &ClassCfgFeatures::edges_max},
        {"avg_rad", &ClassCfgFeatures::avg_rad},
        {"avg_diam", &ClassCfgFeatures::avg_diam},
        {"avg_center", &ClassCfgFeatures::avg_center},
        {"avg_periphery", &ClassCfgFeatures::avg_periphery},
        {"avg_spl", &ClassCfgFeatures::avg_spl},
        {"alg_conn", &ClassCfgFeatures::alg_conn},
        {"avg_deg", &ClassCfgFeatures::avg_deg},
        {"std_deg", &ClassCfgFeatures::std_deg},
        {"avg_density", &ClassCfgFeatures::avg_density},
        {"vertex_conn", &ClassCfgFeatures::vertex_conn},
        {"avg_edge_conn", &ClassCfgFeatures::avg_edge_conn},
        {"transitivity", &ClassCfgFeatures::transitivity},
        {"avg_cc", &ClassCfgFeatures::avg_cc},
        {"std_cc", &ClassCfgFeatures::std_cc},
        {"per_cc10", &ClassCfgFeatures::per_cc10},
    };
    return fields;
}

namespace detail {

struct SimpleViews {
    int n = 0;
    std::set<std::pair<int, int>> directed;           // self-loops dropped
    std::vector<std::vector<int>> undirected_adj;     // simple undirected view
    int undirected_edges = 0;
};

inline SimpleViews normalize(const CfgGraph& g) {
    if (g.node_count < 1) throw Error("CfgGraph '" + g.method_id + "': node_count must be >= 1");
    SimpleViews v;
    v.n = g.node_count;
    std::set<std::pair<int, int>> und;
    for (auto [a, b] : g.edges) {
        if (a < 0 || a >= g.node_count || b < 0 || b >= g.node_count)
            throw Error("CfgGraph '" + g.method_id + "': edge (" + std::to_string(a) + "," +
                        std::to_string(b) + ") out of range");
        if (a == b) continue;
        v.directed.insert({a, b});
        und.insert({std::min(a, b), std::max(a, b)});
    }
    v.undirected_adj.assign(v.n, {});
    for (auto [a, b] : und) {
        v.undirected_adj[a].push_back(b);
        v.undirected_adj[b].push_back(a);
    }
    for (auto& adj : v.undirected_adj) std::sort(adj.begin(), adj.end());
    v.undirected_edges = static_cast<int>(und.size());
    return v;
}

inline std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src) {
    std::vector<int> d(adj.size(), -1);
    std::deque<int> q{src};
    d[src] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : adj[u])
            if (d[w] < 0) {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
    }
    return d;
}

// Edmonds-Karp with unit-capacity arcs on a prebuilt arc list.
class MaxFlow {
public:
    explicit MaxFlow(int n) : head_(n, -1) {}
    void add_edge(int u, int v, int cap) {
        arcs_.push_back({v, head_[u], cap});
        head_[u] = static_cast<int>(arcs_.size()) - 1;
        arcs_.push_back({u, head_[v], 0});
        head_[v] = static_cast<int>(arcs_.size()) - 1;
    }
    int run(int s, int t) {
        int flow = 0;
        while (true) {
            std::vector<int> pred_arc(head_.size(), -1);
            std::deque<int> q{s};
            pred_arc[s] = -2;
            while (!q.empty() && pred_arc[t] == -1) {
                int u = q.front();
                q.pop_front();
                for (int a = head_[u]; a != -1; a = arcs_[a].next) {
                    if (arcs_[a].cap > 0 && pred_arc[arcs_[a].to] == -1) {
                        pred_arc[arcs_[a].to] = a;
                        q.push_back(arcs_[a].to);
                    }
                }
            }
            if (pred_arc[t] == -1) break;
            int v = t;
            while (v != s) {
                int a = pred_arc[v];
                arcs_[a].cap -= 1;
                arcs_[a ^ 1].cap += 1;
                v = arcs_[a ^ 1].to;
            }
            ++flow;
        }
        return flow;
    }

private:
    struct Arc {
        int to, next, cap;
    };
    std::vector<int> head_;
    std::vector<Arc> arcs_;
};

inline int st_edge_connectivity(const SimpleViews& v, int s, int t) {
    MaxFlow mf(v.n);
    for (int u = 0; u < v.n; ++u)
        for (int w : v.undirected_adj[u])
            if (u < w) {
                mf.add_edge(u, w, 1);
                mf.add_edge(w, u, 1);
            }
    return mf.run(s, t);
}

// Vertex s-t connectivity via node splitting (in -> out, capacity 1).
inline int st_vertex_connectivity(const SimpleViews& v, int s, int t) {
    const int n = v.n;
    const int big = 2 * n;  // effectively infinite for unit node capacities
    MaxFlow mf(2 * n);
    for (int u = 0; u < n; ++u) mf.add_edge(u, n + u, u == s || u == t ? big : 1);
    for (int u = 0; u < n; ++u)
        for (int w : v.undirected_adj[u]) {
            mf.add_edge(n + u, w, big);
        }
    return mf.run(n + s, t);
}

}  // namespace detail

// Metrics on the undirected simple view (cyclomatic complexity on the
// directed simple view). The graph must be connected as undirected.
inline MethodMetrics method_metrics(const CfgGraph& g) {
    auto v = detail::normalize(g);
    MethodMetrics m;
    m.vertices = v.n;
    m.edges = static_cast<int>(v.directed.size());
    m.cyclomatic_complexity = static_cast<double>(m.edges) - v.n + 2.0;

    if (v.n == 1) {
        // singleton convention: distances and connectivity metrics are 0
        return m;
    }

    std::vector<int> ecc(v.n, 0);
    long long dist_sum = 0;
    for (int s = 0; s < v.n; ++s) {
        auto d = detail::bfs_distances(v.undirected_adj, s);
        for (int u = 0; u < v.n; ++u) {
            if (d[u] < 0) {
                // name the components in the error
                std::vector<int> comp_of(v.n, -1);
                int ncomp = 0;
                for (int w = 0; w < v.n; ++w)
                    if (comp_of[w] < 0) {
                        auto dw = detail::bfs_distances(v.undirected_adj, w);
                        for (int z = 0; z < v.n; ++z)
                            if (dw[z] >= 0 && comp_of[z] < 0) comp_of[z] = ncomp;
                        ++ncomp;
                    }
                std::string msg = "CfgGraph '" + g.method_id + "' is disconnected (" +
                                  std::to_string(ncomp) + " components: ";
                for (int c = 0; c < ncomp; ++c) {
                    msg += c ? " | " : "";
                    for (int z = 0; z < v.n; ++z)
                        if (comp_of[z] == c) msg += std::to_string(z) + " ";
                }
                throw Error(msg + ")");
            }
            ecc[s] = std::max(ecc[s], d[u]);
            dist_sum += d[u];
        }
    }
    int radius = *std::min_element(ecc.begin(), ecc.end());
    int diameter = *std::max_element(ecc.begin(), ecc.end());
    m.radius = radius;
    m.diameter = diameter;
    m.center_size = static_cast<double>(std::count(ecc.begin(), ecc.end(), radius));
    m.periphery_size = static_cast<double>(std::count(ecc.begin(), ecc.end(), diameter));
    m.avg_shortest_path =
        static_cast<double>(dist_sum) / (static_cast<double>(v.n) * (v.n - 1));

    // second-smallest Laplacian eigenvalue
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(v.n, v.n);
    for (int u = 0; u < v.n; ++u) {
        lap(u, u) = static_cast<double>(v.undirected_adj[u].size());
        for (int w : v.undirected_adj[u]) lap(u, w) = -1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    if (es.info() != Eigen::Success)
        throw Error("CfgGraph '" + g.method_id + "': Laplacian eigensolve failed");
    m.algebraic_connectivity = es.eigenvalues()(1);

    double deg_sum = 0.0;
    for (int u = 0; u < v.n; ++u) deg_sum += static_cast<double>(v.undirected_adj[u].size());
    m.avg_degree = deg_sum / v.n;
    m.density = 2.0 * v.undirected_edges / (static_cast<double>(v.n) * (v.n - 1));

    // transitivity = 3 * triangles / connected triples
    long long triangles3 = 0, triads = 0;
    for (int u = 0; u < v.n; ++u) {
        long long d = static_cast<long long>(v.undirected_adj[u].size());
        triads += d * (d - 1) / 2;
        for (int a : v.undirected_adj[u])
            for (int b : v.undirected_adj[u])
                if (a < b &&
                    std::binary_search(v.undirected_adj[a].begin(), v.undirected_adj[a].end(), b))
                    ++triangles3;  // counted once per corner -> 3x per triangle overall
    }
    m.transitivity = triads ? static_cast<double>(triangles3) / static_cast<double>(triads) : 0.0;

    // connectivity (graph is connected here)
    bool complete = v.undirected_edges == v.n * (v.n - 1) / 2;
    if (complete) {
        m.vertex_connectivity = v.n - 1;
    } else {
        int best = v.n;
        for (int s = 0; s < v.n; ++s)
            for (int t = s + 1; t < v.n; ++t)
                if (!std::binary_search(v.undirected_adj[s].begin(), v.undirected_adj[s].end(), t))
                    best = std::min(best, detail::st_vertex_connectivity(v, s, t));
        m.vertex_connectivity = best;
    }
    {
        int best = v.n;
        for (int t = 1; t < v.n; ++t)
            best = std::min(best, detail::st_edge_connectivity(v, 0, t));
        m.edge_connectivity = best;
    }
    return m;
}

inline ClassCfgFeatures class_features(const std::vector<CfgGraph>& methods,
                                       const std::vector<double>& method_cc) {
    if (methods.empty()) throw Error("class_features: class has no methods");
    if (method_cc.size() != methods.size())
        throw Error("class_features: cc list size mismatch");
    std::vector<MethodMetrics> mm;
    mm.reserve(methods.size());
    for (const auto& g : methods) mm.push_back(method_metrics(g));

    auto avg_of = [&](auto proj) {
        double s = 0.0;
        for (const auto& m : mm) s += proj(m);
        return s / static_cast<double>(mm.size());
    };

    ClassCfgFeatures f;
    f.vertices_avg = avg_of([](const MethodMetrics& m) { return double(m.vertices); });
    f.vertices_min = std::min_element(mm.begin(), mm.end(), [](auto& a, auto& b) {
                         return a.vertices < b.vertices;
                     })->vertices;
    f.vertices_max = std::max_element(mm.begin(), mm.end(), [](auto& a, auto& b) {
                         return a.vertices < b.vertices;
                     })->vertices;
    f.edges_avg = avg_of([](const MethodMetrics& m) { return double(m.edges); });
    f.edges_min = std::min_element(mm.begin(), mm.end(), [](auto& a, auto& b) {
                      return a.edges < b.edges;
                  })->edges;
    f.edges_max = std::max_element(mm.begin(), mm.end(), [](auto& a, auto& b) {
                      return a.edges < b.edges;
                  })->edges;
    f.avg_rad = avg_of([](const MethodMetrics& m) { return m.radius; });
    f.avg_diam = avg_of([](const MethodMetrics& m) { return m.diameter; });
    f.avg_center = avg_of([](const MethodMetrics& m) { return m.center_size; });
    f.avg_periphery = avg_of([](const MethodMetrics& m) { return m.periphery_size; });
    f.avg_spl = avg_of([](const MethodMetrics& m) { return m.avg_shortest_path; });
    f.alg_conn = avg_of([](const MethodMetrics& m) { return m.algebraic_connectivity; });
    f.avg_deg = avg_of([](const MethodMetrics& m) { return m.avg_degree; });
    {
        std::vector<double> degs;
        for (const auto& m : mm) degs.push_back(m.avg_degree);
        f.std_deg = stats::stddev_pop(degs);
    }
    f.avg_density = avg_of([](const MethodMetrics& m) { return m.density; });
    f.vertex_conn = avg_of([](const MethodMetrics& m) { return m.vertex_connectivity; });
    f.avg_edge_conn = avg_of([](const MethodMetrics& m) { return m.edge_connectivity; });
    f.transitivity = avg_of([](const MethodMetrics& m) { return m.transitivity; });
    f.avg_cc = stats::mean(method_cc);
    f.std_cc = stats::stddev_pop(method_cc);
    int over10 = static_cast<int>(std::count_if(method_cc.begin(), method_cc.end(),
                                                [](double c) { return c > 10.0; }));
    f.per_cc10 = 100.0 * over10 / static_cast<double>(method_cc.size());
    return f;
}

inline ClassCfgFeatures class_features(const std::vector<CfgGraph>& methods) {
    std::vector<double> cc;
    cc.reserve(methods.size());
    for (const auto& g : methods) cc.push_back(method_metrics(g).cyclomatic_complexity);
    return class_features(methods, cc);
}

struct ClassGraphs {
    std::string class_id;
    std::vector<CfgGraph> methods;
};

// One JSON document per class:
// {"class": str, "methods": [{"id": str, "n": int, "edges": [[u,v],...]}]}
// A file may also hold a JSON array of such documents.
inline std::vector<ClassGraphs> load_class_graphs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CFG graph file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(path + ": invalid JSON: " + e.what());
    }
    auto parse_one = [&](const nlohmann::json& doc) {
        ClassGraphs cg;
        if (!doc.contains("class") || !doc.contains("methods"))
            throw Error(path + ": class document needs 'class' and 'methods'");
        cg.class_id = doc.at("class").get<std::string>();
        for (const auto& mj : doc.at("methods")) {
            CfgGraph g;
            g.method_id = mj.at("id").get<std::string>();
            g.node_count = mj.at("n").get<int>();
            for (const auto& e : mj.at("edges"))
                g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
            cg.methods.push_back(std::move(g));
        }
        return cg;
    };
    std::vector<ClassGraphs> out;
    if (j.is_array())
        for (const auto& doc : j) out.push_back(parse_one(doc));
    else
        out.push_back(parse_one(j));
    return out;
}

}  // namespace isatk::cfg
