#include "netsense/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "netsense/error.hpp"
#include "netsense/rng.hpp"

namespace netsense {

namespace {

[[nodiscard]] std::uint64_t pair_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

/// Collects edges while rejecting duplicates; topology and weights come from separate
/// streams so switching the weight distribution never changes the topology.
class EdgeBuilder {
public:
    explicit EdgeBuilder(std::size_t reserve = 0) { edges_.reserve(reserve); }

    bool add(int u, int v) {
        if (u == v) return false;
        if (!seen_.insert(pair_key(u, v)).second) return false;
        edges_.push_back({std::min(u, v), std::max(u, v), 1.0});
        return true;
    }
    [[nodiscard]] bool contains(int u, int v) const { return seen_.count(pair_key(u, v)) != 0; }
    void remove(int u, int v) {
        seen_.erase(pair_key(u, v));
        const int a = std::min(u, v);
        const int b = std::max(u, v);
        auto it = std::find_if(edges_.begin(), edges_.end(),
                               [&](const Edge& e) { return e.u == a && e.v == b; });
        if (it != edges_.end()) edges_.erase(it);
    }

    std::vector<Edge> take(WeightDist dist, Rng& weight_rng) {
        // Weights are assigned in canonical (sorted) edge order.
        std::sort(edges_.begin(), edges_.end(),
                  [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
        if (dist == WeightDist::uniform) {
            for (auto& e : edges_) e.weight = uniform_open_closed(weight_rng);
        }
        return std::move(edges_);
    }

private:
    std::vector<Edge> edges_;
    std::unordered_set<std::uint64_t> seen_;
};

void generate_er(const GraphParams& params, Rng& rng, EdgeBuilder& out) {
    const int n = params.n;
    if (params.p >= 1.0) {
        for (int v = 1; v < n; ++v)
            for (int w = 0; w < v; ++w) out.add(w, v);
        return;
    }
    // Geometric skipping over the lower-triangular pair sequence (Batagelj & Brandes).
    const double log_q = std::log1p(-params.p);
    long long v = 1;
    long long w = -1;
    while (v < n) {
        const double r = uniform01(rng);
        w += 1 + static_cast<long long>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < n) {
            w -= v;
            ++v;
        }
        if (v < n) out.add(static_cast<int>(w), static_cast<int>(v));
    }
}

void generate_ba(const GraphParams& params, Rng& rng, EdgeBuilder& out) {
    const int m = params.m;
    // Seed graph: complete graph on the first m nodes.
    std::vector<int> endpoints;  // each node repeated once per incident edge
    endpoints.reserve(2 * static_cast<std::size_t>(params.n) * static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            out.add(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    std::vector<int> targets;
    for (int v = m; v < params.n; ++v) {
        targets.clear();
        while (static_cast<int>(targets.size()) < m) {
            const int t = endpoints.empty()
                              ? static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(v)))
                              : endpoints[uniform_index(rng, endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (int t : targets) {
            out.add(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
}

void generate_powerlaw_config(const GraphParams& params, Rng& rng, EdgeBuilder& out) {
    const int n = params.n;
    const int k_max = n - 1;
    std::vector<double> cdf;
    cdf.reserve(static_cast<std::size_t>(k_max - params.k_min + 1));
    double acc = 0.0;
    for (int k = params.k_min; k <= k_max; ++k) {
        acc += std::pow(static_cast<double>(k), -params.gamma);
        cdf.push_back(acc);
    }
    std::vector<int> deg(static_cast<std::size_t>(n));
    long long total = 0;
    for (auto& d : deg) {
        const double u = uniform01(rng) * acc;
        const auto idx = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        d = params.k_min + static_cast<int>(std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        total += d;
    }
    if (total % 2 != 0) ++deg[uniform_index(rng, static_cast<std::uint64_t>(n))];

    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(total + 1));
    for (int i = 0; i < n; ++i) stubs.insert(stubs.end(), static_cast<std::size_t>(deg[i]), i);
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[uniform_index(rng, i)]);
    // Erased configuration model: self-loops and repeated pairs are dropped by add().
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) out.add(stubs[i], stubs[i + 1]);
}

void generate_ring(int n, int k, EdgeBuilder& out) {
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= k; ++j) out.add(i, (i + j) % n);
}

void generate_watts_strogatz(const GraphParams& params, Rng& rng, EdgeBuilder& out) {
    const int n = params.n;
    generate_ring(n, params.k, out);
    std::vector<int> deg(static_cast<std::size_t>(n), 2 * params.k);
    for (int j = 1; j <= params.k; ++j) {
        for (int i = 0; i < n; ++i) {
            if (uniform01(rng) >= params.rewire) continue;
            const int old = (i + j) % n;
            if (!out.contains(i, old) || deg[i] >= n - 1) continue;
            int target = 0;
            do {
                target = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
            } while (target == i || out.contains(i, target));
            out.remove(i, old);
            out.add(i, target);
            --deg[old];
            ++deg[target];
        }
    }
}

void generate_geometric(const GraphParams& params, Rng& rng, EdgeBuilder& out) {
    const int n = params.n;
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[i] = uniform01(rng);
        y[i] = uniform01(rng);
    }
    const double r2 = params.radius * params.radius;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx * dx + dy * dy <= r2) out.add(i, j);
        }
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace

WeightedGraph WeightedGraph::from_edges(int n, std::vector<Edge> edges) {
    require(n >= 1, "graph must have at least one node");
    for (auto& e : edges) {
        require(e.u >= 0 && e.u < n && e.v >= 0 && e.v < n,
                "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ") out of range");
        require(e.u != e.v, "self-loop at node " + std::to_string(e.u));
        require(e.weight > 0.0 && e.weight <= 1.0,
                "edge weight " + std::to_string(e.weight) + " outside (0, 1]");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (std::size_t i = 1; i < edges.size(); ++i)
        require(edges[i].u != edges[i - 1].u || edges[i].v != edges[i - 1].v,
                "duplicate edge (" + std::to_string(edges[i].u) + ", " + std::to_string(edges[i].v) + ")");

    WeightedGraph g;
    g.n_ = n;
    g.degree_.assign(static_cast<std::size_t>(n), 0);
    for (const auto& e : edges) {
        ++g.degree_[e.u];
        ++g.degree_[e.v];
    }
    g.kappa_ = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n);
    g.edges_ = std::move(edges);
    return g;
}

GraphKind parse_graph_kind(std::string_view name) {
    static const std::pair<std::string_view, GraphKind> table[] = {
        {"er", GraphKind::er},
        {"ba", GraphKind::ba},
        {"powerlaw-config", GraphKind::powerlaw_config},
        {"ring-lattice", GraphKind::ring_lattice},
        {"watts-strogatz", GraphKind::watts_strogatz},
        {"random-geometric", GraphKind::random_geometric},
        {"star", GraphKind::star},
        {"path", GraphKind::path},
        {"cycle", GraphKind::cycle},
        {"complete", GraphKind::complete},
        {"file", GraphKind::file},
    };
    for (const auto& [key, kind] : table)
        if (key == name) return kind;
    throw InvalidArgument("unknown graph kind '" + std::string(name) + "'");
}

std::string_view to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::er: return "er";
        case GraphKind::ba: return "ba";
        case GraphKind::powerlaw_config: return "powerlaw-config";
        case GraphKind::ring_lattice: return "ring-lattice";
        case GraphKind::watts_strogatz: return "watts-strogatz";
        case GraphKind::random_geometric: return "random-geometric";
        case GraphKind::star: return "star";
        case GraphKind::path: return "path";
        case GraphKind::cycle: return "cycle";
        case GraphKind::complete: return "complete";
        case GraphKind::file: return "file";
    }
    return "?";
}

WeightDist parse_weight_dist(std::string_view name) {
    if (name == "constant") return WeightDist::constant;
    if (name == "uniform") return WeightDist::uniform;
    throw InvalidArgument("unknown weight distribution '" + std::string(name) + "'");
}

std::string_view to_string(WeightDist dist) {
    return dist == WeightDist::constant ? "constant" : "uniform";
}

void GraphParams::validate() const {
    if (kind == GraphKind::file) {
        require(!path.empty(), "file graph requires a path");
        return;
    }
    require(n >= 1, "n must be >= 1");
    switch (kind) {
        case GraphKind::er:
            require(p > 0.0 && p <= 1.0, "er: p must lie in (0, 1]");
            break;
        case GraphKind::ba:
            require(m >= 1, "ba: m must be >= 1");
            require(n > m, "ba: n must exceed m");
            break;
        case GraphKind::powerlaw_config:
            require(gamma > 2.0, "powerlaw-config: gamma must be > 2");
            require(n >= 2, "powerlaw-config: n must be >= 2");
            require(k_min >= 1 && k_min <= n - 1, "powerlaw-config: k_min must lie in [1, n-1]");
            break;
        case GraphKind::ring_lattice:
        case GraphKind::watts_strogatz:
            require(k >= 1, "lattice: k must be >= 1");
            require(n > 2 * k, "lattice: n must exceed 2k");
            require(rewire >= 0.0 && rewire <= 1.0, "watts-strogatz: rewire must lie in [0, 1]");
            break;
        case GraphKind::random_geometric:
            require(radius > 0.0, "random-geometric: radius must be > 0");
            break;
        case GraphKind::star:
        case GraphKind::path:
            require(n >= 2, std::string(to_string(kind)) + ": n must be >= 2");
            break;
        case GraphKind::cycle:
            require(n >= 3, "cycle: n must be >= 3");
            break;
        case GraphKind::complete:
        case GraphKind::file:
            break;
    }
}

WeightedGraph generate(const GraphParams& params) {
    params.validate();
    if (params.kind == GraphKind::file) return load_edge_list(params.path, params.file_weights).graph;

    Rng topo(derive_seed(params.seed, {0}));
    Rng weights(derive_seed(params.seed, {1}));
    EdgeBuilder builder;
    const int n = params.n;
    switch (params.kind) {
        case GraphKind::er: generate_er(params, topo, builder); break;
        case GraphKind::ba: generate_ba(params, topo, builder); break;
        case GraphKind::powerlaw_config: generate_powerlaw_config(params, topo, builder); break;
        case GraphKind::ring_lattice: generate_ring(n, params.k, builder); break;
        case GraphKind::watts_strogatz: generate_watts_strogatz(params, topo, builder); break;
        case GraphKind::random_geometric: generate_geometric(params, topo, builder); break;
        case GraphKind::star:
            for (int i = 1; i < n; ++i) builder.add(0, i);
            break;
        case GraphKind::path:
            for (int i = 1; i < n; ++i) builder.add(i - 1, i);
            break;
        case GraphKind::cycle:
            for (int i = 0; i < n; ++i) builder.add(i, (i + 1) % n);
            break;
        case GraphKind::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) builder.add(i, j);
            break;
        case GraphKind::file: break;
    }
    return WeightedGraph::from_edges(n, builder.take(params.weights, weights));
}

EdgeListLoad parse_edge_list(std::istream& in, WeightMode mode) {
    EdgeListLoad result;
    std::unordered_map<std::string, int> index;
    std::unordered_set<std::uint64_t> seen;
    std::vector<Edge> edges;
    auto node_of = [&](const std::string& label) {
        auto [it, inserted] = index.try_emplace(label, static_cast<int>(result.labels.size()));
        if (inserted) result.labels.push_back(label);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string a;
        std::string b;
        if (!(fields >> a) || a.front() == '#') continue;
        if (!(fields >> b))
            throw InvalidArgument("edge list line " + std::to_string(lineno) + ": expected at least 2 columns");
        double w = 1.0;
        std::string wtok;
        if (mode == WeightMode::from_file && (fields >> wtok)) {
            std::size_t used = 0;
            try {
                w = std::stod(wtok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != wtok.size())
                throw InvalidArgument("edge list line " + std::to_string(lineno) + ": bad weight '" + wtok + "'");
            if (!(w > 0.0 && w <= 1.0))
                throw InvalidArgument("edge list line " + std::to_string(lineno) + ": weight " + wtok +
                                      " outside (0, 1]");
        }
        const int u = node_of(a);
        const int v = node_of(b);
        if (u == v) {
            ++result.self_loops;
            continue;
        }
        if (!seen.insert(pair_key(u, v)).second) {
            ++result.duplicates;
            continue;
        }
        edges.push_back({u, v, w});
    }
    if (result.labels.empty()) throw InvalidArgument("edge list contains no edges");
    result.graph = WeightedGraph::from_edges(static_cast<int>(result.labels.size()), std::move(edges));
    return result;
}

EdgeListLoad load_edge_list(const std::string& path, WeightMode mode) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read edge list '" + path + "'");
    return parse_edge_list(in, mode);
}

void write_edge_list(std::ostream& out, const WeightedGraph& graph) {
    const auto old_precision = out.precision(17);
    for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
    out.precision(old_precision);
}

InteractionMatrix::InteractionMatrix(const WeightedGraph& graph) {
    if (graph.edge_count() == 0) throw InvalidArgument("interaction matrix of a graph with no edges");
    const double kappa = graph.kappa();
    a_ = Eigen::MatrixXd::Zero(graph.n(), graph.n());
    for (const auto& e : graph.edges()) {
        const double a = e.weight / kappa;
        a_(e.u, e.v) = a;
        a_(e.v, e.u) = a;
    }
}

InteractionMatrix InteractionMatrix::from_dense(Eigen::MatrixXd a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("interaction matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a(i, i) != 0.0) throw InvalidArgument("interaction matrix must have a zero diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (a(i, j) != a(j, i)) throw InvalidArgument("interaction matrix must be exactly symmetric");
    }
    InteractionMatrix m;
    m.a_ = std::move(a);
    return m;
}

InteractionMatrix interaction_matrix(const WeightedGraph& graph) { return InteractionMatrix(graph); }

}  // namespace netsense
