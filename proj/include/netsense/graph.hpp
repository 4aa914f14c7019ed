#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace netsense {

struct Edge {
    int u = 0;  // u < v
    int v = 0;
    double weight = 1.0;  // interaction strength rho in (0, 1]
};

/// Undirected weighted graph. Immutable once built; construction validates that there
/// are no self-loops or duplicate edges and that every weight lies in (0, 1].
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Edges may be given in either orientation; they are normalized to u < v and
    /// sorted lexicographically.
    static WeightedGraph from_edges(int n, std::vector<Edge> edges);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<int>& degree() const noexcept { return degree_; }
    /// Realized mean degree 2|E|/n.
    [[nodiscard]] double kappa() const noexcept { return kappa_; }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> degree_;
    double kappa_ = 0.0;
};

enum class GraphKind {
    er,
    ba,
    powerlaw_config,
    ring_lattice,
    watts_strogatz,
    random_geometric,
    star,
    path,
    cycle,
    complete,
    file,
};

enum class WeightDist { constant, uniform };
enum class WeightMode { from_file, constant };

[[nodiscard]] GraphKind parse_graph_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(GraphKind kind);
[[nodiscard]] WeightDist parse_weight_dist(std::string_view name);
[[nodiscard]] std::string_view to_string(WeightDist dist);

/// Generator parameters. Only the fields relevant to `kind` are read.
struct GraphParams {
    GraphKind kind = GraphKind::er;
    int n = 0;
    double p = 0.0;         // er: edge probability
    int m = 1;              // ba: edges added per new node
    double gamma = 2.5;     // powerlaw-config: degree exponent
    int k_min = 1;          // powerlaw-config: smallest sampled degree
    int k = 2;              // ring-lattice / watts-strogatz: neighbours on each side
    double rewire = 0.0;    // watts-strogatz: rewiring probability
    double radius = 0.1;    // random-geometric: connection radius in the unit square
    std::string path;       // file
    WeightMode file_weights = WeightMode::from_file;
    WeightDist weights = WeightDist::constant;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when a parameter is out of range.
    void validate() const;
};

/// Deterministic in (params, seed).
[[nodiscard]] WeightedGraph generate(const GraphParams& params);

struct EdgeListLoad {
    WeightedGraph graph;
    std::vector<std::string> labels;  // labels[i] is the file label of node i
    std::size_t duplicates = 0;
    std::size_t self_loops = 0;
};

[[nodiscard]] EdgeListLoad load_edge_list(const std::string& path, WeightMode mode);
[[nodiscard]] EdgeListLoad parse_edge_list(std::istream& in, WeightMode mode);

/// One "u v weight" line per edge, weights with 17 significant digits.
void write_edge_list(std::ostream& out, const WeightedGraph& graph);

/// Dense symmetric A with A(i,j) = rho_ij / kappa on edges and zero elsewhere.
class InteractionMatrix {
public:
    explicit InteractionMatrix(const WeightedGraph& graph);
    /// Wraps an arbitrary matrix; throws unless it is exactly symmetric with zero diagonal.
    static InteractionMatrix from_dense(Eigen::MatrixXd a);

    [[nodiscard]] int n() const noexcept { return static_cast<int>(a_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& dense() const noexcept { return a_; }
    [[nodiscard]] double operator()(int i, int j) const { return a_(i, j); }

private:
    InteractionMatrix() = default;
    Eigen::MatrixXd a_;
};

[[nodiscard]] InteractionMatrix interaction_matrix(const WeightedGraph& graph);

}  // namespace netsense
