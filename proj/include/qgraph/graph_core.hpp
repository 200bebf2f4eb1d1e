// Combinatorial multigraphs: bonds, cycles, homology bases, blocks,
// MacLane planarity, duals, tree metrics.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qg {

// Raised for malformed user input (exit code 1 at the CLI).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised when a numerical procedure cannot certify its result (exit code 2).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised when a search hits its cap without a verdict (exit code 3).
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Edge {
  int a = 0;
  int b = 0;
};

// Bond 2e runs a -> b along edge e, bond 2e+1 runs b -> a.
using Bond = int;
inline int edge_of(Bond b) { return b >> 1; }
inline Bond reverse(Bond b) { return b ^ 1; }
inline Bond bond_of(int e, bool backwards) { return 2 * e + (backwards ? 1 : 0); }

class Graph {
 public:
  Graph() = default;
  explicit Graph(int vertex_count);
  Graph(int vertex_count, const std::vector<std::pair<int, int>>& edges);

  int add_vertex();
  int add_edge(int a, int b);

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int bond_count() const { return 2 * edge_count(); }
  const Edge& edge(int e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool is_loop(int e) const { return edges_[e].a == edges_[e].b; }

  int origin(Bond b) const { return (b & 1) ? edges_[b >> 1].b : edges_[b >> 1].a; }
  int terminus(Bond b) const { return (b & 1) ? edges_[b >> 1].a : edges_[b >> 1].b; }
  int degree(int v) const { return static_cast<int>(out_[v].size()); }
  // Bonds leaving v, ascending id. A loop contributes both of its bonds.
  const std::vector<Bond>& out_bonds(int v) const { return out_[v]; }

  // Component label per vertex, labels numbered by lowest vertex.
  std::vector<int> component_labels() const;
  int component_count() const;
  bool connected() const { return component_count() <= 1; }
  int betti_number() const { return edge_count() - vertex_count() + component_count(); }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Bond>> out_;
};

// Signed multiplicity per edge.
using Chain = std::vector<int>;

struct Cycle {
  std::vector<Bond> bonds;
  bool operator==(const Cycle&) const = default;
};

Cycle reversed(const Cycle& c);
std::vector<int> cycle_edges(const Cycle& c);
Chain cycle_chain(const Graph& g, const Cycle& c);
// Closed, edge-simple and vertex-simple.
bool is_simple_cycle(const Graph& g, const Cycle& c);
// Lowest edge id first; orientation chosen so the following edge id is
// as small as possible.
Cycle canonical_form(const Cycle& c);

// Fundamental cycle basis of a spanning forest. Trees are grown by BFS
// from the lowest vertex of each component; one cycle per non-tree edge,
// ascending edge id, oriented along that edge.
class HomologyBasis {
 public:
  explicit HomologyBasis(const Graph& g);
  int rank() const { return static_cast<int>(cycles_.size()); }
  const std::vector<Cycle>& cycles() const { return cycles_; }
  const std::vector<int>& component() const { return component_; }
  const std::vector<int>& nontree_edges() const { return nontree_; }
  const std::vector<int>& tree_parent_bond() const { return parent_; }
  // Coordinates of a closed chain (assumed a cycle).
  std::vector<long> coords(const Chain& z) const;
  Chain chain(const std::vector<long>& x) const;

 private:
  int edges_ = 0;
  std::vector<Cycle> cycles_;
  std::vector<Chain> chains_;
  std::vector<int> component_;
  std::vector<int> nontree_;
  std::vector<int> parent_;  // bond into each vertex from its BFS parent, -1 at roots
};

std::vector<Cycle> spanning_tree_cycle_basis(const Graph& g,
                                             std::vector<int>* component = nullptr);

std::vector<Cycle> enumerate_simple_cycles(const Graph& g);

struct Overlap {
  std::vector<int> positive;
  std::vector<int> negative;
};
Overlap overlap(const Cycle& c1, const Cycle& c2);

struct BlockTree {
  std::vector<std::vector<int>> blocks;  // edge ids, ascending
  std::vector<int> bridges;
  std::vector<int> cut_vertices;
  // Pieces are blocks followed by bridges; (piece, vertex) incidences at
  // cut vertices and bridge endpoints.
  std::vector<std::pair<int, int>> attachments;
  int block_of_edge(int e) const;
};

BlockTree block_decomposition(const Graph& g);

std::optional<std::vector<Cycle>> nonpositive_basis_search(const Graph& g);

struct DualGraph {
  Graph graph;
  int outer = -1;               // vertex of the outer face
  std::vector<int> primal_edge;  // dual edge -> primal edge
};
DualGraph geometric_dual(const Graph& g, const std::vector<Cycle>& facial_basis);

struct MetricTree {
  Graph tree;
  std::vector<double> lengths;
  // Leaf i of the input matrix sits at vertex i.
  int leaf_count = 0;
};
MetricTree tree_from_leaf_distances(const std::vector<std::vector<double>>& d,
                                    double tol = 1e-9);
std::vector<std::vector<double>> tree_distances(const MetricTree& t);

bool isomorphic(const Graph& g, const Graph& h);
bool two_isomorphic(const Graph& g, const Graph& h);

// Standard small graphs.
namespace graphs {
Graph theta();
Graph figure_eight();
Graph circle();
Graph complete(int n);
Graph complete_bipartite(int m, int n);
Graph prism();
Graph cube();
Graph octahedron();
}  // namespace graphs

}  // namespace qg
