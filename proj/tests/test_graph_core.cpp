#include <algorithm>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "doctest.h"
#include "qgraph/graph_core.hpp"

using namespace qg;

namespace {

// Independent oracle: count edge subsets that form a connected 2-regular
// subgraph (or a single loop).
int brute_force_cycle_count(const Graph& g) {
  const int m = g.edge_count();
  int count = 0;
  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> deg(g.vertex_count(), 0);
    std::vector<int> es;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1) {
        ++deg[g.edge(e).a];
        ++deg[g.edge(e).b];
        es.push_back(e);
      }
    bool ok = true;
    for (int d : deg)
      if (d != 0 && d != 2) ok = false;
    if (!ok) continue;
    // connectivity of the touched vertices
    std::vector<int> parent(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (int e : es) parent[find(g.edge(e).a)] = find(g.edge(e).b);
    std::set<int> roots;
    for (int v = 0; v < g.vertex_count(); ++v)
      if (deg[v]) roots.insert(find(v));
    if (roots.size() == 1) ++count;
  }
  return count;
}

int rational_rank(const std::vector<Chain>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank());
}

bool chain_is_closed(const Graph& g, const Chain& z) {
  std::vector<int> bd(g.vertex_count(), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    bd[g.edge(e).b] += z[e];
    bd[g.edge(e).a] -= z[e];
  }
  return std::all_of(bd.begin(), bd.end(), [](int x) { return x == 0; });
}

// Two 2-isomorphic graphs related by a Whitney twist at {x=0, y=3}: the
// degree-4 vertices 0 and 1 are adjacent in the first, while in the second
// the degree-4 vertices 3 and 1 are not.
Graph whitney_a() {
  return Graph(5, {{0, 1}, {1, 2}, {2, 3}, {1, 1}, {0, 4}, {0, 4}, {0, 3}});
}
Graph whitney_b() {
  return Graph(5, {{0, 1}, {1, 2}, {2, 3}, {1, 1}, {3, 4}, {3, 4}, {3, 0}});
}

}  // namespace

TEST_CASE("bonds and degrees") {
  Graph g(2, {{0, 1}, {1, 1}});
  CHECK(g.bond_count() == 4);
  CHECK(g.degree(1) == 3);  // loop counts twice
  CHECK(g.degree(0) == 1);
  for (Bond b = 0; b < g.bond_count(); ++b) {
    CHECK(reverse(reverse(b)) == b);
    CHECK(reverse(b) != b);
    CHECK(g.origin(b) == g.terminus(reverse(b)));
  }
}

TEST_CASE("spanning tree cycle basis") {
  SUBCASE("theta") {
    auto b = spanning_tree_cycle_basis(graphs::theta());
    REQUIRE(b.size() == 2);
    for (auto& c : b) CHECK(c.bonds.size() == 2);
  }
  SUBCASE("tree") {
    CHECK(spanning_tree_cycle_basis(Graph(4, {{0, 1}, {1, 2}, {1, 3}})).empty());
  }
  SUBCASE("K4 closed and independent") {
    Graph g = graphs::complete(4);
    auto b = spanning_tree_cycle_basis(g);
    REQUIRE(b.size() == 3);
    std::vector<Chain> rows;
    for (auto& c : b) {
      CHECK(is_simple_cycle(g, c));
      rows.push_back(cycle_chain(g, c));
      CHECK(chain_is_closed(g, rows.back()));
    }
    CHECK(rational_rank(rows) == 3);
  }
  SUBCASE("disconnected input gets component labels") {
    Graph g(3, {{0, 0}, {1, 2}, {1, 2}});
    std::vector<int> comp;
    auto b = spanning_tree_cycle_basis(g, &comp);
    REQUIRE(b.size() == 2);
    CHECK(comp == std::vector<int>{0, 1});
  }
  SUBCASE("E - V + 1 on the catalogue") {
    for (const Graph& g : {graphs::prism(), graphs::cube(), graphs::complete(5),
                           graphs::complete_bipartite(3, 3), graphs::figure_eight()})
      CHECK(static_cast<int>(spanning_tree_cycle_basis(g).size()) ==
            g.edge_count() - g.vertex_count() + 1);
  }
}

TEST_CASE("fundamental basis is unimodular against every simple cycle") {
  for (const Graph& g : {graphs::complete(4), graphs::prism(), graphs::theta()}) {
    HomologyBasis hb(g);
    for (auto& c : enumerate_simple_cycles(g)) {
      Chain z = cycle_chain(g, c);
      // integral coordinates reproduce the chain exactly
      CHECK(hb.chain(hb.coords(z)) == z);
    }
  }
}

TEST_CASE("simple cycle enumeration") {
  CHECK(enumerate_simple_cycles(graphs::theta()).size() == 3);
  CHECK(enumerate_simple_cycles(graphs::circle()).size() == 1);
  for (const Graph& g : {graphs::complete(4), graphs::prism(), graphs::complete(5),
                         graphs::complete_bipartite(3, 3), whitney_a()}) {
    auto cs = enumerate_simple_cycles(g);
    CHECK(static_cast<int>(cs.size()) == brute_force_cycle_count(g));
    std::set<std::vector<int>> seen;
    for (auto& c : cs) {
      CHECK(is_simple_cycle(g, c));
      CHECK(canonical_form(c) == c);
      CHECK(canonical_form(reversed(c)) == c);
      CHECK(seen.insert(cycle_edges(c)).second);
    }
  }
  CHECK(enumerate_simple_cycles(graphs::complete(4)).size() == 7);
}

TEST_CASE("overlap") {
  Graph g = graphs::theta();
  Cycle g1{{0, 3}};  // e0 forward, e1 backward
  Cycle g2{{2, 5}};  // e1 forward, e2 backward
  auto self = overlap(g1, g1);
  CHECK(self.positive == std::vector<int>{0, 1});
  CHECK(self.negative.empty());
  auto rev = overlap(g1, reversed(g1));
  CHECK(rev.positive.empty());
  CHECK(rev.negative == std::vector<int>{0, 1});
  auto o = overlap(g1, g2);
  CHECK(o.positive.empty());
  CHECK(o.negative == std::vector<int>{1});
  auto o2 = overlap(g1, reversed(g2));
  CHECK(o2.positive == std::vector<int>{1});
  CHECK(overlap(g2, g1).negative == o.negative);
}

TEST_CASE("block decomposition") {
  SUBCASE("dumbbell") {
    Graph g(2, {{0, 0}, {0, 1}, {1, 1}});
    auto bt = block_decomposition(g);
    CHECK(bt.blocks.size() == 2);
    CHECK(bt.bridges == std::vector<int>{1});
    CHECK(bt.cut_vertices == std::vector<int>{0, 1});
  }
  SUBCASE("K4 is one block") {
    auto bt = block_decomposition(graphs::complete(4));
    REQUIRE(bt.blocks.size() == 1);
    CHECK(bt.blocks[0].size() == 6);
    CHECK(bt.bridges.empty());
  }
  SUBCASE("composite of K4 blocks and loops") {
    // two K4 joined by a bridge, a loop hanging off a bridge path, and a
    // loop glued directly to the second K4
    Graph g(9);
    auto add_k4 = [&](int o) {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) g.add_edge(o + i, o + j);
    };
    add_k4(0);
    add_k4(4);
    g.add_edge(3, 4);  // bridge
    g.add_edge(0, 8);  // bridge
    g.add_edge(8, 8);  // loop
    g.add_edge(7, 7);  // loop on K4 vertex
    auto bt = block_decomposition(g);
    CHECK(bt.blocks.size() == 4);
    CHECK(bt.bridges == std::vector<int>{12, 13});
    // every simple cycle inside exactly one block
    for (auto& c : enumerate_simple_cycles(g)) {
      std::set<int> blk;
      for (Bond b : c.bonds) blk.insert(bt.block_of_edge(edge_of(b)));
      CHECK(blk.size() == 1);
      CHECK(*blk.begin() >= 0);
    }
    // the block/cut-vertex incidence graph is a forest
    int pieces = static_cast<int>(bt.blocks.size() + bt.bridges.size());
    std::set<int> cuts;
    for (auto& [p, v] : bt.attachments) cuts.insert(v);
    CHECK(static_cast<int>(bt.attachments.size()) <= pieces + static_cast<int>(cuts.size()) - 1);
  }
}

TEST_CASE("MacLane search") {
  SUBCASE("K4 faces") {
    Graph g = graphs::complete(4);
    auto b = nonpositive_basis_search(g);
    REQUIRE(b);
    CHECK(b->size() == 3);
    for (auto& c : *b) CHECK(c.bonds.size() == 3);
  }
  SUBCASE("planar catalogue yields sparse non-positive bases") {
    for (const Graph& g : {graphs::theta(), graphs::prism(), graphs::cube(), graphs::octahedron()}) {
      auto b = nonpositive_basis_search(g);
      REQUIRE(b);
      CHECK(static_cast<int>(b->size()) == g.betti_number());
      std::vector<int> use(g.edge_count(), 0);
      for (size_t i = 0; i < b->size(); ++i) {
        for (Bond x : (*b)[i].bonds) ++use[edge_of(x)];
        for (size_t j = i + 1; j < b->size(); ++j) CHECK(overlap((*b)[i], (*b)[j]).positive.empty());
      }
      CHECK(*std::max_element(use.begin(), use.end()) <= 2);
    }
  }
  SUBCASE("K5 and K33 have none") {
    CHECK_FALSE(nonpositive_basis_search(graphs::complete(5)));
    CHECK_FALSE(nonpositive_basis_search(graphs::complete_bipartite(3, 3)));
  }
}

TEST_CASE("geometric dual") {
  SUBCASE("theta") {
    Graph g = graphs::theta();
    std::vector<Cycle> faces{{{0, 3}}, {{2, 5}}};
    auto d = geometric_dual(g, faces);
    CHECK(d.graph.vertex_count() == 3);
    CHECK(isomorphic(d.graph, graphs::complete(3)));
  }
  SUBCASE("cycle graph") {
    Graph c(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    auto b = nonpositive_basis_search(c);
    REQUIRE(b);
    auto d = geometric_dual(c, *b);
    CHECK(d.graph.vertex_count() == 2);
    CHECK(d.graph.edge_count() == 5);
    for (auto& e : d.graph.edges()) CHECK(e.a != e.b);
  }
  SUBCASE("K4 is self dual and duality is an involution") {
    for (const Graph& g : {graphs::complete(4), graphs::prism(), graphs::cube()}) {
      auto d = geometric_dual(g, *nonpositive_basis_search(g));
      auto dd = geometric_dual(d.graph, *nonpositive_basis_search(d.graph));
      CHECK(isomorphic(dd.graph, g));
    }
    auto d = geometric_dual(graphs::complete(4), *nonpositive_basis_search(graphs::complete(4)));
    CHECK(isomorphic(d.graph, graphs::complete(4)));
    auto dc = geometric_dual(graphs::cube(), *nonpositive_basis_search(graphs::cube()));
    CHECK(isomorphic(dc.graph, graphs::octahedron()));
  }
  SUBCASE("positive overlap rejected") {
    Graph g = graphs::theta();
    std::vector<Cycle> faces{{{0, 3}}, {{3, 4}}};  // share e1 in the same direction
    CHECK_THROWS_AS(geometric_dual(g, faces), InputError);
  }
}

TEST_CASE("tree from leaf distances") {
  SUBCASE("two leaves") {
    auto t = tree_from_leaf_distances({{0, 5}, {5, 0}});
    CHECK(t.tree.edge_count() == 1);
    CHECK(t.lengths[0] == doctest::Approx(5));
  }
  SUBCASE("three leaves") {
    auto t = tree_from_leaf_distances({{0, 3, 4}, {3, 0, 5}, {4, 5, 0}});
    REQUIRE(t.tree.vertex_count() == 4);
    // branch lengths solve l1+l2=3, l1+l3=4, l2+l3=5
    std::vector<double> branch(3);
    for (int e = 0; e < t.tree.edge_count(); ++e) {
      int leaf = std::min(t.tree.edge(e).a, t.tree.edge(e).b);
      branch[leaf] = t.lengths[e];
    }
    CHECK(branch[0] == doctest::Approx(1));
    CHECK(branch[1] == doctest::Approx(2));
    CHECK(branch[2] == doctest::Approx(3));
  }
  SUBCASE("random binary trees round trip") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> len(0.5, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      // grow a random tree with 5 leaves and inner degree 3
      MetricTree t;
      t.leaf_count = 5;
      t.tree = Graph(5);
      int c = t.tree.add_vertex();
      for (int l = 0; l < 3; ++l) { t.tree.add_edge(l, c); t.lengths.push_back(len(rng)); }
      for (int l = 3; l < 5; ++l) {
        int e = std::uniform_int_distribution<int>(0, t.tree.edge_count() - 1)(rng);
        Edge old = t.tree.edge(e);
        double ol = t.lengths[e];
        Graph h(t.tree.vertex_count());
        std::vector<double> hl;
        for (int f = 0; f < t.tree.edge_count(); ++f)
          if (f != e) { h.add_edge(t.tree.edge(f).a, t.tree.edge(f).b); hl.push_back(t.lengths[f]); }
        int mid = h.add_vertex();
        double s = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        h.add_edge(old.a, mid); hl.push_back(ol * s);
        h.add_edge(mid, old.b); hl.push_back(ol * (1 - s));
        h.add_edge(l, mid); hl.push_back(len(rng));
        t.tree = h;
        t.lengths = hl;
      }
      auto d = tree_distances(t);
      auto r = tree_from_leaf_distances(d);
      CHECK(r.tree.vertex_count() == t.tree.vertex_count());
      auto d2 = tree_distances(r);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(d2[i][j] == doctest::Approx(d[i][j]).epsilon(1e-12));
      for (int v = 5; v < r.tree.vertex_count(); ++v) CHECK(r.tree.degree(v) == 3);
      CHECK(isomorphic(r.tree, t.tree));
    }
  }
  SUBCASE("violation names the quadruple") {
    std::vector<std::vector<double>> d{{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}};
    d[0][1] = d[1][0] = 1.9;
    d[2][3] = d[3][2] = 1.9;
    try {
      tree_from_leaf_distances(d);
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("(0, 1, 2, 3)") != std::string::npos);
    }
  }
}

TEST_CASE("isomorphism and 2-isomorphism") {
  CHECK(isomorphic(graphs::cube(), graphs::cube()));
  CHECK_FALSE(isomorphic(graphs::prism(), graphs::complete_bipartite(3, 3)));
  CHECK(two_isomorphic(graphs::prism(), graphs::prism()));
  CHECK_FALSE(two_isomorphic(graphs::complete(4), graphs::theta()));
  Graph a = whitney_a(), b = whitney_b();
  CHECK(a.degree(0) == 4);
  CHECK(a.degree(1) == 4);
  CHECK(b.degree(3) == 4);
  CHECK(b.degree(1) == 4);
  CHECK(two_isomorphic(a, b));
  CHECK_FALSE(isomorphic(a, b));
}
