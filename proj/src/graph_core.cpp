#include "qgraph/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

#include <Eigen/Dense>

namespace qg {

Graph::Graph(int vertex_count) : n_(vertex_count), out_(vertex_count) {
  if (vertex_count < 0) throw InputError("negative vertex count");
}

Graph::Graph(int vertex_count, const std::vector<std::pair<int, int>>& edges)
    : Graph(vertex_count) {
  for (auto [a, b] : edges) add_edge(a, b);
}

int Graph::add_vertex() {
  out_.emplace_back();
  return n_++;
}

int Graph::add_edge(int a, int b) {
  if (a < 0 || a >= n_ || b < 0 || b >= n_) throw InputError("edge endpoint out of range");
  int e = edge_count();
  edges_.push_back({a, b});
  out_[a].push_back(2 * e);
  out_[b].push_back(2 * e + 1);
  return e;
}

std::vector<int> Graph::component_labels() const {
  std::vector<int> label(n_, -1);
  int next = 0;
  for (int s = 0; s < n_; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (Bond b : out_[v]) {
        int w = terminus(b);
        if (label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

int Graph::component_count() const {
  auto l = component_labels();
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

Cycle reversed(const Cycle& c) {
  Cycle r;
  r.bonds.reserve(c.bonds.size());
  for (auto it = c.bonds.rbegin(); it != c.bonds.rend(); ++it) r.bonds.push_back(reverse(*it));
  return r;
}

std::vector<int> cycle_edges(const Cycle& c) {
  std::vector<int> e;
  for (Bond b : c.bonds) e.push_back(edge_of(b));
  std::sort(e.begin(), e.end());
  return e;
}

Chain cycle_chain(const Graph& g, const Cycle& c) {
  Chain z(g.edge_count(), 0);
  for (Bond b : c.bonds) z[edge_of(b)] += (b & 1) ? -1 : 1;
  return z;
}

bool is_simple_cycle(const Graph& g, const Cycle& c) {
  if (c.bonds.empty()) return false;
  std::set<int> edges, verts;
  for (size_t i = 0; i < c.bonds.size(); ++i) {
    Bond b = c.bonds[i];
    if (b < 0 || b >= g.bond_count()) return false;
    Bond nb = c.bonds[(i + 1) % c.bonds.size()];
    if (g.terminus(b) != g.origin(nb)) return false;
    if (!edges.insert(edge_of(b)).second) return false;
    if (!verts.insert(g.origin(b)).second) return false;
  }
  return true;
}

Cycle canonical_form(const Cycle& c) {
  const size_t k = c.bonds.size();
  if (k == 0) return c;
  auto rotate_to = [](const Cycle& x, size_t pos) {
    Cycle r;
    for (size_t i = 0; i < x.bonds.size(); ++i) r.bonds.push_back(x.bonds[(pos + i) % x.bonds.size()]);
    return r;
  };
  auto best_start = [&](const Cycle& x) {
    size_t pos = 0;
    for (size_t i = 1; i < x.bonds.size(); ++i)
      if (edge_of(x.bonds[i]) < edge_of(x.bonds[pos])) pos = i;
    return rotate_to(x, pos);
  };
  Cycle f = best_start(c);
  Cycle r = best_start(reversed(c));
  if (k == 1) return (f.bonds[0] & 1) ? r : f;
  int nf = edge_of(f.bonds[1]), nr = edge_of(r.bonds[1]);
  if (nf != nr) return nf < nr ? f : r;
  return (f.bonds[0] & 1) ? r : f;
}

// ---------------------------------------------------------------- bases

HomologyBasis::HomologyBasis(const Graph& g) : edges_(g.edge_count()) {
  const int n = g.vertex_count();
  parent_.assign(n, -1);
  std::vector<int> depth(n, -1), comp(n, -1);
  std::vector<char> tree_edge(g.edge_count(), 0);
  int label = 0;
  for (int s = 0; s < n; ++s) {
    if (depth[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    depth[s] = 0;
    comp[s] = label;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (Bond b : g.out_bonds(v)) {
        int w = g.terminus(b);
        if (depth[w] >= 0) continue;
        depth[w] = depth[v] + 1;
        comp[w] = label;
        parent_[w] = b;
        tree_edge[edge_of(b)] = 1;
        q.push(w);
      }
    }
    ++label;
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    if (tree_edge[e]) continue;
    Cycle c;
    c.bonds.push_back(2 * e);
    int a = g.edge(e).a, b = g.edge(e).b;
    // path b -> a through the tree
    std::vector<Bond> up, down;
    int x = b, y = a;
    while (depth[x] > depth[y]) { up.push_back(reverse(parent_[x])); x = g.origin(parent_[x]); }
    while (depth[y] > depth[x]) { down.push_back(parent_[y]); y = g.origin(parent_[y]); }
    while (x != y) {
      up.push_back(reverse(parent_[x]));
      x = g.origin(parent_[x]);
      down.push_back(parent_[y]);
      y = g.origin(parent_[y]);
    }
    for (Bond u : up) c.bonds.push_back(u);
    for (auto it = down.rbegin(); it != down.rend(); ++it) c.bonds.push_back(*it);
    chains_.push_back(cycle_chain(g, c));
    cycles_.push_back(std::move(c));
    component_.push_back(comp[a]);
    nontree_.push_back(e);
  }
}

std::vector<long> HomologyBasis::coords(const Chain& z) const {
  std::vector<long> x(nontree_.size());
  for (size_t i = 0; i < nontree_.size(); ++i) x[i] = z.at(nontree_[i]);
  return x;
}

Chain HomologyBasis::chain(const std::vector<long>& x) const {
  Chain z(edges_, 0);
  for (size_t i = 0; i < x.size() && i < chains_.size(); ++i)
    if (x[i] != 0)
      for (int e = 0; e < edges_; ++e) z[e] += static_cast<int>(x[i]) * chains_[i][e];
  return z;
}

std::vector<Cycle> spanning_tree_cycle_basis(const Graph& g, std::vector<int>* component) {
  HomologyBasis hb(g);
  if (component) *component = hb.component();
  return hb.cycles();
}

std::vector<Cycle> enumerate_simple_cycles(const Graph& g) {
  std::vector<Cycle> out;
  const int n = g.vertex_count();
  std::vector<char> visited(n, 0);
  std::vector<Bond> path;
  for (int e0 = 0; e0 < g.edge_count(); ++e0) {
    if (g.is_loop(e0)) {
      out.push_back(Cycle{{2 * e0}});
      continue;
    }
    const int a = g.edge(e0).a, b = g.edge(e0).b;
    std::fill(visited.begin(), visited.end(), 0);
    visited[b] = 1;
    path.assign(1, 2 * e0);
    std::function<void(int)> dfs = [&](int v) {
      for (Bond ob : g.out_bonds(v)) {
        int e = edge_of(ob);
        if (e <= e0 || g.is_loop(e)) continue;
        int w = g.terminus(ob);
        if (w == a) {
          path.push_back(ob);
          out.push_back(canonical_form(Cycle{path}));
          path.pop_back();
        } else if (!visited[w]) {
          visited[w] = 1;
          path.push_back(ob);
          dfs(w);
          path.pop_back();
          visited[w] = 0;
        }
      }
    };
    dfs(b);
  }
  return out;
}

Overlap overlap(const Cycle& c1, const Cycle& c2) {
  std::map<int, Bond> in2;
  for (Bond b : c2.bonds) in2[edge_of(b)] = b;
  Overlap o;
  for (Bond b : c1.bonds) {
    auto it = in2.find(edge_of(b));
    if (it == in2.end()) continue;
    (it->second == b ? o.positive : o.negative).push_back(edge_of(b));
  }
  std::sort(o.positive.begin(), o.positive.end());
  std::sort(o.negative.begin(), o.negative.end());
  return o;
}

// ---------------------------------------------------------------- blocks

int BlockTree::block_of_edge(int e) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (std::binary_search(blocks[i].begin(), blocks[i].end(), e)) return static_cast<int>(i);
  return -1;
}

BlockTree block_decomposition(const Graph& g) {
  const int n = g.vertex_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<int> estack;
  std::vector<std::vector<int>> comps;
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int v, int via_edge) {
    disc[v] = low[v] = timer++;
    for (Bond b : g.out_bonds(v)) {
      int e = edge_of(b);
      if (e == via_edge || g.is_loop(e)) continue;
      int w = g.terminus(b);
      if (disc[w] < 0) {
        estack.push_back(e);
        dfs(w, e);
        low[v] = std::min(low[v], low[w]);
        if (low[w] >= disc[v]) {
          std::vector<int> c;
          while (true) {
            int f = estack.back();
            estack.pop_back();
            c.push_back(f);
            if (f == e) break;
          }
          comps.push_back(std::move(c));
        }
      } else if (disc[w] < disc[v]) {
        estack.push_back(e);
        low[v] = std::min(low[v], disc[w]);
      }
    }
  };
  for (int v = 0; v < n; ++v)
    if (disc[v] < 0) dfs(v, -1);

  BlockTree bt;
  for (auto& c : comps) {
    std::sort(c.begin(), c.end());
    if (c.size() == 1)
      bt.bridges.push_back(c[0]);
    else
      bt.blocks.push_back(c);
  }
  for (int e = 0; e < g.edge_count(); ++e)
    if (g.is_loop(e)) bt.blocks.push_back({e});
  std::sort(bt.blocks.begin(), bt.blocks.end());
  std::sort(bt.bridges.begin(), bt.bridges.end());

  const int nb = static_cast<int>(bt.blocks.size());
  std::vector<std::set<int>> piece_vertices;
  for (auto& blk : bt.blocks) {
    std::set<int> vs;
    for (int e : blk) { vs.insert(g.edge(e).a); vs.insert(g.edge(e).b); }
    piece_vertices.push_back(vs);
  }
  for (int e : bt.bridges) piece_vertices.push_back({g.edge(e).a, g.edge(e).b});
  std::vector<int> pieces_at(n, 0);
  for (auto& vs : piece_vertices)
    for (int v : vs) ++pieces_at[v];
  for (int v = 0; v < n; ++v)
    if (pieces_at[v] >= 2) bt.cut_vertices.push_back(v);
  for (int p = 0; p < static_cast<int>(piece_vertices.size()); ++p)
    for (int v : piece_vertices[p])
      if (p >= nb || pieces_at[v] >= 2) bt.attachments.push_back({p, v});
  return bt;
}

// ---------------------------------------------------------------- planarity

namespace {

int rank_of(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

long integer_det(const std::vector<std::vector<long>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) return 1;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(rows[i][j]);
  return std::lround(m.determinant());
}

}  // namespace

std::optional<std::vector<Cycle>> nonpositive_basis_search(const Graph& g) {
  const int n = g.betti_number();
  if (n == 0) return std::vector<Cycle>{};
  std::vector<Cycle> cyc = enumerate_simple_cycles(g);
  std::stable_sort(cyc.begin(), cyc.end(),
                   [](const Cycle& x, const Cycle& y) { return x.bonds.size() < y.bonds.size(); });
  const int m = static_cast<int>(cyc.size());
  HomologyBasis hb(g);
  std::vector<std::vector<double>> coord(m);
  std::vector<std::vector<long>> icoord(m);
  for (int i = 0; i < m; ++i) {
    icoord[i] = hb.coords(cycle_chain(g, cyc[i]));
    coord[i].assign(icoord[i].begin(), icoord[i].end());
  }
  // rel: 0 disjoint, +1 same sign required, -1 opposite required, 2 conflict
  std::vector<std::vector<int>> rel(m, std::vector<int>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Overlap o = overlap(cyc[i], cyc[j]);
      int r = 0;
      if (!o.positive.empty() && !o.negative.empty()) r = 2;
      else if (!o.positive.empty()) r = -1;
      else if (!o.negative.empty()) r = 1;
      rel[i][j] = rel[j][i] = r;
    }

  std::vector<int> chosen, best;
  std::vector<int> best_sign;
  long best_total = std::numeric_limits<long>::max();
  std::vector<int> usage(g.edge_count(), 0);

  auto orient = [&](const std::vector<int>& set, std::vector<int>& sign) {
    const int k = static_cast<int>(set.size());
    sign.assign(k, 0);
    for (int s = 0; s < k; ++s) {
      if (sign[s]) continue;
      sign[s] = 1;
      std::vector<int> st{s};
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        for (int y = 0; y < k; ++y) {
          int r = rel[set[x]][set[y]];
          if (x == y || r == 0) continue;
          int want = sign[x] * r;
          if (sign[y] == 0) { sign[y] = want; st.push_back(y); }
          else if (sign[y] != want) return false;
        }
      }
    }
    return true;
  };

  std::function<void(int, long)> search = [&](int from, long total) {
    const int k = static_cast<int>(chosen.size());
    if (k == n) {
      std::vector<std::vector<long>> rows;
      for (int c : chosen) rows.push_back(icoord[c]);
      if (std::labs(integer_det(rows)) != 1) return;
      std::vector<int> sign;
      orient(chosen, sign);
      best = chosen;
      best_sign = sign;
      best_total = total;
      return;
    }
    for (int c = from; c < m; ++c) {
      long len = static_cast<long>(cyc[c].bonds.size());
      if (total + len * (n - k) >= best_total) return;
      bool ok = true;
      for (int x : chosen)
        if (rel[x][c] == 2) { ok = false; break; }
      if (!ok) continue;
      for (Bond b : cyc[c].bonds)
        if (usage[edge_of(b)] >= 2) { ok = false; break; }
      if (!ok) continue;
      chosen.push_back(c);
      std::vector<std::vector<double>> rows;
      for (int x : chosen) rows.push_back(coord[x]);
      std::vector<int> sign;
      if (rank_of(rows) == k + 1 && orient(chosen, sign)) {
        for (Bond b : cyc[c].bonds) ++usage[edge_of(b)];
        search(c + 1, total + len);
        for (Bond b : cyc[c].bonds) --usage[edge_of(b)];
      }
      chosen.pop_back();
    }
  };
  search(0, 0);
  if (best.empty()) return std::nullopt;
  std::vector<Cycle> out;
  for (size_t i = 0; i < best.size(); ++i)
    out.push_back(best_sign[i] > 0 ? cyc[best[i]] : reversed(cyc[best[i]]));
  return out;
}

DualGraph geometric_dual(const Graph& g, const std::vector<Cycle>& faces) {
  const int n = static_cast<int>(faces.size());
  if (n != g.betti_number()) throw InputError("facial basis has wrong size");
  for (int i = 0; i < n; ++i) {
    if (!is_simple_cycle(g, faces[i])) throw InputError("facial basis contains a non-cycle");
    for (int j = i + 1; j < n; ++j)
      if (!overlap(faces[i], faces[j]).positive.empty())
        throw InputError("basis is not non-positive: cycles " + std::to_string(i) + " and " +
                         std::to_string(j) + " share an edge in the same direction");
  }
  std::vector<Chain> chains;
  Chain outer(g.edge_count(), 0);
  for (auto& f : faces) {
    chains.push_back(cycle_chain(g, f));
    for (int e = 0; e < g.edge_count(); ++e) outer[e] -= chains.back()[e];
  }
  chains.push_back(outer);
  DualGraph d;
  d.graph = Graph(n + 1);
  d.outer = n;
  for (int e = 0; e < g.edge_count(); ++e) {
    std::vector<int> at;
    for (int f = 0; f <= n; ++f) {
      if (std::abs(chains[f][e]) > 1) throw InputError("face boundary repeats an edge");
      if (chains[f][e] != 0) at.push_back(f);
    }
    if (at.size() != 2)
      throw InputError("edge " + std::to_string(e) + " lies on " + std::to_string(at.size()) +
                       " faces; basis is not facial");
    d.graph.add_edge(at[0], at[1]);
    d.primal_edge.push_back(e);
  }
  return d;
}

// ---------------------------------------------------------------- trees

namespace {

struct TreeBuilder {
  std::vector<std::map<int, double>> adj;
  int add_vertex() {
    adj.emplace_back();
    return static_cast<int>(adj.size()) - 1;
  }
  void link(int u, int v, double w) { adj[u][v] = w; adj[v][u] = w; }
  void unlink(int u, int v) { adj[u].erase(v); adj[v].erase(u); }
  std::vector<int> path(int s, int t) const {
    std::vector<int> par(adj.size(), -2);
    std::queue<int> q;
    q.push(s);
    par[s] = -1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto& [w, _] : adj[v])
        if (par[w] == -2) { par[w] = v; q.push(w); }
    }
    std::vector<int> p;
    for (int v = t; v != -1; v = par[v]) p.push_back(v);
    std::reverse(p.begin(), p.end());
    return p;
  }
};

std::string quad_name(int i, int j, int k, int l) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ", " << k << ", " << l << ")";
  return os.str();
}

}  // namespace

MetricTree tree_from_leaf_distances(const std::vector<std::vector<double>>& d, double tol) {
  const int m = static_cast<int>(d.size());
  if (m < 1) throw InputError("empty distance matrix");
  double scale = 1.0;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(d[i].size()) != m) throw InputError("distance matrix is not square");
    for (int j = 0; j < m; ++j) {
      if (d[i][j] < -tol) throw InputError("negative distance at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      if (std::abs(d[i][j] - d[j][i]) > tol)
        throw InputError("distance matrix not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      scale = std::max(scale, d[i][j]);
    }
    if (std::abs(d[i][i]) > tol) throw InputError("nonzero diagonal at " + std::to_string(i));
  }
  const double t = tol * scale;
  // four-point condition, with repeated indices covering the triangle inequality
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int k = j; k < m; ++k)
        for (int l = k; l < m; ++l) {
          double s[3] = {d[i][j] + d[k][l], d[i][k] + d[j][l], d[i][l] + d[j][k]};
          std::sort(s, s + 3);
          if (s[2] - s[1] > 4 * t)
            throw InputError("four-point condition fails on leaves " + quad_name(i, j, k, l));
        }

  TreeBuilder tb;
  for (int i = 0; i < m; ++i) tb.add_vertex();
  auto detach_leaf = [&](int leaf) {
    // a leaf that would become an inner vertex is moved out by a zero-length edge
    int s = tb.add_vertex();
    auto nb = tb.adj[leaf];
    for (auto& [w, len] : nb) { tb.unlink(leaf, w); tb.link(s, w, len); }
    tb.link(leaf, s, 0.0);
    return s;
  };
  if (m >= 2) tb.link(0, 1, std::max(0.0, d[0][1]));
  for (int k = 2; k < m; ++k) {
    int jbest = 1;
    double abest = -1e300;
    for (int j = 1; j < k; ++j) {
      double a = 0.5 * (d[0][k] + d[0][j] - d[j][k]);
      if (a > abest + t) { abest = a; jbest = j; }
    }
    double a = std::clamp(abest, 0.0, d[0][jbest]);
    std::vector<int> p = tb.path(0, jbest);
    int attach = -1;
    double walked = 0.0;
    for (size_t s = 0; s + 1 < p.size() && attach < 0; ++s) {
      double w = tb.adj[p[s]][p[s + 1]];
      if (std::abs(a - walked) <= t) { attach = p[s]; break; }
      if (a < walked + w - t) {
        int mid = tb.add_vertex();
        tb.unlink(p[s], p[s + 1]);
        tb.link(p[s], mid, a - walked);
        tb.link(mid, p[s + 1], walked + w - a);
        attach = mid;
        break;
      }
      walked += w;
    }
    if (attach < 0) attach = p.back();
    if (attach < m) attach = detach_leaf(attach);
    tb.link(attach, k, std::max(0.0, d[0][k] - a));
  }

  MetricTree out;
  out.leaf_count = m;
  out.tree = Graph(static_cast<int>(tb.adj.size()));
  for (int u = 0; u < static_cast<int>(tb.adj.size()); ++u)
    for (auto& [w, len] : tb.adj[u])
      if (u < w) { out.tree.add_edge(u, w); out.lengths.push_back(len); }

  auto got = tree_distances(out);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (std::abs(got[i][j] - d[i][j]) > 1e3 * t)
        throw InputError("distance matrix is not a tree metric near leaves (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
  return out;
}

std::vector<std::vector<double>> tree_distances(const MetricTree& t) {
  const int m = t.leaf_count;
  std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    std::vector<double> dist(t.tree.vertex_count(), -1.0);
    std::vector<int> st{i};
    dist[i] = 0.0;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      for (Bond b : t.tree.out_bonds(v)) {
        int w = t.tree.terminus(b);
        if (dist[w] < 0) { dist[w] = dist[v] + t.lengths[edge_of(b)]; st.push_back(w); }
      }
    }
    for (int j = 0; j < m; ++j) d[i][j] = dist[j];
  }
  return d;
}

// ---------------------------------------------------------------- isomorphism

bool isomorphic(const Graph& g, const Graph& h) {
  const int n = g.vertex_count();
  if (n != h.vertex_count() || g.edge_count() != h.edge_count()) return false;
  auto mult = [](const Graph& x) {
    std::vector<std::vector<int>> m(x.vertex_count(), std::vector<int>(x.vertex_count(), 0));
    for (auto& e : x.edges()) {
      ++m[e.a][e.b];
      if (e.a != e.b) ++m[e.b][e.a];
    }
    return m;
  };
  auto mg = mult(g), mh = mult(h);
  std::vector<int> dg(n), dh(n);
  for (int v = 0; v < n; ++v) { dg[v] = g.degree(v); dh[v] = h.degree(v); }
  {
    auto a = dg, b = dh;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return dg[x] > dg[y]; });
  std::vector<int> img(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(int)> go = [&](int k) {
    if (k == n) return true;
    int v = order[k];
    for (int w = 0; w < n; ++w) {
      if (used[w] || dh[w] != dg[v] || mh[w][w] != mg[v][v]) continue;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        int u = order[i];
        if (mg[v][u] != mh[w][img[u]]) ok = false;
      }
      if (!ok) continue;
      img[v] = w;
      used[w] = 1;
      if (go(k + 1)) return true;
      used[w] = 0;
      img[v] = -1;
    }
    return false;
  };
  return go(0);
}

bool two_isomorphic(const Graph& g, const Graph& h) {
  const int m = g.edge_count();
  if (m != h.edge_count()) return false;
  if (m > 63) throw InputError("two_isomorphic supports at most 63 edges");
  auto masks = [](const Graph& x) {
    std::vector<uint64_t> out;
    for (auto& c : enumerate_simple_cycles(x)) {
      uint64_t mk = 0;
      for (Bond b : c.bonds) mk |= uint64_t{1} << edge_of(b);
      out.push_back(mk);
    }
    return out;
  };
  auto cg = masks(g), ch = masks(h);
  if (cg.size() != ch.size()) return false;
  std::unordered_set<uint64_t> hset(ch.begin(), ch.end());
  auto signature = [m](const std::vector<uint64_t>& cs) {
    std::vector<std::vector<int>> sig(m);
    for (uint64_t c : cs)
      for (int e = 0; e < m; ++e)
        if (c >> e & 1) sig[e].push_back(__builtin_popcountll(c));
    for (auto& s : sig) std::sort(s.begin(), s.end());
    return sig;
  };
  auto sg = signature(cg), sh = signature(ch);
  // cycles of g grouped by their highest edge, checked once fully mapped
  std::vector<std::vector<uint64_t>> closing(m);
  for (uint64_t c : cg) closing[63 - __builtin_clzll(c)].push_back(c);
  std::vector<int> img(m, -1);
  std::vector<char> used(m, 0);
  std::function<bool(int)> go = [&](int e) {
    if (e == m) return true;
    for (int f = 0; f < m; ++f) {
      if (used[f] || sg[e] != sh[f]) continue;
      img[e] = f;
      used[f] = 1;
      bool ok = true;
      for (uint64_t c : closing[e]) {
        uint64_t mc = 0;
        for (int x = 0; x <= e; ++x)
          if (c >> x & 1) mc |= uint64_t{1} << img[x];
        if (!hset.count(mc)) { ok = false; break; }
      }
      if (ok && go(e + 1)) return true;
      used[f] = 0;
    }
    img[e] = -1;
    return false;
  };
  return go(0);
}

// ---------------------------------------------------------------- catalogue

namespace graphs {

Graph theta() { return Graph(2, {{0, 1}, {0, 1}, {0, 1}}); }
Graph figure_eight() { return Graph(1, {{0, 0}, {0, 0}}); }
Graph circle() { return Graph(1, {{0, 0}}); }

Graph complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph complete_bipartite(int m, int n) {
  Graph g(m + n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) g.add_edge(i, m + j);
  return g;
}

Graph prism() {
  return Graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}});
}

Graph cube() {
  Graph g(8);
  for (int v = 0; v < 8; ++v)
    for (int bit = 1; bit < 8; bit <<= 1)
      if (!(v & bit)) g.add_edge(v, v | bit);
  return g;
}

Graph octahedron() {
  Graph g(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (j != i + 3) g.add_edge(i, j);
  return g;
}

}  // namespace graphs

}  // namespace qg
