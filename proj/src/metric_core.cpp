#include "qgraph/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qg {

MetricGraph::MetricGraph(Graph g, std::vector<double> lengths)
    : graph(std::move(g)), length(std::move(lengths)) {
  if (static_cast<int>(length.size()) != graph.edge_count())
    throw InputError("length count does not match edge count");
  for (size_t e = 0; e < length.size(); ++e)
    if (!(length[e] > 0)) throw InputError("edge " + std::to_string(e) + " has nonpositive length");
}

MetricGraph::MetricGraph(Graph g, std::vector<Rational> lengths) : graph(std::move(g)) {
  if (static_cast<int>(lengths.size()) != graph.edge_count())
    throw InputError("length count does not match edge count");
  for (size_t e = 0; e < lengths.size(); ++e) {
    if (lengths[e] <= 0) throw InputError("edge " + std::to_string(e) + " has nonpositive length");
    length.push_back(static_cast<double>(lengths[e]));
  }
  exact = std::move(lengths);
}

double MetricGraph::total_length() const {
  double s = 0;
  for (double l : length) s += l;
  return s;
}

MetricGraph equilateral(const Graph& g, const Rational& len) {
  return MetricGraph(g, std::vector<Rational>(g.edge_count(), len));
}

OneForm zero_form(const Graph& g) { return OneForm{std::vector<double>(g.edge_count(), 0.0)}; }

double integrate(const MetricGraph& g, const OneForm& alpha, Bond b) {
  double v = alpha.a[edge_of(b)] * g.length[edge_of(b)];
  return (b & 1) ? -v : v;
}

MetricGraph suppress_degree_two(const MetricGraph& mg) {
  const Graph& g = mg.graph;
  struct E { int a, b; double l; Rational q; int order; bool alive; };
  std::vector<E> es;
  for (int e = 0; e < g.edge_count(); ++e)
    es.push_back({g.edge(e).a, g.edge(e).b, mg.length[e], mg.exact ? (*mg.exact)[e] : Rational(0), e, true});
  std::vector<char> alive(g.vertex_count(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < g.vertex_count() && !changed; ++v) {
      if (!alive[v]) continue;
      std::vector<int> inc;
      int deg = 0;
      for (size_t i = 0; i < es.size(); ++i) {
        if (!es[i].alive) continue;
        if (es[i].a == v) { ++deg; inc.push_back(static_cast<int>(i)); }
        if (es[i].b == v) { ++deg; if (es[i].a != v) inc.push_back(static_cast<int>(i)); }
      }
      if (deg != 2 || inc.size() != 2) continue;
      E& x = es[inc[0]];
      E& y = es[inc[1]];
      int xo = x.a == v ? x.b : x.a;
      int yo = y.a == v ? y.b : y.a;
      E merged{xo, yo, x.l + y.l, x.q + y.q, std::min(x.order, y.order), true};
      x.alive = y.alive = false;
      es.push_back(merged);
      alive[v] = 0;
      changed = true;
    }
  }
  std::vector<int> vmap(g.vertex_count(), -1);
  int nv = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (alive[v]) vmap[v] = nv++;
  std::vector<E> kept;
  for (auto& e : es)
    if (e.alive) kept.push_back(e);
  std::stable_sort(kept.begin(), kept.end(), [](const E& p, const E& q) { return p.order < q.order; });
  Graph h(nv);
  std::vector<double> len;
  std::vector<Rational> q;
  for (auto& e : kept) {
    h.add_edge(vmap[e.a], vmap[e.b]);
    len.push_back(e.l);
    q.push_back(e.q);
  }
  if (mg.exact) return MetricGraph(h, q);
  return MetricGraph(h, len);
}

MetricGraph split_loops(const MetricGraph& mg) {
  const Graph& g = mg.graph;
  Graph h(g.vertex_count());
  std::vector<double> len;
  std::vector<Rational> q;
  std::vector<std::pair<int, int>> extra;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    Rational qe = mg.exact ? (*mg.exact)[e] : Rational(0);
    if (ed.a == ed.b) {
      int w = h.add_vertex();
      h.add_edge(ed.a, w);
      len.push_back(mg.length[e] / 2);
      q.push_back(qe / 2);
      extra.push_back({w, e});
    } else {
      h.add_edge(ed.a, ed.b);
      len.push_back(mg.length[e]);
      q.push_back(qe);
    }
  }
  for (auto [w, e] : extra) {
    h.add_edge(w, g.edge(e).a);
    len.push_back(mg.length[e] / 2);
    q.push_back((mg.exact ? (*mg.exact)[e] : Rational(0)) / 2);
  }
  if (mg.exact) return MetricGraph(h, q);
  return MetricGraph(h, len);
}

HodgeResult hodge_project(const MetricGraph& mg, const OneForm& beta) {
  const Graph& g = mg.graph;
  const int n = g.vertex_count();
  auto comp = g.component_labels();
  std::vector<char> anchor(n, 0);
  {
    std::vector<char> seen(n + 1, 0);
    for (int v = 0; v < n; ++v)
      if (!seen[comp[v]]) { seen[comp[v]] = 1; anchor[v] = 1; }
  }
  std::vector<int> idx(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (!anchor[v]) idx[v] = m++;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int e = 0; e < g.edge_count(); ++e) {
    int a = g.edge(e).a, b = g.edge(e).b;
    if (a == b) continue;
    double w = 1.0 / mg.length[e];
    // outgoing divergence at a is +beta_e, at b is -beta_e
    if (idx[a] >= 0) rhs(idx[a]) -= beta.a[e];
    if (idx[b] >= 0) rhs(idx[b]) += beta.a[e];
    // -(div d psi) = weighted graph Laplacian
    if (idx[a] >= 0) L(idx[a], idx[a]) += w;
    if (idx[b] >= 0) L(idx[b], idx[b]) += w;
    if (idx[a] >= 0 && idx[b] >= 0) {
      L(idx[a], idx[b]) -= w;
      L(idx[b], idx[a]) -= w;
    }
  }
  HodgeResult r;
  r.psi.assign(n, 0.0);
  if (m > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(L);
    if (ldlt.info() != Eigen::Success || ldlt.isNegative())
      throw NumericError("vertex Laplacian is singular");
    Eigen::VectorXd psi = ldlt.solve(rhs);
    for (int v = 0; v < n; ++v)
      if (idx[v] >= 0) r.psi[v] = psi(idx[v]);
  }
  r.harmonic = beta;
  for (int e = 0; e < g.edge_count(); ++e) {
    int a = g.edge(e).a, b = g.edge(e).b;
    r.harmonic.a[e] -= (r.psi[b] - r.psi[a]) / mg.length[e];
  }
  return r;
}

double chain_inner_product(const MetricGraph& g, const Chain& p, const Chain& q) {
  double s = 0;
  for (int e = 0; e < g.edge_count(); ++e) s += g.length[e] * p[e] * q[e];
  return s;
}

double homology_inner_product(const MetricGraph& g, const HomologyBasis& hb,
                              const std::vector<long>& p, const std::vector<long>& q) {
  return chain_inner_product(g, hb.chain(p), hb.chain(q));
}

Eigen::MatrixXd albanese_gram(const MetricGraph& g, const std::vector<Cycle>& basis) {
  const int n = static_cast<int>(basis.size());
  std::vector<Chain> z;
  for (auto& c : basis) z.push_back(cycle_chain(g.graph, c));
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = chain_inner_product(g, z[i], z[j]);
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
      throw InputError("cycle basis is rank deficient");
  }
  return G;
}

Eigen::MatrixXd jacobian_gram(const MetricGraph& g, const std::vector<Cycle>& basis) {
  Eigen::MatrixXd G = albanese_gram(g, basis);
  if (G.rows() == 0) return G;
  return G.inverse();
}

double flux(const MetricGraph& g, const OneForm& alpha, const Chain& p) {
  double s = 0;
  for (int e = 0; e < g.edge_count(); ++e) s += alpha.a[e] * g.length[e] * p[e];
  return 2 * std::numbers::pi * s;
}

OneForm form_with_fluxes(const MetricGraph& g, const std::vector<double>& integrals) {
  HomologyBasis hb(g.graph);
  if (static_cast<int>(integrals.size()) != hb.rank()) throw InputError("wrong number of cycle integrals");
  OneForm raw = zero_form(g.graph);
  for (int i = 0; i < hb.rank(); ++i) {
    int e = hb.nontree_edges()[i];
    raw.a[e] = integrals[i] / g.length[e];
  }
  return hodge_project(g, raw).harmonic;
}

OneForm generic_one_form(const MetricGraph& g, unsigned seed) {
  const int n = g.graph.betti_number();
  if (n == 0) throw InputError("tree has trivial Bloch data");
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < n; ++c) {
    bool p = true;
    for (int d = 2; d * d <= c; ++d)
      if (c % d == 0) { p = false; break; }
    if (p) primes.push_back(c);
  }
  if (seed != 0) {
    std::mt19937 rng(seed);
    std::shuffle(primes.begin(), primes.end(), rng);
  }
  double mx = 0;
  for (int p : primes) mx = std::max(mx, std::sqrt(static_cast<double>(p)));
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> integrals;
  for (int p : primes) {
    double psi = std::sqrt(static_cast<double>(p)) / (2 * two_pi * mx);  // flux
    integrals.push_back(psi / two_pi);
  }
  return form_with_fluxes(g, integrals);
}

OneForm add_exact_form(const MetricGraph& g, const OneForm& alpha, const std::vector<double>& psi) {
  OneForm r = alpha;
  for (int e = 0; e < g.edge_count(); ++e) {
    int a = g.graph.edge(e).a, b = g.graph.edge(e).b;
    r.a[e] += (psi[b] - psi[a]) / g.length[e];
  }
  return r;
}

OneForm scaled(const OneForm& alpha, double t) {
  OneForm r = alpha;
  for (double& x : r.a) x *= t;
  return r;
}

}  // namespace qg
