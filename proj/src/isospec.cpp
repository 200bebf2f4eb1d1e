#include "qgraph/isospec.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qgraph/bloch_inverse.hpp"
#include "qgraph/orbit_trace.hpp"
#include "qgraph/parallel.hpp"

namespace qg {

namespace {

bool simple_regular(const Graph& g, int& degree) {
  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges()) {
    if (e.a == e.b) return false;
    if (!seen.insert(std::minmax(e.a, e.b)).second) return false;
  }
  degree = g.vertex_count() ? g.degree(0) : 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != degree) return false;
  return true;
}

BigInt lcm_den(const std::vector<Rational>& xs) {
  BigInt d = 1;
  for (const auto& x : xs) {
    BigInt q = boost::multiprecision::denominator(x);
    d = d / boost::multiprecision::gcd(d, q) * q;
  }
  return d;
}

long to_long(const Rational& x) {
  if (boost::multiprecision::denominator(x) != 1) throw NumericError("expected an integer");
  return static_cast<long>(boost::multiprecision::numerator(x));
}

// Reachable sums of nonnegative integer multiples of w up to limit.
std::vector<char> knapsack(const std::vector<long>& w, long limit) {
  if (limit > 50'000'000) throw InconclusiveError("length denominators too large for exact combination search");
  std::vector<char> r(limit + 1, 0);
  r[0] = 1;
  for (long x : w) {
    if (x <= 0) continue;
    for (long s = x; s <= limit; ++s)
      if (r[s - x]) r[s] = 1;
  }
  return r;
}

std::vector<Rational> exact_lengths(const MetricGraph& g) {
  if (!g.exact) throw InputError("exact edge lengths are required");
  return *g.exact;
}

std::optional<Rational> exact_min_edge(const MetricGraph& g) {
  if (!g.exact) return std::nullopt;
  std::optional<Rational> m;
  for (int e = 0; e < g.edge_count(); ++e) {
    Rational l = (*g.exact)[e];
    if (g.graph.edge(e).a == g.graph.edge(e).b) l /= 2;
    if (!m || l < *m) m = l;
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------- switching

SeidelPair seidel_switch(const SwitchingScheme& s) {
  int d1 = 0, d2 = 0;
  if (!simple_regular(s.g1, d1)) throw InputError("first graph is not simple and regular");
  if (!simple_regular(s.g2, d2)) throw InputError("second graph is not simple and regular");
  const int n1 = s.g1.vertex_count(), n2 = s.g2.vertex_count();
  if (static_cast<int>(s.pattern.size()) != n1) throw InputError("pattern needs one row per vertex of the first graph");
  for (int i = 0; i < n1; ++i) {
    if (static_cast<int>(s.pattern[i].size()) != n2)
      throw InputError("pattern row " + std::to_string(i) + " has the wrong length");
    int c = static_cast<int>(std::count(s.pattern[i].begin(), s.pattern[i].end(), true));
    if (2 * c != n2) {
      std::ostringstream os;
      os << "vertex " << i << " of the first graph is adjacent to " << c << " of " << n2 << " vertices";
      throw InputError(os.str());
    }
  }
  for (int j = 0; j < n2; ++j) {
    int c = 0;
    for (int i = 0; i < n1; ++i) c += s.pattern[i][j];
    if (2 * c != n1) {
      std::ostringstream os;
      os << "vertex " << j << " of the second graph is adjacent to " << c << " of " << n1 << " vertices";
      throw InputError(os.str());
    }
  }
  SeidelPair p{Graph(n1 + n2), Graph(n1 + n2)};
  for (const auto& e : s.g1.edges()) {
    p.g.add_edge(e.a, e.b);
    p.switched.add_edge(e.a, e.b);
  }
  for (const auto& e : s.g2.edges()) {
    p.g.add_edge(n1 + e.a, n1 + e.b);
    p.switched.add_edge(n1 + e.a, n1 + e.b);
  }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) (s.pattern[i][j] ? p.g : p.switched).add_edge(i, n1 + j);
  return p;
}

std::optional<SwitchingScheme> find_seidel_scheme(const Graph& g1, const Graph& g2) {
  const int n1 = g1.vertex_count(), n2 = g2.vertex_count();
  if (n1 % 2 || n2 % 2) return std::nullopt;
  if (n1 > 6 || n2 > 6) throw InputError("exhaustive pattern search is limited to 6 + 6 vertices");
  std::vector<std::vector<bool>> rows;
  for (int m = 0; m < (1 << n2); ++m) {
    if (2 * __builtin_popcount(m) != n2) continue;
    std::vector<bool> r(n2);
    for (int j = 0; j < n2; ++j) r[j] = (m >> j) & 1;
    rows.push_back(r);
  }
  SwitchingScheme s{g1, g2, std::vector<std::vector<bool>>(n1)};
  std::vector<int> cols(n2, 0);
  std::function<bool(int)> go = [&](int i) {
    if (i == n1) {
      for (int c : cols)
        if (2 * c != n1) return false;
      auto p = seidel_switch(s);
      return !isomorphic(p.g, p.switched);
    }
    for (const auto& r : rows) {
      bool ok = true;
      for (int j = 0; j < n2; ++j)
        if (r[j] && 2 * (cols[j] + 1) > n1) ok = false;
      if (!ok) continue;
      s.pattern[i] = r;
      for (int j = 0; j < n2; ++j) cols[j] += r[j];
      if (go(i + 1)) return true;
      for (int j = 0; j < n2; ++j) cols[j] -= r[j];
    }
    return false;
  };
  if (go(0)) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------- invariants

double min_edge_length_from_orbits(const MetricGraph& g) {
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.graph.degree(v) == 1) throw InputError("graph has a leaf at vertex " + std::to_string(v));
  if (g.edge_count() == 0) throw InputError("graph has no edges");
  MetricGraph h = split_loops(g);
  double L = 2 * *std::min_element(h.length.begin(), h.length.end()) * (1 + 1e-12);
  while (true) {
    auto os = enumerate_orbits(h, L);
    if (!os.orbits.empty()) {
      double m = os.orbits[0].length;
      for (const auto& p : os.orbits) m = std::min(m, p.length);
      return m / 2;
    }
    L *= 2;
  }
}

InvariantRecord invariants(const MetricGraph& g) {
  InvariantRecord r;
  r.total_length = g.total_length();
  r.components = g.graph.component_count();
  r.betti = g.edge_count() - g.vertex_count() + r.components;
  r.euler = g.vertex_count() - g.edge_count();
  r.min_edge = min_edge_length_from_orbits(g);
  return r;
}

int edge_count_bound(const Rational& L, int chi) {
  BigInt f = boost::multiprecision::numerator(L) / boost::multiprecision::denominator(L);
  long fl = static_cast<long>(f);
  long m = std::min<long>(fl, 3L * chi - 3);
  return static_cast<int>(std::max<long>(m, 1));
}

bool half_combination(const Rational& x, const std::vector<Rational>& lengths) {
  if (x < 0) return false;
  if (x == 0) return true;
  std::vector<Rational> all(lengths);
  all.push_back(x);
  BigInt D = lcm_den(all);
  std::vector<long> w;
  for (const auto& l : lengths) w.push_back(to_long(l * Rational(D)));
  long target = to_long(2 * x * Rational(D));
  return knapsack(w, target)[target];
}

LengthLists edge_length_lists(const MetricGraph& g, std::size_t cap) {
  auto l = exact_lengths(g);
  if (l.empty()) throw InputError("graph has no edges");
  Rational L = 0;
  for (auto& x : l) L += x;
  const Rational m = *std::min_element(l.begin(), l.end());
  const int chi = g.edge_count() - g.vertex_count() + g.graph.component_count();
  const int M = edge_count_bound(L / m, chi);
  // values of the form sum a_i l_i / 2 on the grid 1/(2D)
  std::vector<Rational> all(l);
  BigInt D = lcm_den(all);
  std::vector<long> w;
  for (auto& x : l) w.push_back(to_long(x * Rational(D)));
  const long limit = to_long(2 * L * Rational(D));
  auto reach = knapsack(w, limit);
  std::vector<Rational> cand;
  for (long s = 0; s <= limit; ++s) {
    if (!reach[s]) continue;
    Rational v(BigInt(s), 2 * D);
    if (v >= m) cand.push_back(v);
  }
  LengthLists out;
  std::vector<Rational> cur{m};
  std::function<void(size_t, Rational)> go = [&](size_t from, Rational rest) {
    if (out.lists.size() >= cap) {
      out.partial = true;
      return;
    }
    if (rest == 0) {
      bool back = std::all_of(l.begin(), l.end(), [&](const Rational& x) { return half_combination(x, cur); });
      if (back) out.lists.push_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) >= M) return;
    for (size_t i = from; i < cand.size() && cand[i] <= rest; ++i) {
      cur.push_back(cand[i]);
      go(i, rest - cand[i]);
      cur.pop_back();
    }
  };
  go(0, L - m);
  return out;
}

FamilyBound family_size_bound(const Rational& L, int chi) {
  FamilyBound b;
  b.M = edge_count_bound(L, chi);
  const int M = b.M;
  const long fl = static_cast<long>(BigInt(boost::multiprecision::numerator(L) / boost::multiprecision::denominator(L)));
  Rational base = Rational(2 * M, 3) + 1;
  Rational v = 1;
  for (int i = 0; i < 2 * M; ++i) v *= base;
  for (int i = 2; i <= M; ++i) v *= i;
  for (long i = 0; i < 4 * fl; ++i) v *= M;
  b.exact = v;
  BigInt n = boost::multiprecision::numerator(v), d = boost::multiprecision::denominator(v);
  b.ceiling = n / d + (n % d != 0 ? 1 : 0);
  double Ld = static_cast<double>(L);
  b.log_simple = Ld > 0 ? 7 * Ld * std::log(Ld) : 0;
  return b;
}

// ---------------------------------------------------------------- families

namespace {

std::vector<double> truncated(const MetricGraph& g, double k_max) {
  auto s = eigenvalues(g, zero_form(g.graph), k_max + 0.5);
  std::vector<double> out;
  for (double k : s.flat())
    if (k <= k_max) out.push_back(k);
  return out;
}

bool same_spectrum(const std::vector<double>& a, const std::vector<double>& b, double k_max, double tol) {
  // eigenvalues within tol of the cutoff may sit on either side of it
  auto inner = [&](const std::vector<double>& v) {
    size_t n = 0;
    while (n < v.size() && v[n] <= k_max - tol) ++n;
    return n;
  };
  size_t na = inner(a), nb = inner(b);
  if (na != nb) return false;
  for (size_t i = 0; i < na; ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

std::vector<Family> group_isospectral(const std::vector<MetricGraph>& graphs, double k_max, double tol) {
  const size_t n = graphs.size();
  std::vector<std::vector<double>> spec(n);
  parallel_for(n, [&](size_t i) { spec[i] = truncated(graphs[i], k_max); });
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (find(i) != find(j) && same_spectrum(spec[i], spec[j], k_max, tol)) uf[find(i)] = find(j);
  std::map<int, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<size_t>> ordered;
  for (auto& [_, v] : groups) ordered.push_back(v);
  std::sort(ordered.begin(), ordered.end());
  std::vector<Family> out;
  for (const auto& idx : ordered) {
    Family f;
    for (size_t i : idx) f.members.push_back(graphs[i]);
    if (idx.size() > 1) {
      std::vector<std::vector<double>> wide(idx.size());
      parallel_for(idx.size(), [&](size_t i) { wide[i] = truncated(graphs[idx[i]], 2 * k_max); });
      for (size_t i = 1; i < idx.size(); ++i)
        if (!same_spectrum(wide[0], wide[i], 2 * k_max, tol)) f.confirmed = false;
      auto r0 = invariants(graphs[idx[0]]);
      auto m0 = exact_min_edge(graphs[idx[0]]);
      for (size_t i = 1; i < idx.size(); ++i) {
        const auto& g = graphs[idx[i]];
        auto r = invariants(g);
        if (std::abs(r.total_length - r0.total_length) > 1e-12 * r0.total_length) f.same_total = false;
        auto m = exact_min_edge(g);
        if (m && m0) {
          if (*m != *m0) f.same_min_edge = false;
        } else if (std::abs(r.min_edge - r0.min_edge) > 1e-12) {
          f.same_min_edge = false;
        }
      }
      for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) {
          if (i == j || !graphs[idx[i]].exact || !graphs[idx[j]].exact) continue;
          for (const auto& x : *graphs[idx[i]].exact)
            if (!half_combination(x, *graphs[idx[j]].exact)) f.half_combinations = false;
        }
    }
    out.push_back(std::move(f));
  }
  return out;
}

SearchResult quantum_isospectral_search(const Rational& L_max, const SearchOptions& opts) {
  if (opts.resolution <= 0) throw InputError("resolution must be positive");
  if (opts.max_edges > 6) throw InputError("search is limited to 6 edges");
  const long max_e = std::min<long>(opts.max_edges, static_cast<long>(static_cast<double>(L_max) + 1e-12));
  // combinatorial shapes: connected, every degree at least 3, or the circle
  std::vector<Graph> shapes;
  for (int E = 1; E <= max_e; ++E)
    for (int V = 1; V <= std::max(1, 2 * E / 3); ++V) {
      std::vector<std::pair<int, int>> pairs;
      for (int a = 0; a < V; ++a)
        for (int b = a; b < V; ++b) pairs.push_back({a, b});
      std::vector<int> pick(E, 0);
      std::function<void(int, int)> go = [&](int pos, int from) {
        if (pos == E) {
          std::vector<std::pair<int, int>> es;
          for (int p : pick) es.push_back(pairs[p]);
          Graph g(V, es);
          if (!g.connected()) return;
          bool circle = V == 1 && E == 1;
          for (int v = 0; v < V && !circle; ++v)
            if (g.degree(v) < 3) return;
          for (const auto& s : shapes)
            if (s.vertex_count() == V && s.edge_count() == E && isomorphic(s, g)) return;
          shapes.push_back(g);
          return;
        }
        for (int p = from; p < static_cast<int>(pairs.size()); ++p) {
          pick[pos] = p;
          go(pos + 1, p);
        }
      };
      go(0, 0);
    }
  // lengths 1 + k * resolution with minimum exactly 1
  std::vector<MetricGraph> graphs;
  for (const auto& G : shapes) {
    const int E = G.edge_count();
    std::vector<Rational> len(E);
    std::vector<MetricGraph> mine;
    std::function<void(int, Rational, bool)> go = [&](int e, Rational total, bool has_one) {
      if (e == E) {
        if (!has_one) return;
        MetricGraph g(G, len);
        for (const auto& h : mine)
          if (metric_isomorphic(h, g, 1e-12)) return;
        mine.push_back(g);
        return;
      }
      for (Rational x = 1; total + x + (E - e - 1) <= L_max; x += opts.resolution) {
        len[e] = x;
        go(e + 1, total + x, has_one || x == 1);
      }
    };
    go(0, 0, false);
    graphs.insert(graphs.end(), mine.begin(), mine.end());
  }
  SearchResult r;
  r.candidates = graphs.size();
  r.families = group_isospectral(graphs, opts.k_max, opts.tol);
  return r;
}

}  // namespace qg
