#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qgraph/metric_core.hpp"

using namespace qg;

namespace {

constexpr double kPi = std::numbers::pi;

double cycle_integral(const MetricGraph& g, const OneForm& a, const Cycle& c) {
  double s = 0;
  for (Bond b : c.bonds) s += integrate(g, a, b);
  return s;
}

// Outgoing divergence at every vertex.
std::vector<double> divergence(const MetricGraph& g, const OneForm& a) {
  std::vector<double> d(g.vertex_count(), 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    d[g.graph.edge(e).a] += a.a[e];
    d[g.graph.edge(e).b] -= a.a[e];
  }
  return d;
}

// Sorted norms of lattice vectors with coefficients in [-2, 2].
std::vector<double> short_vectors(const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(G.rows());
  std::vector<double> out;
  std::vector<int> x(n, -2);
  while (true) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = x[i];
    out.push_back(v.dot(G * v));
    int i = 0;
    while (i < n && x[i] == 2) x[i++] = -2;
    if (i == n) break;
    ++x[i];
  }
  std::sort(out.begin(), out.end());
  out.resize(std::min<size_t>(out.size(), 12));
  return out;
}

Eigen::MatrixXi random_unimodular(int n, std::mt19937& rng) {
  Eigen::MatrixXi M = Eigen::MatrixXi::Identity(n, n);
  std::uniform_int_distribution<int> pick(0, n - 1), coef(-1, 1);
  for (int s = 0; s < 4 * n; ++s) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Eigen::MatrixXi Mi = M;
    Mi.row(i) += coef(rng) * M.row(j);
    if (Mi.cwiseAbs().maxCoeff() <= 3) M = Mi;
  }
  return M;
}

}  // namespace

TEST_CASE("suppress degree two") {
  SUBCASE("path inside a graph merges") {
    // loop - path of two edges (1, 2) - loop
    MetricGraph g(Graph(3, {{0, 0}, {0, 1}, {1, 2}, {2, 2}}), std::vector<double>{1.5, 1.0, 2.0, 0.7});
    auto s = suppress_degree_two(g);
    CHECK(s.vertex_count() == 2);
    CHECK(s.edge_count() == 3);
    CHECK(s.length[1] == doctest::Approx(3.0));
  }
  SUBCASE("bare circle keeps one loop") {
    MetricGraph c(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}), std::vector<Rational>(4, Rational(1, 4)));
    auto s = suppress_degree_two(c);
    CHECK(s.vertex_count() == 1);
    REQUIRE(s.edge_count() == 1);
    CHECK(s.graph.is_loop(0));
    CHECK((*s.exact)[0] == 1);
  }
  SUBCASE("identity without degree-two vertices") {
    MetricGraph k(graphs::complete(4), std::vector<double>{1, 2, 3, 4, 5, 6});
    auto s = suppress_degree_two(k);
    CHECK(s.length == k.length);
    CHECK(isomorphic(s.graph, k.graph));
  }
  SUBCASE("preserves length, Betti number and Albanese lattice") {
    // subdivided theta: each edge of theta split into two
    Graph g(5, {{0, 2}, {2, 1}, {0, 3}, {3, 1}, {0, 4}, {4, 1}});
    MetricGraph m(g, std::vector<double>{0.3, 0.7, 0.5, 0.6, 1.0, 0.4});
    auto s = suppress_degree_two(m);
    CHECK(s.total_length() == doctest::Approx(m.total_length()));
    CHECK(s.graph.betti_number() == g.betti_number());
    auto G1 = albanese_gram(m, spanning_tree_cycle_basis(g));
    auto G2 = albanese_gram(s, spanning_tree_cycle_basis(s.graph));
    CHECK(G1.determinant() == doctest::Approx(G2.determinant()));
    auto v1 = short_vectors(G1), v2 = short_vectors(G2);
    for (size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == doctest::Approx(v2[i]));
  }
}

TEST_CASE("split loops") {
  auto f8 = split_loops(MetricGraph(graphs::figure_eight(), std::vector<double>{2, 3}));
  CHECK(f8.edge_count() == 4);
  auto l = f8.length;
  std::sort(l.begin(), l.end());
  CHECK(l == std::vector<double>{1, 1, 1.5, 1.5});
  MetricGraph k(graphs::complete(4), std::vector<double>(6, 1.0));
  CHECK(split_loops(k).edge_count() == 6);
  MetricGraph db(Graph(2, {{0, 0}, {0, 1}, {1, 1}}), std::vector<double>{1, 0.5, 1});
  CHECK(split_loops(db).edge_count() == 5);
}

TEST_CASE("Hodge projection") {
  MetricGraph th(graphs::theta(), std::vector<double>{1, 1, 1});
  SUBCASE("hand-solved theta") {
    // psi(1) solves 3 psi(1) = 1
    auto r = hodge_project(th, OneForm{{1, 0, 0}});
    CHECK(r.psi[0] == 0);
    CHECK(r.psi[1] == doctest::Approx(1.0 / 3));
    CHECK(r.harmonic.a[0] == doctest::Approx(2.0 / 3));
    CHECK(r.harmonic.a[1] == doctest::Approx(-1.0 / 3));
    for (auto& c : spanning_tree_cycle_basis(th.graph))
      CHECK(cycle_integral(th, r.harmonic, c) == doctest::Approx(cycle_integral(th, OneForm{{1, 0, 0}}, c)));
  }
  SUBCASE("idempotent and kills exact forms") {
    MetricGraph k(graphs::complete(4), std::vector<double>{1, 1.3, 0.7, 2, 1.1, 0.9});
    OneForm beta{{0.3, -1, 2, 0.5, 0.1, -0.4}};
    auto r = hodge_project(k, beta);
    for (double d : divergence(k, r.harmonic)) CHECK(std::abs(d) < 1e-12);
    auto r2 = hodge_project(k, r.harmonic);
    for (double p : r2.psi) CHECK(std::abs(p) < 1e-12);
    auto ex = add_exact_form(k, zero_form(k.graph), {0, 1.5, -2, 0.25});
    auto r3 = hodge_project(k, ex);
    for (double a : r3.harmonic.a) CHECK(std::abs(a) < 1e-12);
  }
}

TEST_CASE("inner products and Gram matrices") {
  MetricGraph th(graphs::theta(), std::vector<double>{1, 1, 1});
  std::vector<Cycle> tb{{{0, 3}}, {{2, 5}}};
  HomologyBasis hb(th.graph);
  auto c0 = cycle_chain(th.graph, tb[0]);
  auto c1 = cycle_chain(th.graph, tb[1]);
  CHECK(chain_inner_product(th, c0, c0) == doctest::Approx(2));
  CHECK(chain_inner_product(th, c0, c1) == doctest::Approx(-1));
  CHECK(homology_inner_product(th, hb, hb.coords(c0), hb.coords(c1)) == doctest::Approx(-1));
  auto G = albanese_gram(th, tb);
  CHECK(G(0, 0) == doctest::Approx(2));
  CHECK(G(0, 1) == doctest::Approx(-1));
  auto J = jacobian_gram(th, tb);
  CHECK(J(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(J(0, 1) == doctest::Approx(1.0 / 3));

  MetricGraph f8(graphs::figure_eight(), std::vector<double>{1.5, 2.5});
  auto Gf = albanese_gram(f8, spanning_tree_cycle_basis(f8.graph));
  CHECK(Gf(0, 0) == doctest::Approx(1.5));
  CHECK(Gf(0, 1) == doctest::Approx(0));
  CHECK(jacobian_gram(f8, spanning_tree_cycle_basis(f8.graph))(1, 1) == doctest::Approx(0.4));

  // equilateral K4 triangles: diagonal 3, off-diagonal +-1
  MetricGraph k4(graphs::complete(4), std::vector<double>(6, 1.0));
  auto faces = *nonpositive_basis_search(k4.graph);
  auto Gk = albanese_gram(k4, faces);
  for (int i = 0; i < 3; ++i) {
    CHECK(Gk(i, i) == doctest::Approx(3));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(Gk(i, j)) == doctest::Approx(1));
  }
  // positive minus negative overlap length
  MetricGraph k4r(graphs::complete(4), std::vector<double>{1, 1.3, 0.7, 2, 1.1, 0.9});
  auto cs = enumerate_simple_cycles(k4r.graph);
  for (auto& p : cs)
    for (auto& q : cs) {
      Overlap o = overlap(p, q);
      double expect = 0;
      for (int e : o.positive) expect += k4r.length[e];
      for (int e : o.negative) expect -= k4r.length[e];
      CHECK(chain_inner_product(k4r, cycle_chain(k4r.graph, p), cycle_chain(k4r.graph, q)) ==
            doctest::Approx(expect));
    }
  CHECK_THROWS_AS(albanese_gram(th, {tb[0], tb[0]}), InputError);
}

TEST_CASE("Gram matrices transform by unimodular congruence and are dual") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> len(0.5, 2.0);
  for (const Graph& g : {graphs::complete(4), graphs::prism(), graphs::cube()}) {
    std::vector<double> l(g.edge_count());
    for (auto& x : l) x = len(rng);
    MetricGraph m(g, l);
    auto basis = spanning_tree_cycle_basis(g);
    auto G = albanese_gram(m, basis);
    auto J = jacobian_gram(m, basis);
    CHECK((J * G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).norm() < 1e-10);
    HomologyBasis hb(g);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXi M = random_unimodular(hb.rank(), rng);
      CHECK(std::abs(M.cast<double>().determinant()) == doctest::Approx(1));
      Eigen::MatrixXd GM(hb.rank(), hb.rank());
      for (int i = 0; i < hb.rank(); ++i)
        for (int j = 0; j < hb.rank(); ++j) {
          std::vector<long> p(hb.rank()), q(hb.rank());
          for (int k = 0; k < hb.rank(); ++k) { p[k] = M(k, i); q[k] = M(k, j); }
          GM(i, j) = homology_inner_product(m, hb, p, q);
        }
      Eigen::MatrixXd expect = M.cast<double>().transpose() * G * M.cast<double>();
      CHECK((GM - expect).norm() < 1e-10);
    }
  }
}

TEST_CASE("flux and generic forms") {
  MetricGraph f8(graphs::figure_eight(), std::vector<double>{1.0, std::sqrt(2.0)});
  Chain loop1{1, 0};
  CHECK(flux(f8, zero_form(f8.graph), loop1) == 0);
  CHECK(flux(f8, OneForm{{1 / (2 * kPi * 1.0), 0}}, loop1) == doctest::Approx(1.0));
  CHECK(flux(f8, OneForm{{0.3, 0.2}}, Chain{0, 0}) == 0);

  MetricGraph circle(graphs::circle(), std::vector<double>{1.0});
  auto a1 = generic_one_form(circle);
  CHECK(flux(circle, a1, Chain{1}) == doctest::Approx(1 / (4 * kPi)));

  auto a2 = generic_one_form(f8);
  double m1 = flux(f8, a2, Chain{1, 0}), m2 = flux(f8, a2, Chain{0, 1});
  CHECK(m2 / m1 == doctest::Approx(std::sqrt(3.0 / 2.0)));
  double least = 1e9;
  for (int a = -20; a <= 20; ++a)
    for (int b = -20; b <= 20; ++b)
      if (a || b) least = std::min(least, std::abs(a * m1 + b * m2));
  CHECK(least > 1e-9);
  auto a3 = scaled(a2, 2.5);
  CHECK(flux(f8, a3, Chain{1, 1}) == doctest::Approx(2.5 * (m1 + m2)));

  auto a4 = generic_one_form(f8, 5);
  double f1 = flux(f8, a4, Chain{1, 0}), f2 = flux(f8, a4, Chain{0, 1});
  CHECK(std::max(f1, f2) == doctest::Approx(1 / (4 * kPi)));

  MetricGraph tree(Graph(3, {{0, 1}, {1, 2}}), std::vector<double>{1, 1});
  CHECK_THROWS_WITH_AS(generic_one_form(tree), "tree has trivial Bloch data", InputError);
}

TEST_CASE("exact forms leave cycle fluxes unchanged") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  MetricGraph th(graphs::theta(), std::vector<double>{1, 1.2, 1.5});
  auto alpha = generic_one_form(th);
  CHECK(add_exact_form(th, alpha, {0, 0}).a == alpha.a);
  for (int trial = 0; trial < 10; ++trial) {
    auto beta = add_exact_form(th, alpha, {u(rng), u(rng)});
    for (auto& c : enumerate_simple_cycles(th.graph)) {
      Chain z = cycle_chain(th.graph, c);
      CHECK(std::abs(flux(th, beta, z) - flux(th, alpha, z)) < 1e-12);
    }
  }
}
