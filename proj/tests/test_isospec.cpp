#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qgraph/isospec.hpp"

using namespace qg;

namespace {

Graph c4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }
Graph c6() { return Graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}); }

MetricGraph loops(const std::vector<Rational>& l) {
  Graph g(1);
  for (size_t i = 0; i < l.size(); ++i) g.add_edge(0, 0);
  return MetricGraph(g, l);
}

}  // namespace

TEST_CASE("two 4-cycles only switch to isomorphic graphs") { CHECK_FALSE(find_seidel_scheme(c4(), c4())); }

TEST_CASE("seidel pair from a 4-cycle and a 6-cycle") {
  auto s = find_seidel_scheme(c4(), c6());
  REQUIRE(s.has_value());
  auto p = seidel_switch(*s);
  CHECK(p.g.vertex_count() == 10);
  CHECK(p.g.edge_count() == p.switched.edge_count());
  CHECK_FALSE(isomorphic(p.g, p.switched));
  auto a = combinatorial_spectrum(p.g), b = combinatorial_spectrum(p.switched);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
  CHECK(graph_isospectral(p.g, p.switched));

  auto x = eigenvalues(equilateral(p.g), zero_form(p.g), 30).flat();
  auto y = eigenvalues(equilateral(p.switched), zero_form(p.switched), 30).flat();
  REQUIRE(x.size() == y.size());
  for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) < 1e-6);

  auto fam = group_isospectral({equilateral(p.g), equilateral(p.switched)}, 30);
  REQUIRE(fam.size() == 1);
  CHECK(fam[0].members.size() == 2);
  CHECK(fam[0].confirmed);
  CHECK(fam[0].same_total);
  CHECK(fam[0].same_min_edge);
  CHECK(fam[0].half_combinations);
}

TEST_CASE("switching preconditions") {
  Graph path(3, {{0, 1}, {1, 2}});
  Graph k2(2, {{0, 1}});
  CHECK_THROWS_AS(seidel_switch({path, k2, {{1, 0}, {0, 1}, {1, 0}}}), InputError);
  SwitchingScheme bad{c4(), c4(), std::vector<std::vector<bool>>(4, {true, true, false, false})};
  bad.pattern[2] = {true, true, true, false};
  try {
    seidel_switch(bad);
    FAIL("accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("vertex 2") != std::string::npos);
  }
}

TEST_CASE("minimum edge length from orbits") {
  CHECK(min_edge_length_from_orbits(MetricGraph(graphs::theta(), std::vector<double>{1, 1.2, 1.5})) ==
        doctest::Approx(1).epsilon(1e-12));
  CHECK(min_edge_length_from_orbits(MetricGraph(graphs::figure_eight(), std::vector<double>{1.5, 2})) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(min_edge_length_from_orbits(equilateral(graphs::complete(4))) == doctest::Approx(1).epsilon(1e-12));
  Graph lolli(2, {{0, 0}, {0, 1}});
  CHECK_THROWS_AS(min_edge_length_from_orbits(MetricGraph(lolli, std::vector<double>{1, 1})), InputError);

  auto r = invariants(MetricGraph(graphs::theta(), std::vector<double>{1, 1.2, 1.5}));
  CHECK(r.total_length == doctest::Approx(3.7));
  CHECK(r.betti == 2);
  CHECK(r.euler == -1);
  CHECK(r.components == 1);
}

TEST_CASE("edge count bound") {
  CHECK(edge_count_bound(10, 3) == 6);
  CHECK(edge_count_bound(Rational(11, 2), 10) == 5);
  CHECK(edge_count_bound(100, 2) == 3);
  CHECK(edge_count_bound(3, 1) == 1);
}

TEST_CASE("half combinations") {
  CHECK(half_combination(Rational(1, 2), {1}));
  CHECK(half_combination(Rational(5, 4), {Rational(1, 2), Rational(3, 4)}));
  CHECK_FALSE(half_combination(Rational(1, 3), {1}));
  CHECK_FALSE(half_combination(Rational(1, 4), {Rational(3, 2)}));
}

TEST_CASE("edge length lists") {
  auto a = edge_length_lists(loops({1, 1}));
  REQUIRE(a.lists.size() == 1);
  CHECK(a.lists[0] == std::vector<Rational>{1, 1});
  CHECK_FALSE(a.partial);
  auto b = edge_length_lists(loops({1, Rational(3, 2)}));
  REQUIRE(b.lists.size() == 1);
  CHECK(b.lists[0] == std::vector<Rational>{1, Rational(3, 2)});
  // figure-8: chi 2, M 2, L 2 and 5/2
  CHECK(a.lists.size() <= 256);
  CHECK(b.lists.size() <= 256);

  // every list satisfies all four properties
  MetricGraph th(graphs::theta(), std::vector<Rational>{1, Rational(3, 2), 2});
  auto c = edge_length_lists(th);
  CHECK(c.lists.size() >= 2);
  for (const auto& list : c.lists) {
    Rational s = 0;
    for (const auto& x : list) {
      s += x;
      CHECK(half_combination(x, *th.exact));
    }
    CHECK(s == Rational(9, 2));
    CHECK(list.front() == 1);
    for (const auto& x : *th.exact) CHECK(half_combination(x, list));
    CHECK(static_cast<int>(list.size()) <= edge_count_bound(Rational(9, 2), 2));
  }
  CHECK(c.lists.size() <= 81);  // 3^(4 * 4)
}

TEST_CASE("family size bound") {
  auto b = family_size_bound(2, 2);
  CHECK(b.M == 2);
  CHECK(b.exact == Rational(2401, 81) * 2 * 256);
  CHECK(b.ceiling == 15177);
  CHECK(b.log_simple == doctest::Approx(14 * std::log(2.0)));
  for (int chi = 1; chi <= 5; ++chi)
    for (int L = 1; L < 8; ++L) CHECK(family_size_bound(L, chi).exact <= family_size_bound(L + 1, chi).exact);
}

TEST_CASE("search up to total length 3") {
  auto r = quantum_isospectral_search(3);
  CHECK(r.candidates > 5);
  CHECK(r.families.size() == r.candidates);
  for (const auto& f : r.families) CHECK(f.members.size() == 1);
}

TEST_CASE("search up to total length 4") {
  auto r = quantum_isospectral_search(4);
  size_t seen = 0;
  for (const auto& f : r.families) {
    seen += f.members.size();
    const auto& g = f.members[0];
    auto bound = family_size_bound(Rational(std::lround(2 * g.total_length()), 2), g.graph.betti_number());
    CHECK(BigInt(f.members.size()) <= bound.ceiling);
    if (f.members.size() > 1) {
      CHECK(f.same_total);
      CHECK(f.same_min_edge);
      if (f.confirmed) CHECK(f.half_combinations);
    }
  }
  CHECK(seen == r.candidates);
}
