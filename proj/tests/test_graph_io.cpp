#include <sstream>

#include "doctest.h"
#include "qgraph/graph_io.hpp"

using namespace qg;

TEST_CASE("parse theta") {
  auto f = parse_graph_string(
      "qgraph 1\n"
      "# theta graph\n"
      "vertices 2\n"
      "edge 0 0 1 1\n"
      "edge 1 0 1 1.2\n"
      "edge 2 0 1 3/2\n");
  CHECK(f.graph.vertex_count() == 2);
  CHECK(f.graph.edge_count() == 3);
  REQUIRE(f.metric);
  CHECK((*f.metric->exact)[1] == Rational(6, 5));
  CHECK((*f.metric->exact)[2] == Rational(3, 2));
  CHECK_FALSE(f.form);
}

TEST_CASE("rational lengths stay exact") {
  auto f = parse_graph_string("qgraph 1\nvertices 2\nedge 0 0 1 23/10\n");
  CHECK((*f.metric->exact)[0] == Rational(23, 10));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("2.5e-1") == Rational(1, 4));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
}

TEST_CASE("diagnostics carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_graph_string("qgraph 1\nvertices 3\n# c\nedge 0 0 5 1.0\n"),
                       "vertex 5 out of range, line 4", InputError);
  CHECK_THROWS_WITH_AS(parse_graph_string("qgraph 1\nvertices 2\nedge 1 0 1\n"),
                       "edge id 1 out of order, expected 0, line 3", InputError);
  CHECK_THROWS_WITH_AS(parse_graph_string("qgraph 1\nvertices 2\nedge 0 0 1 -1\n"),
                       "nonpositive length -1, line 3", InputError);
  CHECK_THROWS_WITH_AS(parse_graph_string("qgraph 2\n"), "unsupported format version 2, line 1", InputError);
  CHECK_THROWS_WITH_AS(parse_graph_string("qgraph 1\nvertices 2\nedge 0 0 1 x\n"),
                       "bad number 'x', line 3", InputError);
  CHECK_THROWS_AS(parse_graph_string("qgraph 1\nvertices 2\nedge 0 0 1 1\nedge 1 0 1\n"), InputError);
  CHECK_THROWS_AS(parse_graph_string("qgraph 1\nvertices 2\nnode 0\n"), InputError);
}

TEST_CASE("combinatorial files and forms") {
  auto f = parse_graph_string("qgraph 1\nvertices 2\nedge 0 0 1\nedge 1 1 1\n");
  CHECK_FALSE(f.metric);
  auto g = parse_graph_string("qgraph 1\nvertices 1\nedge 0 0 0 1\nedge 1 0 0 2\nform 1 0.25\n");
  REQUIRE(g.form);
  CHECK(g.form->a == std::vector<double>{0, 0.25});
  CHECK_THROWS_AS(parse_graph_string("qgraph 1\nvertices 1\nedge 0 0 0 1\nform 3 1\n"), InputError);
}

TEST_CASE("write then parse is the identity") {
  MetricGraph m(graphs::prism(), std::vector<Rational>{1, Rational(23, 10), 3, 4, 5, 6, 7, 8, Rational(1, 3)});
  OneForm a{{0.5, 0, 0, 0, 0, 0, 0, 0, -0.125}};
  std::ostringstream os;
  write_graph(os, m, &a);
  auto f = parse_graph_string(os.str());
  CHECK(isomorphic(f.graph, m.graph));
  CHECK(*f.metric->exact == *m.exact);
  CHECK(f.form->a == a.a);
  std::ostringstream os2;
  write_graph(os2, *f.metric, &*f.form);
  CHECK(os2.str() == os.str());
}
