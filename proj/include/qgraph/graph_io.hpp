// Line-based text format shared by the library and the CLI.
//
//   qgraph 1
//   vertices <n>
//   edge <id> <a> <b> [length]
//   form <edge id> <value>
//
// Lengths are decimals or p/q and are kept exactly. Lines starting with
// '#' are comments.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "qgraph/metric_core.hpp"

namespace qg {

struct GraphFile {
  Graph graph;
  std::optional<MetricGraph> metric;  // present when every edge has a length
  std::optional<OneForm> form;        // present when any form line appears
};

GraphFile parse_graph(std::istream& in);
GraphFile parse_graph_string(const std::string& text);
GraphFile parse_graph_file(const std::string& path);

// Exact decimal or p/q; throws InputError on anything else.
Rational parse_rational(const std::string& token);
std::string format_rational(const Rational& q);

void write_graph(std::ostream& out, const Graph& g, const std::vector<double>* lengths = nullptr,
                 const std::vector<Rational>* exact = nullptr, const OneForm* form = nullptr);
void write_graph(std::ostream& out, const MetricGraph& g, const OneForm* form = nullptr);

}  // namespace qg
