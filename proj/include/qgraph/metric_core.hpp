// Metric graphs, harmonic 1-forms, Hodge projection, homology inner
// products and the Albanese/Jacobian Gram matrices.
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "qgraph/graph_core.hpp"

namespace qg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct MetricGraph {
  Graph graph;
  std::vector<double> length;
  // Present when every length was given exactly (decimal or p/q).
  std::optional<std::vector<Rational>> exact;

  MetricGraph() = default;
  MetricGraph(Graph g, std::vector<double> lengths);
  MetricGraph(Graph g, std::vector<Rational> lengths);

  double total_length() const;
  double bond_length(Bond b) const { return length[edge_of(b)]; }
  int edge_count() const { return graph.edge_count(); }
  int vertex_count() const { return graph.vertex_count(); }
};

// Every edge gets length 1 (exact).
MetricGraph equilateral(const Graph& g, const Rational& len = 1);

// Constant value per edge along its reference orientation a -> b.
struct OneForm {
  std::vector<double> a;
};

OneForm zero_form(const Graph& g);
double integrate(const MetricGraph& g, const OneForm& alpha, Bond b);

MetricGraph suppress_degree_two(const MetricGraph& g);
MetricGraph split_loops(const MetricGraph& g);

struct HodgeResult {
  std::vector<double> psi;
  OneForm harmonic;
};
HodgeResult hodge_project(const MetricGraph& g, const OneForm& beta);

// Chains are signed edge multiplicities.
double chain_inner_product(const MetricGraph& g, const Chain& p, const Chain& q);
double homology_inner_product(const MetricGraph& g, const HomologyBasis& hb,
                              const std::vector<long>& p, const std::vector<long>& q);

Eigen::MatrixXd albanese_gram(const MetricGraph& g, const std::vector<Cycle>& basis);
Eigen::MatrixXd jacobian_gram(const MetricGraph& g, const std::vector<Cycle>& basis);

// 2*pi * integral of alpha over the chain.
double flux(const MetricGraph& g, const OneForm& alpha, const Chain& p);

// Harmonic form whose fluxes over the fundamental basis cycles are
// sqrt(p_i) for the first primes, rescaled so the largest equals 1/(4pi).
// The seed permutes which prime goes to which cycle.
OneForm generic_one_form(const MetricGraph& g, unsigned seed = 0);

// Harmonic form with prescribed integrals over the
// fundamental basis cycles.
OneForm form_with_fluxes(const MetricGraph& g, const std::vector<double>& cycle_integrals);

OneForm add_exact_form(const MetricGraph& g, const OneForm& alpha, const std::vector<double>& psi);

OneForm scaled(const OneForm& alpha, double t);

}  // namespace qg
