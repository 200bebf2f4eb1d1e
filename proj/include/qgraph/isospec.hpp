// Isospectral constructions and the finiteness bounds: Seidel switching,
// invariants shared by isospectral quantum graphs, and small searches.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgraph/metric_core.hpp"
#include "qgraph/spectral.hpp"

namespace qg {

// pattern[i][j]: vertex i of g1 adjacent to vertex j of g2 in the first graph.
struct SwitchingScheme {
  Graph g1, g2;
  std::vector<std::vector<bool>> pattern;
};

struct SeidelPair {
  Graph g, switched;
};

// Vertices of g1 come first. Throws InputError naming the offending vertex.
SeidelPair seidel_switch(const SwitchingScheme& s);

// First half-adjacency pattern (lexicographic) whose switched pair is
// non-isomorphic; none if every pattern gives isomorphic graphs.
std::optional<SwitchingScheme> find_seidel_scheme(const Graph& g1, const Graph& g2);

// Shortest orbit length over two, loops split in halves first.
double min_edge_length_from_orbits(const MetricGraph& g);

struct InvariantRecord {
  double total_length = 0;
  int betti = 0;       // E - V + 1
  int euler = 0;       // V - E
  double min_edge = 0;  // loop-adjusted
  int components = 0;
};
InvariantRecord invariants(const MetricGraph& g);

// min(floor L, 3 chi - 3) with chi = E - V + 1, at least 1.
int edge_count_bound(const Rational& L, int chi);

struct LengthLists {
  std::vector<std::vector<Rational>> lists;  // ascending entries
  bool partial = false;                      // stopped at the cap
};
// Multisets of lengths that are 1/2 N combinations of the lengths of g,
// sum to its total length, have minimum equal to the minimum of g and
// generate every length of g back. Lengths must be exact.
LengthLists edge_length_lists(const MetricGraph& g, std::size_t cap = 1'000'000);

// Is x a 1/2 N combination of the given lengths.
bool half_combination(const Rational& x, const std::vector<Rational>& lengths);

struct FamilyBound {
  int M = 0;
  Rational exact;      // (2M/3 + 1)^(2M) M! M^(4 floor L)
  BigInt ceiling;
  double log_simple = 0;  // 7 L ln L
};
FamilyBound family_size_bound(const Rational& L, int chi);

struct Family {
  std::vector<MetricGraph> members;
  bool confirmed = true;     // still equal at twice the cutoff
  bool same_total = true;
  bool same_min_edge = true;
  bool half_combinations = true;
};

// Groups graphs whose spectra up to k_max agree elementwise within tol.
std::vector<Family> group_isospectral(const std::vector<MetricGraph>& graphs, double k_max, double tol = 1e-6);

struct SearchOptions {
  Rational resolution{1, 2};
  double k_max = 30;
  double tol = 1e-6;
  int max_edges = 6;
};
struct SearchResult {
  std::size_t candidates = 0;
  std::vector<Family> families;  // every group, singletons included
};
// Leafless quantum graphs without degree-2 vertices (the circle aside),
// up to metric isomorphism, with minimum length 1, total length at most
// L_max and lengths on the resolution grid.
SearchResult quantum_isospectral_search(const Rational& L_max, const SearchOptions& opts = {});

}  // namespace qg
