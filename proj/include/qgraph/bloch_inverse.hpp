// From Bloch-spectrum data back to the graph: frequencies and minimal
// homology lengths, the Albanese torus, blocks, planarity, the dual and
// finally the quantum graph itself.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qgraph/frequencies.hpp"
#include "qgraph/orbit_trace.hpp"

namespace qg {

// Coefficient function of one orbit length along the ray t alpha.
struct LengthCoefficients {
  double length = 0;
  CosineFit fit;
};

class BlochSource {
 public:
  virtual ~BlochSource() = default;
  // Coefficient functions of every orbit length up to L, ascending.
  virtual std::vector<LengthCoefficients> coefficients(double L) const = 0;
  virtual double total_length() const = 0;
  // First Betti number read off the constant term of the trace formula.
  virtual int rank_hint() const = 0;
  // Absolute tolerance on the frequencies this source delivers.
  virtual double frequency_tolerance() const = 0;
};

// Exact source: per-length cosine sums from the orbit expansion. Only
// non-backtracking orbits are listed unless full_orbits is set; first
// appearances of frequencies are the same either way.
class ExactBlochSource : public BlochSource {
 public:
  ExactBlochSource(MetricGraph g, OneForm alpha, bool full_orbits = false);
  std::vector<LengthCoefficients> coefficients(double L) const override;
  double total_length() const override { return g_.total_length(); }
  int rank_hint() const override;
  double frequency_tolerance() const override { return 1e-13; }
  // Homology class (fundamental basis of g) carrying frequency mu, if any
  // orbit up to length L has it.
  std::optional<std::vector<long>> class_of(double mu, double L) const;
  const MetricGraph& graph() const { return g_; }
  const OneForm& form() const { return alpha_; }

 private:
  MetricGraph g_;
  OneForm alpha_;
  bool full_;
};

struct NumericSourceOptions {
  int t_count = 64;
  double t_max = 0;   // 0: 4 pi over the largest basis flux
  double sigma = 0.02;
  double k_max = 0;   // 0: sqrt(2 ln 1e8) / sigma + 10
};

// Numerical source: spectra of t alpha on a uniform t-grid, localised in
// length by a Gaussian window and fitted by cosine sums in t.
class NumericBlochSource : public BlochSource {
 public:
  NumericBlochSource(MetricGraph g, OneForm alpha, NumericSourceOptions opts = {});
  std::vector<LengthCoefficients> coefficients(double L) const override;
  double total_length() const override { return total_; }
  int rank_hint() const override { return rank_; }
  double frequency_tolerance() const override { return 1e-6; }
  const std::vector<double>& times() const { return t_; }
  double fitted_constant() const { return chi_; }

 private:
  MetricGraph g_;
  NumericSourceOptions opts_;
  std::vector<double> t_;
  std::vector<SpectrumSlice> slices_;
  double total_ = 0;
  double chi_ = 0;
  std::vector<double> chis_;  // per sample time
  int rank_ = 0;
};

struct FrequencyEntry {
  double mu = 0;
  double length = 0;  // first length, l(class)
  double nu = 0;
  std::vector<long> coords;  // in the generator basis
};

struct FrequencyTable {
  int rank = 0;
  std::vector<double> generators;  // signed frequencies of the basis classes
  std::vector<FrequencyEntry> entries;  // ascending length
  double horizon = 0;
};

struct RecoveryOptions {
  double relation_tol = 1e-7;  // cap; sources with finer frequencies use their own tolerance
  long relation_bound = 32;
  double amplitude_tol = 1e-9;
  double max_horizon_factor = 64;  // queries beyond this many total lengths fail
};

// Length oracle read off a Bloch source; coordinates are in the basis of
// generator frequencies.
class RecoveredOracle : public LengthOracle {
 public:
  RecoveredOracle(std::shared_ptr<const BlochSource> source, RecoveryOptions opts = {});
  int rank() const override;
  std::optional<double> length_within(const std::vector<long>& v, double bound) const override;
  std::vector<std::pair<std::vector<long>, double>> classes_within(double bound) const override;
  double total_length() const override { return source_->total_length(); }
  FrequencyTable table() const;

 private:
  void extend(double L) const;
  void absorb(const std::vector<LengthCoefficients>& data, bool allow_rebase) const;
  void insert_entry(FrequencyEntry fe) const;
  // Coordinates of mu as a sum or difference of two known frequencies.
  std::optional<std::vector<long>> sum_of_known(double mu, double tol) const;

  std::shared_ptr<const BlochSource> source_;
  RecoveryOptions opts_;
  mutable std::mutex mu_;
  mutable FrequencyTable table_;
  mutable std::map<std::vector<long>, double> lengths_;  // canonical sign
  mutable std::multimap<double, std::size_t> by_mu_;     // frequency -> entry
};

std::shared_ptr<RecoveredOracle> recover_homology_lengths(std::shared_ptr<const BlochSource> source,
                                                          const RecoveryOptions& opts = {});

// Integer relation c_0 x_0 + ... + c_n x_n ~ 0 with |c_i| <= bound, by LLL.
// The residual must stay below tol times |c|_1; precision (default tol) is
// the error expected in x and sets the lattice weight. Relations longer
// than a third of the Gaussian heuristic for the lattice are not trusted.
std::optional<std::vector<long>> integer_relation(const std::vector<double>& x, long bound, double tol,
                                                  double precision = 0);

// ------------------------------------------------------------ oracle algebra

bool is_cycle_class(const std::vector<long>& mu, const LengthOracle& oracle, double tol = 1e-9);

std::vector<std::vector<long>> cycle_generator_basis(const LengthOracle& oracle);

struct AlbaneseResult {
  std::vector<std::vector<long>> basis;
  Eigen::MatrixXd gram;
};
AlbaneseResult recover_albanese(const LengthOracle& oracle);

struct Complexity {
  double det = 0;
  double root = 0;  // sqrt(det)
};
Complexity complexity_equilateral(const Eigen::MatrixXd& gram);

// Gram matrices equal up to unimodular congruence, tested by determinant
// and the sorted lengths of all lattice vectors up to the given norm.
bool lattice_isometric(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-9);

// Blocks contracted to points, joined by bridge paths. Nodes at distance 0
// are merged, so a node may carry several blocks or none.
struct BlockStructure {
  Graph tree;
  std::vector<double> lengths;
  std::vector<std::vector<int>> blocks_at;  // per node
  std::vector<int> block_rank;              // per block
  int block_count() const { return static_cast<int>(block_rank.size()); }
  int node_of_block(int b) const;
};

// Reference structure computed from the graph itself.
BlockStructure block_structure(const MetricGraph& g);

// Same tree up to isomorphism, with block a of x matched to block map[a]
// of y, equal ranks and edge lengths within tol.
bool equivalent(const BlockStructure& x, const BlockStructure& y, const std::vector<int>& map, double tol = 1e-9);

struct BlockRecovery {
  std::vector<std::vector<long>> basis;       // cycle generators
  std::vector<int> block_of_generator;
  std::vector<std::vector<double>> distance;  // between blocks
  BlockStructure structure;
};
BlockRecovery recover_blocks(const LengthOracle& oracle);

struct PlanarityOptions {
  bool require_outer_face = false;
  long max_nodes = 2'000'000;
};
struct PlanarBasis {
  std::vector<std::vector<long>> cycles;  // oriented, no positive overlaps
  double total = 0;
};
std::optional<PlanarBasis> recover_planarity(const LengthOracle& oracle, const PlanarityOptions& opts = {});

int count_shared_edges(const std::vector<long>& a, const std::vector<long>& b, const LengthOracle& oracle);

struct RecoveredDual {
  Graph graph;  // vertex i is face i, the last vertex the outer face
  std::vector<std::vector<long>> faces;
  int outer = -1;
};
RecoveredDual recover_dual(const LengthOracle& oracle);

// At least three internally disjoint paths between every pair of vertices
// (parallel edges count separately).
bool three_connected(const Graph& g);

MetricGraph recover_quantum_graph(const LengthOracle& oracle);

// Isomorphism carrying edge lengths onto each other within tol.
bool metric_isomorphic(const MetricGraph& a, const MetricGraph& b, double tol = 1e-9);

}  // namespace qg
