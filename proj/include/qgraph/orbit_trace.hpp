// Periodic orbits, their trace-formula coefficients, grouped length
// spectra, a numerical trace-formula check and minimal homology lengths.
#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qgraph/spectral.hpp"

namespace qg {

struct PeriodicOrbit {
  std::vector<Bond> bonds;  // lexicographically minimal rotation
  double length = 0;
  long long exact_length = 0;  // in units of 1/OrbitSet::denominator, when exact
  int repetitions = 1;
  int backtracks = 0;
  std::vector<long> homology;  // fundamental-basis coordinates

  double primitive_length() const { return length / repetitions; }
};

struct OrbitOptions {
  bool non_backtracking = false;
  long long max_walks = 10'000'000;
};

struct OrbitSet {
  std::vector<PeriodicOrbit> orbits;  // sorted by length, then bonds
  bool exact = false;
  long long denominator = 1;
  long long walks = 0;
};

OrbitSet enumerate_orbits(const MetricGraph& g, double L_max, const OrbitOptions& opts = {});

// Product of vertex scattering coefficients around the orbit.
double scattering_product(const Graph& g, const PeriodicOrbit& p);
Rational scattering_product_exact(const Graph& g, const PeriodicOrbit& p);

// l~_p exp(2 pi i integral_p alpha) prod sigma.
std::complex<double> orbit_coefficient(const MetricGraph& g, const PeriodicOrbit& p, const OneForm& alpha);

// Sign of A_p at alpha = 0. Refuses graphs with leaves or degree-2 vertices.
int sign_check(const MetricGraph& g, const PeriodicOrbit& p);

struct LengthTerm {
  std::vector<long> cls;  // representative class, first nonzero coordinate positive
  double mu = 0;          // |flux|
  double nu = 0;          // summed l~ prod sigma over both orientations
  std::optional<Rational> nu_exact;
  int orbit_count = 0;
};

struct LengthEntry {
  double length = 0;
  std::optional<Rational> exact_length;
  double constant = 0;  // terms of zero flux
  std::optional<Rational> constant_exact;
  std::vector<LengthTerm> terms;  // every class, including the zero-flux ones
  std::vector<std::size_t> orbits;  // indices into the orbit set

  // Sum of A_p(t alpha) over the orbits of this length.
  double aggregate(double t) const;
};

struct LengthSpectrum {
  OrbitSet orbits;
  std::vector<LengthEntry> entries;  // ascending length
  const LengthEntry* find(double length, double tol = 1e-9) const;
};

LengthSpectrum length_spectrum(const MetricGraph& g, const OneForm& alpha, double L_max,
                               const OrbitOptions& opts = {});

struct TracePeak {
  double length = 0;
  double spectral = 0;
  double geometric = 0;
  double relerr = 0;
};

struct TraceReport {
  std::vector<TracePeak> peaks;
  double constant = 0;      // fitted constant term
  double euler_ve = 0;      // V - E
  double euler_ve1 = 0;     // V - E - 1
  std::string closer;       // "V-E" or "V-E-1"
  double sigma = 0;
  double max_relerr = 0;
};

// Default window width: a sixth of the smallest gap between orbit lengths
// up to L_max.
double default_trace_window(const MetricGraph& g, double L_max);

TraceReport trace_check(const MetricGraph& g, const OneForm& alpha, const SpectrumSlice& slice,
                        double sigma, double L_max);

// Integer homology classes to minimal periodic-orbit lengths.
class LengthOracle {
 public:
  virtual ~LengthOracle() = default;
  virtual int rank() const = 0;
  // l(v) when l(v) <= bound, otherwise nullopt (certified l(v) > bound).
  virtual std::optional<double> length_within(const std::vector<long>& v, double bound) const = 0;
  // Every nonzero class with l(v) <= bound, both signs, ascending length.
  virtual std::vector<std::pair<std::vector<long>, double>> classes_within(double bound) const = 0;
  // Total length of the graph; every simple cycle is at most this long.
  virtual double total_length() const = 0;
  // Unbounded query; throws when the class cannot be resolved.
  double length(const std::vector<long>& v) const;
};

// Forward oracle over the fundamental basis of g, computed from
// non-backtracking orbit enumeration with a doubling cutoff.
class MinimalLengthOracle : public LengthOracle {
 public:
  explicit MinimalLengthOracle(const MetricGraph& g, double initial_cutoff = 0);
  int rank() const override { return rank_; }
  std::optional<double> length_within(const std::vector<long>& v, double bound) const override;
  std::vector<std::pair<std::vector<long>, double>> classes_within(double bound) const override;
  double total_length() const override { return g_.total_length(); }
  double cutoff() const;
  const MetricGraph& graph() const { return g_; }

 private:
  struct Table {
    double cutoff = 0;
    std::vector<std::pair<std::vector<long>, double>> entries;  // sorted by class
  };
  std::shared_ptr<const Table> build(double cutoff) const;
  std::shared_ptr<const Table> snapshot() const;
  std::shared_ptr<const Table> ensure(double cutoff) const;

  MetricGraph g_;
  int rank_ = 0;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const Table> table_;
};

std::unique_ptr<MinimalLengthOracle> minimal_length_oracle(const MetricGraph& g);

}  // namespace qg
