#include "qgraph/orbit_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;

// Integer lengths over a common denominator, when every length is exact
// and the scaled values fit comfortably.
bool integer_lengths(const MetricGraph& g, std::vector<long long>& out, long long& den) {
  if (!g.exact) return false;
  BigInt d = 1;
  for (const Rational& q : *g.exact) {
    BigInt qd = boost::multiprecision::denominator(q);
    d = d / boost::multiprecision::gcd(d, qd) * qd;
    if (d > BigInt(1'000'000'000LL)) return false;
  }
  out.clear();
  for (const Rational& q : *g.exact) {
    Rational s = q * Rational(d);
    BigInt n = boost::multiprecision::numerator(s);
    if (n > BigInt(1'000'000'000'000LL)) return false;
    out.push_back(static_cast<long long>(n));
  }
  den = static_cast<long long>(d);
  return true;
}

std::vector<long> canonical_sign(std::vector<long> v) {
  for (long x : v) {
    if (x > 0) break;
    if (x < 0) {
      for (long& y : v) y = -y;
      break;
    }
  }
  return v;
}

}  // namespace

OrbitSet enumerate_orbits(const MetricGraph& g, double L_max, const OrbitOptions& opts) {
  const Graph& G = g.graph;
  const int B = G.bond_count();
  OrbitSet out;
  std::vector<long long> ilen;
  long long den = 1;
  out.exact = integer_lengths(g, ilen, den);
  out.denominator = den;
  const long long ilimit =
      out.exact ? static_cast<long long>(std::floor(L_max * static_cast<double>(den) + 1e-6)) : 0;
  const double limit = L_max + 1e-9 * std::max(1.0, L_max);
  HomologyBasis hb(G);

  std::vector<Bond> seq;
  long long walks = 0;
  auto is_min_rotation = [&]() {
    const size_t n = seq.size();
    for (size_t i = 1; i < n; ++i) {
      if (seq[i] != seq[0]) continue;
      for (size_t k = 0; k < n; ++k) {
        Bond x = seq[(i + k) % n], y = seq[k];
        if (x < y) return false;
        if (x > y) break;
      }
    }
    return true;
  };
  auto record = [&](double len, long long ilen_sum) {
    PeriodicOrbit p;
    p.bonds = seq;
    p.length = len;
    p.exact_length = ilen_sum;
    const size_t n = seq.size();
    size_t period = n;
    for (size_t d = 1; d < n; ++d) {
      if (n % d) continue;
      bool ok = true;
      for (size_t i = 0; i < n && ok; ++i)
        if (seq[i] != seq[(i + d) % n]) ok = false;
      if (ok) { period = d; break; }
    }
    p.repetitions = static_cast<int>(n / period);
    for (size_t i = 0; i < n; ++i)
      if (seq[(i + 1) % n] == reverse(seq[i])) ++p.backtracks;
    Chain z(G.edge_count(), 0);
    for (Bond b : seq) z[edge_of(b)] += (b & 1) ? -1 : 1;
    p.homology = hb.coords(z);
    out.orbits.push_back(std::move(p));
  };

  for (Bond s = 0; s < B; ++s) {
    struct Frame { size_t next; };
    // explicit DFS: seq holds the walk, frames the next candidate index
    seq.assign(1, s);
    double len = g.bond_length(s);
    long long il = out.exact ? ilen[edge_of(s)] : 0;
    if (out.exact ? il > ilimit : len > limit) continue;
    std::vector<size_t> frame{0};
    std::vector<double> lens{len};
    std::vector<long long> ilens{il};
    auto closes = [&]() {
      Bond last = seq.back();
      if (G.terminus(last) != G.origin(s)) return false;
      if (s == reverse(last) && (opts.non_backtracking || G.degree(G.origin(s)) == 2)) return false;
      return true;
    };
    if (closes() && is_min_rotation()) record(len, il);
    while (!frame.empty()) {
      Bond last = seq.back();
      const auto& nbrs = G.out_bonds(G.terminus(last));
      size_t& idx = frame.back();
      bool pushed = false;
      while (idx < nbrs.size()) {
        Bond nb = nbrs[idx++];
        if (nb < s) continue;
        if (nb == reverse(last) && (opts.non_backtracking || G.degree(G.terminus(last)) == 2)) continue;
        double nl = lens.back() + g.bond_length(nb);
        long long nil = out.exact ? ilens.back() + ilen[edge_of(nb)] : 0;
        if (out.exact ? nil > ilimit : nl > limit) continue;
        if (++walks > opts.max_walks) {
          std::ostringstream os;
          os << "orbit enumeration exceeded " << opts.max_walks << " partial walks; lower L_max";
          throw InconclusiveError(os.str());
        }
        seq.push_back(nb);
        lens.push_back(nl);
        ilens.push_back(nil);
        frame.push_back(0);
        if (closes() && is_min_rotation()) record(nl, nil);
        pushed = true;
        break;
      }
      if (!pushed) {
        frame.pop_back();
        seq.pop_back();
        lens.pop_back();
        ilens.pop_back();
      }
    }
  }
  out.walks = walks;
  if (out.exact)
    for (auto& p : out.orbits) p.length = static_cast<double>(p.exact_length) / static_cast<double>(den);
  std::sort(out.orbits.begin(), out.orbits.end(), [&](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (out.exact ? a.exact_length != b.exact_length : a.length != b.length)
      return out.exact ? a.exact_length < b.exact_length : a.length < b.length;
    return a.bonds < b.bonds;
  });
  return out;
}

double scattering_product(const Graph& g, const PeriodicOrbit& p) {
  double s = 1;
  const size_t n = p.bonds.size();
  for (size_t i = 0; i < n; ++i) s *= scattering_coefficient(g, p.bonds[i], p.bonds[(i + 1) % n]);
  return s;
}

Rational scattering_product_exact(const Graph& g, const PeriodicOrbit& p) {
  Rational s = 1;
  const size_t n = p.bonds.size();
  for (size_t i = 0; i < n; ++i) {
    Bond b = p.bonds[i], nb = p.bonds[(i + 1) % n];
    Rational c(2, g.degree(g.terminus(b)));
    if (nb == reverse(b)) c -= 1;
    s *= c;
  }
  return s;
}

std::complex<double> orbit_coefficient(const MetricGraph& g, const PeriodicOrbit& p, const OneForm& alpha) {
  double w = 0;
  for (Bond b : p.bonds) w += integrate(g, alpha, b);
  return p.primitive_length() * scattering_product(g.graph, p) * std::exp(std::complex<double>(0, 2 * kPi * w));
}

int sign_check(const MetricGraph& g, const PeriodicOrbit& p) {
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.graph.degree(v) == 1) throw InputError("graph has a leaf at vertex " + std::to_string(v));
    if (g.graph.degree(v) == 2) throw InputError("graph has a degree-2 vertex " + std::to_string(v));
  }
  double a = orbit_coefficient(g, p, zero_form(g.graph)).real();
  return a > 0 ? 1 : -1;
}

double LengthEntry::aggregate(double t) const {
  double s = 0;
  for (const auto& term : terms) s += term.nu * std::cos(term.mu * t);
  return s;
}

const LengthEntry* LengthSpectrum::find(double length, double tol) const {
  for (const auto& e : entries)
    if (std::abs(e.length - length) <= tol) return &e;
  return nullptr;
}

LengthSpectrum length_spectrum(const MetricGraph& g, const OneForm& alpha, double L_max,
                               const OrbitOptions& opts) {
  LengthSpectrum ls;
  ls.orbits = enumerate_orbits(g, L_max, opts);
  const auto& os = ls.orbits.orbits;
  HomologyBasis hb(g.graph);
  std::vector<Chain> basis_chain;
  for (auto& c : hb.cycles()) basis_chain.push_back(cycle_chain(g.graph, c));
  auto class_flux = [&](const std::vector<long>& v) {
    double w = 0;
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i]) w += v[i] * flux(g, alpha, basis_chain[i]);
    return std::abs(w);
  };
  size_t i = 0;
  while (i < os.size()) {
    size_t j = i;
    while (j < os.size() && (ls.orbits.exact ? os[j].exact_length == os[i].exact_length
                                             : os[j].length - os[i].length <= 1e-9))
      ++j;
    LengthEntry e;
    e.length = os[i].length;
    if (ls.orbits.exact) {
      e.exact_length = Rational(os[i].exact_length, ls.orbits.denominator);
      e.constant_exact = Rational(0);
    }
    std::map<std::vector<long>, LengthTerm> by_class;
    for (size_t k = i; k < j; ++k) {
      const auto& p = os[k];
      e.orbits.push_back(k);
      auto cls = canonical_sign(p.homology);
      auto& term = by_class[cls];
      term.cls = cls;
      term.orbit_count += 1;
      term.nu += p.primitive_length() * scattering_product(g.graph, p);
      if (ls.orbits.exact) {
        Rational lt(p.exact_length, ls.orbits.denominator * p.repetitions);
        Rational add = lt * scattering_product_exact(g.graph, p);
        term.nu_exact = term.nu_exact.value_or(Rational(0)) + add;
      }
    }
    for (auto& [cls, term] : by_class) {
      term.mu = class_flux(cls);
      if (term.mu < 1e-12) {
        term.mu = 0;
        e.constant += term.nu;
        if (e.constant_exact && term.nu_exact) *e.constant_exact += *term.nu_exact;
      }
      e.terms.push_back(term);
    }
    ls.entries.push_back(std::move(e));
    i = j;
  }
  return ls;
}

// ---------------------------------------------------------------- trace check

double default_trace_window(const MetricGraph& g, double L_max) {
  auto ls = length_spectrum(g, zero_form(g.graph), L_max);
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < ls.entries.size(); ++i)
    gap = std::min(gap, ls.entries[i].length - ls.entries[i - 1].length);
  if (!std::isfinite(gap)) return 0.02;
  return gap / 6;
}

TraceReport trace_check(const MetricGraph& g, const OneForm& alpha, const SpectrumSlice& slice,
                        double sigma, double L_max) {
  if (!(sigma > 0)) throw InputError("window width must be positive");
  double tail = std::exp(-0.5 * sigma * sigma * slice.k_max * slice.k_max);
  if (tail > 1e-8) {
    std::ostringstream os;
    os << "spectral truncation dominates: window " << sigma << " needs k_max >= "
       << std::ceil(std::sqrt(2 * std::log(1e8)) / sigma);
    throw NumericError(os.str());
  }
  const double l_hi = L_max + 0.5;
  const double l_lo = 8 * sigma;
  auto ls = length_spectrum(g, alpha, l_hi + 8 * sigma);
  const double norm = 1 / (std::sqrt(2 * kPi) * sigma);
  auto gauss = [&](double x) { return norm * std::exp(-0.5 * x * x / (sigma * sigma)); };

  std::vector<double> ls_len;
  for (auto& e : ls.entries) ls_len.push_back(e.length);
  const int nl = static_cast<int>(ls_len.size());
  const double step = sigma / 4;
  const int ns = static_cast<int>(std::floor((l_hi - l_lo) / step)) + 1;
  Eigen::MatrixXd A(ns, nl + 1);
  Eigen::VectorXd y(ns);
  const double total = g.total_length();
  for (int s = 0; s < ns; ++s) {
    double l = l_lo + s * step;
    double f = 0;
    for (size_t n = 0; n < slice.k.size(); ++n) {
      double k = slice.k[n];
      double w = std::exp(-0.5 * sigma * sigma * k * k);
      f += (k == 0 ? 1.0 : 2.0) * slice.mult[n] * std::cos(l * k) * w;
    }
    y(s) = f - 2 * total * gauss(l);
    A(s, 0) = 1.0;
    for (int j = 0; j < nl; ++j) A(s, j + 1) = gauss(l - ls_len[j]) + gauss(l + ls_len[j]);
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);

  TraceReport r;
  r.sigma = sigma;
  r.constant = c(0);
  r.euler_ve = g.vertex_count() - g.edge_count();
  r.euler_ve1 = r.euler_ve - 1;
  r.closer = std::abs(r.constant - r.euler_ve) <= std::abs(r.constant - r.euler_ve1) ? "V-E" : "V-E-1";
  for (int j = 0; j < nl; ++j) {
    if (ls_len[j] > L_max + 1e-9) break;
    TracePeak pk;
    pk.length = ls_len[j];
    pk.spectral = c(j + 1);
    pk.geometric = ls.entries[j].aggregate(1.0);
    double diff = std::abs(pk.spectral - pk.geometric);
    pk.relerr = std::abs(pk.geometric) >= 1e-6 ? diff / std::abs(pk.geometric) : diff;
    r.max_relerr = std::max(r.max_relerr, pk.relerr);
    r.peaks.push_back(pk);
  }
  return r;
}

// ---------------------------------------------------------------- oracles

double LengthOracle::length(const std::vector<long>& v) const {
  auto l = length_within(v, std::numeric_limits<double>::infinity());
  if (!l) throw InconclusiveError("length oracle could not resolve class");
  return *l;
}

MinimalLengthOracle::MinimalLengthOracle(const MetricGraph& g, double initial_cutoff) : g_(g) {
  if (!g.graph.connected()) throw InputError("length oracle needs a connected graph");
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.graph.degree(v) == 1) throw InputError("length oracle needs a leafless graph (leaf at vertex " +
                                                 std::to_string(v) + ")");
  rank_ = g.graph.betti_number();
  if (initial_cutoff <= 0) {
    HomologyBasis hb(g.graph);
    for (auto& c : hb.cycles()) {
      double l = 0;
      for (Bond b : c.bonds) l += g.bond_length(b);
      initial_cutoff = std::max(initial_cutoff, 1.5 * l);
    }
    if (initial_cutoff <= 0) initial_cutoff = 1;
  }
  table_ = build(initial_cutoff);
}

std::shared_ptr<const MinimalLengthOracle::Table> MinimalLengthOracle::build(double cutoff) const {
  OrbitOptions opts;
  opts.non_backtracking = true;
  auto os = enumerate_orbits(g_, cutoff, opts);
  std::map<std::vector<long>, double> best;
  for (auto& p : os.orbits) {
    // commutator walks close up in homology
    if (std::all_of(p.homology.begin(), p.homology.end(), [](long x) { return x == 0; })) continue;
    auto it = best.find(p.homology);
    if (it == best.end() || p.length < it->second) best[p.homology] = p.length;
  }
  auto t = std::make_shared<Table>();
  t->cutoff = cutoff;
  t->entries.assign(best.begin(), best.end());
  return t;
}

std::shared_ptr<const MinimalLengthOracle::Table> MinimalLengthOracle::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_;
}

std::shared_ptr<const MinimalLengthOracle::Table> MinimalLengthOracle::ensure(double cutoff) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (table_->cutoff >= cutoff) return table_;
  table_ = build(cutoff);
  return table_;
}

double MinimalLengthOracle::cutoff() const { return snapshot()->cutoff; }

std::optional<double> MinimalLengthOracle::length_within(const std::vector<long>& v, double bound) const {
  if (static_cast<int>(v.size()) != rank_) throw InputError("class has wrong dimension");
  if (std::all_of(v.begin(), v.end(), [](long x) { return x == 0; })) return 0.0;
  auto t = snapshot();
  while (true) {
    auto it = std::lower_bound(t->entries.begin(), t->entries.end(), v,
                               [](const auto& e, const std::vector<long>& key) { return e.first < key; });
    if (it != t->entries.end() && it->first == v) {
      if (it->second <= bound) return it->second;
      return std::nullopt;
    }
    if (t->cutoff >= bound) return std::nullopt;
    double next = std::min(bound, 2 * t->cutoff);
    t = ensure(next);
  }
}

std::vector<std::pair<std::vector<long>, double>> MinimalLengthOracle::classes_within(double bound) const {
  if (!std::isfinite(bound)) throw InputError("class listing needs a finite bound");
  auto t = snapshot();
  if (t->cutoff < bound) t = ensure(bound);
  std::vector<std::pair<std::vector<long>, double>> out;
  for (const auto& e : t->entries)
    if (e.second <= bound) out.push_back(e);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

std::unique_ptr<MinimalLengthOracle> minimal_length_oracle(const MetricGraph& g) {
  return std::make_unique<MinimalLengthOracle>(g);
}

}  // namespace qg
