#include "qgraph/bloch_inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec = std::vector<long>;
using ClassList = std::vector<std::pair<Vec, double>>;

Vec canonical(Vec v) {
  for (long x : v) {
    if (x > 0) break;
    if (x < 0) {
      for (long& y : v) y = -y;
      break;
    }
  }
  return v;
}

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
}

Vec add(const Vec& a, const Vec& b, long s = 1) {
  Vec r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
  return r;
}

Vec neg(Vec v) {
  for (long& x : v) x = -x;
  return v;
}

Eigen::MatrixXd as_matrix(const std::vector<Vec>& rows, int n) {
  Eigen::MatrixXd m(rows.size(), n);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(rows[i][j]);
  return m;
}

int int_rank(const std::vector<Vec>& rows, int n) {
  if (rows.empty()) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(as_matrix(rows, n));
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

long int_det(const std::vector<Vec>& rows, int n) {
  return std::lround(as_matrix(rows, n).determinant());
}

double fundamental_flux_max(const MetricGraph& g, const OneForm& alpha) {
  HomologyBasis hb(g.graph);
  double m = 0;
  for (auto& c : hb.cycles()) m = std::max(m, std::abs(flux(g, alpha, cycle_chain(g.graph, c))));
  return m;
}

// ---------------------------------------------------------------- lattices

// Row Hermite normal form of an integer matrix; returns the nonzero rows.
std::vector<std::vector<BigInt>> hermite_rows(std::vector<std::vector<BigInt>> a) {
  const size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    while (true) {
      size_t piv = rows;
      for (size_t i = r; i < rows; ++i)
        if (a[i][c] != 0 && (piv == rows || abs(a[i][c]) < abs(a[piv][c]))) piv = i;
      if (piv == rows) break;
      std::swap(a[piv], a[r]);
      bool done = true;
      for (size_t i = r + 1; i < rows; ++i) {
        if (a[i][c] == 0) continue;
        BigInt q = a[i][c] / a[r][c];
        for (size_t j = c; j < cols; ++j) a[i][j] -= q * a[r][j];
        if (a[i][c] != 0) done = false;
      }
      if (done) {
        ++r;
        break;
      }
    }
  }
  a.resize(r);
  return a;
}

std::vector<std::vector<Rational>> rational_inverse(std::vector<std::vector<Rational>> m) {
  const size_t n = m.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) throw NumericError("singular lattice basis");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rational d = m[c][c];
    for (size_t j = 0; j < n; ++j) {
      m[c][j] /= d;
      inv[c][j] /= d;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0) continue;
      Rational q = m[i][c];
      for (size_t j = 0; j < n; ++j) {
        m[i][j] -= q * m[c][j];
        inv[i][j] -= q * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace

// ---------------------------------------------------------------- relations

std::optional<std::vector<long>> integer_relation(const std::vector<double>& x, long bound, double tol,
                                                  double precision) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return std::nullopt;
  const long double W = 1.0L / (precision > 0 ? precision : tol);
  const int d = n + 1;
  std::vector<std::vector<long double>> b(n, std::vector<long double>(d, 0));
  for (int i = 0; i < n; ++i) {
    b[i][i] = 1;
    b[i][n] = W * x[i];
  }
  auto dot = [&](const std::vector<long double>& u, const std::vector<long double>& v) {
    long double s = 0;
    for (int k = 0; k < d; ++k) s += u[k] * v[k];
    return s;
  };
  // LLL with delta 0.99; Gram-Schmidt recomputed, dimensions are tiny
  std::vector<std::vector<long double>> bs(n);
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> B(n);
  auto gram_schmidt = [&]() {
    for (int i = 0; i < n; ++i) {
      bs[i] = b[i];
      for (int j = 0; j < i; ++j) {
        mu[i][j] = B[j] > 0 ? dot(b[i], bs[j]) / B[j] : 0;
        for (int k = 0; k < d; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
      }
      B[i] = dot(bs[i], bs[i]);
    }
  };
  gram_schmidt();
  int k = 1, guard = 0;
  while (k < n && ++guard < 100000) {
    for (int j = k - 1; j >= 0; --j) {
      long double q = std::round(mu[k][j]);
      if (q != 0) {
        for (int t = 0; t < d; ++t) b[k][t] -= q * b[j][t];
        mu[k][j] -= q;
        for (int i = 0; i < j; ++i) mu[k][i] -= q * mu[j][i];
      }
    }
    if (B[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt();
      k = std::max(k - 1, 1);
    }
  }
  // relations near the Gaussian-heuristic length of the lattice are noise
  long double xx = 0;
  for (double v : x) xx += static_cast<long double>(v) * v;
  const long double heuristic =
      std::sqrt(n / (2 * kPi * std::numbers::e)) * std::pow(std::sqrt(1 + W * W * xx), 1.0L / n);
  std::optional<std::vector<long>> best;
  long double best_norm = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<long> c(n);
    bool ok = true;
    long l1 = 0;
    for (int j = 0; j < n; ++j) {
      long double v = std::round(b[i][j]);
      if (std::abs(v) > bound) ok = false;
      c[j] = static_cast<long>(v);
      l1 += std::abs(c[j]);
    }
    if (!ok || l1 == 0) continue;
    long double r = 0;
    for (int j = 0; j < n; ++j) r += c[j] * static_cast<long double>(x[j]);
    if (std::abs(r) > tol * std::max<long double>(1, l1)) continue;
    long double nn = 0;
    for (long v : c) nn += static_cast<long double>(v) * v;
    if (std::sqrt(nn) > heuristic / 3) continue;
    // prefer relations that involve x_0
    bool better = !best || ((*best)[0] == 0 && c[0] != 0) || (((*best)[0] != 0) == (c[0] != 0) && nn < best_norm);
    if (better) {
      best = c;
      best_norm = nn;
    }
  }
  if (best && (*best)[0] < 0)
    for (long& v : *best) v = -v;
  return best;
}

// ---------------------------------------------------------------- sources

ExactBlochSource::ExactBlochSource(MetricGraph g, OneForm alpha, bool full_orbits)
    : g_(std::move(g)), alpha_(std::move(alpha)), full_(full_orbits) {
  if (!g_.graph.connected()) throw InputError("Bloch source needs a connected graph");
}

int ExactBlochSource::rank_hint() const { return g_.graph.betti_number(); }

std::vector<LengthCoefficients> ExactBlochSource::coefficients(double L) const {
  OrbitOptions o;
  o.non_backtracking = !full_;
  auto ls = length_spectrum(g_, alpha_, L, o);
  std::vector<LengthCoefficients> out;
  for (const auto& e : ls.entries) {
    LengthCoefficients lc;
    lc.length = e.length;
    lc.fit.constant = e.constant;
    for (const auto& t : e.terms) {
      if (t.mu < 1e-12) continue;
      auto it = std::find_if(lc.fit.terms.begin(), lc.fit.terms.end(),
                             [&](const CosineTerm& c) { return std::abs(c.mu - t.mu) <= 1e-12; });
      if (it != lc.fit.terms.end())
        it->nu += t.nu;
      else
        lc.fit.terms.push_back({t.mu, t.nu});
    }
    lc.fit.terms.erase(std::remove_if(lc.fit.terms.begin(), lc.fit.terms.end(),
                                      [&](const CosineTerm& c) { return std::abs(c.nu) <= 1e-12 * std::max(1.0, e.length); }),
                       lc.fit.terms.end());
    std::sort(lc.fit.terms.begin(), lc.fit.terms.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
    out.push_back(std::move(lc));
  }
  return out;
}

std::optional<std::vector<long>> ExactBlochSource::class_of(double mu, double L) const {
  OrbitOptions o;
  o.non_backtracking = !full_;
  auto ls = length_spectrum(g_, alpha_, L, o);
  for (const auto& e : ls.entries)
    for (const auto& t : e.terms)
      if (std::abs(t.mu - mu) <= 1e-9) return t.cls;
  return std::nullopt;
}

namespace {

double window_value(const SpectrumSlice& s, double l, double sigma) {
  double f = 0;
  for (size_t n = 0; n < s.k.size(); ++n) {
    double k = s.k[n];
    f += (k == 0 ? 1.0 : 2.0) * s.mult[n] * std::cos(l * k) * std::exp(-0.5 * sigma * sigma * k * k);
  }
  return f;
}

}  // namespace

NumericBlochSource::NumericBlochSource(MetricGraph g, OneForm alpha, NumericSourceOptions opts)
    : g_(std::move(g)), opts_(opts) {
  if (!g_.graph.connected()) throw InputError("Bloch source needs a connected graph");
  if (opts_.t_count < 8) throw InputError("need at least 8 sample times");
  if (!(opts_.sigma > 0)) throw InputError("window width must be positive");
  if (opts_.k_max <= 0) opts_.k_max = std::sqrt(2 * std::log(1e8)) / opts_.sigma + 10;
  if (opts_.t_max <= 0) {
    double m = fundamental_flux_max(g_, alpha);
    opts_.t_max = m > 0 ? 4 * kPi / m : 1.0;
  }
  for (int i = 0; i < opts_.t_count; ++i) {
    t_.push_back(opts_.t_max * i / opts_.t_count);
    slices_.push_back(eigenvalues(g_, scaled(alpha, t_.back()), opts_.k_max));
  }
  // 2L g(l) + constant near l = 0, before the first orbit; the constant
  // drops by one once k = 0 leaves the spectrum
  const double s = opts_.sigma;
  const double norm = 1 / (std::sqrt(2 * kPi) * s);
  const int ns = 33;
  Eigen::MatrixXd A(ns, 2);
  for (int i = 0; i < ns; ++i) {
    double l = 4 * s * i / (ns - 1);
    A(i, 0) = 1;
    A(i, 1) = 2 * norm * std::exp(-0.5 * l * l / (s * s));
  }
  auto qr = A.colPivHouseholderQr();
  for (int m = 0; m < opts_.t_count; ++m) {
    Eigen::VectorXd y(ns);
    for (int i = 0; i < ns; ++i) y(i) = window_value(slices_[m], 4 * s * i / (ns - 1), s);
    Eigen::VectorXd c = qr.solve(y);
    chis_.push_back(c(0));
    if (m == 0) total_ = c(1);
  }
  chi_ = chis_[0];
  rank_ = static_cast<int>(std::lround(-chi_));
  if (std::abs(chi_ + rank_) > 1e-3 || rank_ < 0) {
    std::ostringstream os;
    os << "constant term " << chi_ << " is not an integer; refine the spectra";
    throw NumericError(os.str());
  }
}

std::vector<LengthCoefficients> NumericBlochSource::coefficients(double L) const {
  const double s = opts_.sigma;
  const double norm = 1 / (std::sqrt(2 * kPi) * s);
  auto gauss = [&](double x) { return norm * std::exp(-0.5 * x * x / (s * s)); };
  const double lo = 8 * s, hi = L + 10 * s, step = s / 4;
  const int nl = static_cast<int>((hi - lo) / step) + 1;
  const int nt = static_cast<int>(t_.size());
  Eigen::VectorXd ls(nl);
  Eigen::MatrixXd R(nl, nt);
  for (int i = 0; i < nl; ++i) ls(i) = lo + i * step;
  for (int m = 0; m < nt; ++m)
    for (int i = 0; i < nl; ++i) R(i, m) = window_value(slices_[m], ls(i), s) - chis_[m] - 2 * total_ * gauss(ls(i));
  Eigen::VectorXd S = R.rowwise().squaredNorm();
  const double smax = S.maxCoeff();
  // peaks of the window energy, refined by a parabola through log S
  std::vector<double> centres;
  const double floor = std::pow(1e-6 * norm, 2) * nt;
  for (int i = 1; i + 1 < nl; ++i) {
    if (S(i) < S(i - 1) || S(i) <= S(i + 1) || S(i) < floor || S(i) < 1e-24 * smax) continue;
    double a = std::log(S(i - 1)), b = std::log(S(i)), c = std::log(S(i + 1));
    double den = a - 2 * b + c;
    double off = den < 0 ? 0.5 * (a - c) / den : 0;
    centres.push_back(ls(i) + off * step);
  }
  const int np = static_cast<int>(centres.size());
  Eigen::MatrixXd C;
  for (int iter = 0; iter < 12 && np > 0; ++iter) {
    Eigen::MatrixXd G(nl, np);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < np; ++j) G(i, j) = gauss(ls(i) - centres[j]);
    C = G.colPivHouseholderQr().solve(R);
    Eigen::MatrixXd E = R - G * C;
    double move = 0;
    for (int j = 0; j < np; ++j) {
      // d/dl_j of c g(l - l_j) is c g(l - l_j) (l - l_j) / s^2
      double num = 0, den = 0;
      for (int i = 0; i < nl; ++i) {
        double x = ls(i) - centres[j];
        if (std::abs(x) > 6 * s) continue;
        double dg = G(i, j) * x / (s * s);
        for (int m = 0; m < nt; ++m) {
          double J = C(j, m) * dg;
          num += J * E(i, m);
          den += J * J;
        }
      }
      if (den > 0) {
        double d = num / den;
        d = std::clamp(d, -s / 2, s / 2);
        centres[j] += d;
        move = std::max(move, std::abs(d));
      }
    }
    if (move < 1e-14) break;
  }
  std::vector<LengthCoefficients> out;
  FrequencyOptions fo;
  fo.rank_tol = 1e-7;
  fo.amplitude_tol = 1e-6;
  fo.residual_tol = 1e-5;
  for (int j = 0; j < np; ++j) {
    if (centres[j] > L) continue;
    std::vector<double> series(nt);
    for (int m = 0; m < nt; ++m) series[m] = C(j, m);
    LengthCoefficients lc;
    lc.length = centres[j];
    lc.fit = extract_frequencies(t_, series, std::min(8, nt / 4), fo);
    out.push_back(std::move(lc));
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.length < b.length; });
  return out;
}

// ---------------------------------------------------------------- recovered oracle

RecoveredOracle::RecoveredOracle(std::shared_ptr<const BlochSource> source, RecoveryOptions opts)
    : source_(std::move(source)), opts_(opts) {
  const double H = source_->total_length() * (1 + 1e-9) + 1e-9;
  absorb(source_->coefficients(H), true);
  table_.horizon = H;
  const int hint = source_->rank_hint();
  if (table_.rank > hint) {
    std::ostringstream os;
    os << "alpha not generic: " << table_.rank << " independent frequencies exceed rank bound " << hint;
    throw NumericError(os.str());
  }
  if (table_.rank < hint) {
    std::ostringstream os;
    os << "alpha not generic: only " << table_.rank << " independent frequencies for rank " << hint;
    throw NumericError(os.str());
  }
}

void RecoveredOracle::absorb(const std::vector<LengthCoefficients>& data, bool allow_rebase) const {
  const double ftol = source_->frequency_tolerance();
  for (const auto& lc : data) {
    if (lc.length <= table_.horizon) continue;
    for (const auto& term : lc.fit.terms) {
      if (term.mu <= ftol || std::abs(term.nu) <= opts_.amplitude_tol) continue;
      auto it = by_mu_.lower_bound(term.mu - ftol);
      if (it != by_mu_.end() && it->first <= term.mu + ftol) continue;
      if (term.nu <= 0) {
        std::ostringstream os;
        os << "frequency " << term.mu << " first appears with nonpositive amplitude at length " << lc.length;
        throw NumericError(os.str());
      }
      FrequencyEntry fe{term.mu, lc.length, term.nu, {}};
      const int n = table_.rank;
      if (auto c = sum_of_known(term.mu, ftol)) {
        fe.coords = *c;
        auto key = canonical(fe.coords);
        if (!lengths_.count(key)) lengths_[key] = fe.length;
        insert_entry(std::move(fe));
        continue;
      }
      std::vector<double> x{term.mu};
      x.insert(x.end(), table_.generators.begin(), table_.generators.end());
      auto rel = integer_relation(x, opts_.relation_bound, std::min(opts_.relation_tol, ftol), ftol);
      if (rel && (*rel)[0] == 1) {
        fe.coords.resize(n);
        for (int i = 0; i < n; ++i) fe.coords[i] = -(*rel)[i + 1];
      } else if (rel && (*rel)[0] > 1) {
        if (!allow_rebase) {
          std::ostringstream os;
          os << "frequency " << term.mu << " at length " << lc.length
             << " is not an integer combination of the generators";
          throw NumericError(os.str());
        }
        // enlarge the lattice: basis of span(e_i, q) with q = -c/c0
        const long c0 = (*rel)[0];
        std::vector<std::vector<BigInt>> M;
        for (int i = 0; i < n; ++i) {
          std::vector<BigInt> row(n, 0);
          row[i] = c0;
          M.push_back(row);
        }
        std::vector<BigInt> q(n);
        for (int i = 0; i < n; ++i) q[i] = -(*rel)[i + 1];
        M.push_back(q);
        auto H = hermite_rows(M);
        if (static_cast<int>(H.size()) != n) throw NumericError("lattice rebase failed");
        std::vector<std::vector<Rational>> Bm(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) Bm[i][j] = Rational(H[i][j], BigInt(c0));
        auto Binv = rational_inverse(Bm);
        auto convert = [&](const std::vector<Rational>& old) {
          Vec y(n);
          for (int j = 0; j < n; ++j) {
            Rational s = 0;
            for (int i = 0; i < n; ++i) s += old[i] * Binv[i][j];
            if (boost::multiprecision::denominator(s) != 1) throw NumericError("lattice rebase is not integral");
            y[j] = static_cast<long>(boost::multiprecision::numerator(s));
          }
          return y;
        };
        std::vector<double> gen(n, 0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) gen[i] += static_cast<double>(Bm[i][j]) * table_.generators[j];
        table_.generators = gen;
        lengths_.clear();
        for (auto& e : table_.entries) {
          std::vector<Rational> old(e.coords.begin(), e.coords.end());
          e.coords = convert(old);
          lengths_[canonical(e.coords)] = e.length;
        }
        std::vector<Rational> qq(n);
        for (int i = 0; i < n; ++i) qq[i] = Rational(q[i], BigInt(c0));
        fe.coords = convert(qq);
      } else {
        table_.generators.push_back(term.mu);
        table_.rank = n + 1;
        for (auto& e : table_.entries) e.coords.push_back(0);
        std::map<Vec, double> grown;
        for (auto& [k, v] : lengths_) {
          Vec kk(k);
          kk.push_back(0);
          grown[kk] = v;
        }
        lengths_ = std::move(grown);
        fe.coords.assign(n + 1, 0);
        fe.coords[n] = 1;
        if (!allow_rebase) {
          std::ostringstream os;
          os << "frequency " << term.mu << " at length " << lc.length << " is independent of the generators";
          throw NumericError(os.str());
        }
      }
      auto key = canonical(fe.coords);
      if (!lengths_.count(key)) lengths_[key] = fe.length;
      insert_entry(std::move(fe));
    }
  }
}

void RecoveredOracle::insert_entry(FrequencyEntry fe) const {
  by_mu_.insert({fe.mu, table_.entries.size()});
  table_.entries.push_back(std::move(fe));
}

std::optional<std::vector<long>> RecoveredOracle::sum_of_known(double mu, double tol) const {
  auto near = [&](double x) -> const FrequencyEntry* {
    auto it = by_mu_.lower_bound(x - tol);
    if (it != by_mu_.end() && it->first <= x + tol) return &table_.entries[it->second];
    return nullptr;
  };
  for (const auto& e : table_.entries) {
    if (e.mu >= mu) continue;
    if (auto* f = near(mu - e.mu)) return add(e.coords, f->coords);
    if (auto* f = near(mu + e.mu)) return add(f->coords, e.coords, -1);
  }
  return std::nullopt;
}

void RecoveredOracle::extend(double L) const {
  if (L <= table_.horizon) return;
  if (L > opts_.max_horizon_factor * source_->total_length()) {
    std::ostringstream os;
    os << "length query beyond " << opts_.max_horizon_factor << " times the total length";
    throw InconclusiveError(os.str());
  }
  absorb(source_->coefficients(L), false);
  table_.horizon = L;
}

int RecoveredOracle::rank() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_.rank;
}

FrequencyTable RecoveredOracle::table() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_;
}

std::optional<double> RecoveredOracle::length_within(const std::vector<long>& v, double bound) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (static_cast<int>(v.size()) != table_.rank) throw InputError("class has wrong dimension");
  if (is_zero(v)) return 0.0;
  const Vec key = canonical(v);
  while (true) {
    auto it = lengths_.find(key);
    if (it != lengths_.end()) {
      if (it->second <= bound) return it->second;
      return std::nullopt;
    }
    if (table_.horizon >= bound) return std::nullopt;
    double next = std::isfinite(bound) ? std::max(bound, table_.horizon * 1.25) : 2 * table_.horizon;
    extend(next);
  }
}

std::vector<std::pair<std::vector<long>, double>> RecoveredOracle::classes_within(double bound) const {
  if (!std::isfinite(bound)) throw InputError("class listing needs a finite bound");
  std::lock_guard<std::mutex> lock(mu_);
  extend(bound);
  ClassList out;
  for (const auto& [k, l] : lengths_) {
    if (l > bound) continue;
    out.push_back({k, l});
    out.push_back({neg(k), l});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return out;
}

std::shared_ptr<RecoveredOracle> recover_homology_lengths(std::shared_ptr<const BlochSource> source,
                                                          const RecoveryOptions& opts) {
  return std::make_shared<RecoveredOracle>(std::move(source), opts);
}

// ---------------------------------------------------------------- cycles

namespace {

// Classes with l below lmu among cands decide whether mu splits.
bool splits(const Vec& mu, double lmu, const ClassList& cands, const LengthOracle& oracle, double tol,
            Vec* part = nullptr) {
  for (const auto& [k, lk] : cands) {
    if (lk >= lmu - tol) break;
    Vec rest = add(mu, k, -1);
    if (is_zero(rest)) continue;
    if (oracle.length_within(rest, lmu - lk + tol)) {
      if (part) *part = k;
      return true;
    }
  }
  return false;
}

struct CycleCatalogue {
  ClassList cycles;  // canonical sign, ascending length
};

CycleCatalogue cycle_catalogue(const LengthOracle& oracle, double H, double tol) {
  CycleCatalogue cat;
  auto cands = oracle.classes_within(H);
  if (cands.size() > 200000) throw InconclusiveError("lattice search exceeded 1e5 classes");
  for (const auto& [v, l] : cands) {
    if (canonical(v) != v) continue;
    if (!splits(v, l, cands, oracle, tol)) cat.cycles.push_back({v, l});
  }
  return cat;
}

double unit_length_max(const LengthOracle& oracle) {
  double m = 0;
  const int n = oracle.rank();
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0);
    e[i] = 1;
    m = std::max(m, oracle.length(e));
  }
  return m;
}

}  // namespace

bool is_cycle_class(const std::vector<long>& mu, const LengthOracle& oracle, double tol) {
  if (is_zero(mu)) return false;
  double l = oracle.length(mu);
  auto cands = oracle.classes_within(l);
  return !splits(mu, l, cands, oracle, tol);
}

std::vector<std::vector<long>> cycle_generator_basis(const LengthOracle& oracle) {
  const int n = oracle.rank();
  if (n == 0) return {};
  double H = 3 * unit_length_max(oracle);
  for (int round = 0; round < 6; ++round, H *= 2) {
    auto cat = cycle_catalogue(oracle, H, 1e-9);
    std::vector<Vec> basis;
    std::vector<size_t> used;
    for (size_t i = 0; i < cat.cycles.size() && static_cast<int>(basis.size()) < n; ++i) {
      basis.push_back(cat.cycles[i].first);
      if (int_rank(basis, n) < static_cast<int>(basis.size()))
        basis.pop_back();
      else
        used.push_back(i);
    }
    if (static_cast<int>(basis.size()) < n) continue;
    long d = std::abs(int_det(basis, n));
    bool improved = true;
    while (d != 1 && improved) {
      improved = false;
      for (size_t c = 0; c < cat.cycles.size() && !improved; ++c) {
        if (std::find(used.begin(), used.end(), c) != used.end()) continue;
        for (int i = 0; i < n && !improved; ++i) {
          auto trial = basis;
          trial[i] = cat.cycles[c].first;
          long d2 = std::abs(int_det(trial, n));
          if (d2 != 0 && d2 < d) {
            basis = trial;
            used[i] = c;
            d = d2;
            improved = true;
          }
        }
      }
    }
    if (d == 1) return basis;
  }
  throw NumericError("no unimodular basis of cycle classes found");
}

AlbaneseResult recover_albanese(const LengthOracle& oracle) {
  AlbaneseResult r;
  r.basis = cycle_generator_basis(oracle);
  const int n = static_cast<int>(r.basis.size());
  r.gram = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    r.gram(i, i) = oracle.length(r.basis[i]);
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (oracle.length(add(r.basis[i], r.basis[j])) - oracle.length(add(r.basis[i], r.basis[j], -1)));
      r.gram(i, j) = r.gram(j, i) = v;
    }
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.gram);
    if (es.eigenvalues()(0) <= 1e-12 * es.eigenvalues()(n - 1)) throw NumericError("oracle inconsistent");
  }
  return r;
}

Complexity complexity_equilateral(const Eigen::MatrixXd& gram) {
  Complexity c;
  c.det = gram.size() ? gram.determinant() : 1.0;
  c.root = std::sqrt(std::max(0.0, c.det));
  return c;
}

bool lattice_isometric(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows()) return false;
  const int n = static_cast<int>(a.rows());
  if (n == 0) return true;
  double da = a.determinant(), db = b.determinant();
  if (std::abs(da - db) > tol * std::max(1.0, std::abs(da))) return false;
  const double R = 2 * std::max(a.diagonal().maxCoeff(), b.diagonal().maxCoeff());
  auto norms = [&](const Eigen::MatrixXd& g) {
    Eigen::MatrixXd inv = g.inverse();
    std::vector<long> box(n);
    long total = 1;
    for (int i = 0; i < n; ++i) {
      box[i] = static_cast<long>(std::floor(std::sqrt(R * inv(i, i)) + 1e-9));
      total *= 2 * box[i] + 1;
      if (total > 5'000'000) throw InconclusiveError("lattice comparison box too large");
    }
    std::vector<double> out;
    Eigen::VectorXd v(n);
    std::vector<long> c(n);
    for (int i = 0; i < n; ++i) c[i] = -box[i];
    while (true) {
      for (int i = 0; i < n; ++i) v(i) = static_cast<double>(c[i]);
      double q = v.dot(g * v);
      if (q <= R + tol && q > tol) out.push_back(q);
      int i = 0;
      while (i < n && c[i] == box[i]) {
        c[i] = -box[i];
        ++i;
      }
      if (i == n) break;
      ++c[i];
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto x = norms(a), y = norms(b);
  // vectors near the radius may fall on either side; compare strictly inside
  auto trim = [&](std::vector<double>& v) {
    v.erase(std::remove_if(v.begin(), v.end(), [&](double q) { return q > R - 1e-6; }), v.end());
  };
  trim(x);
  trim(y);
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol * std::max(1.0, x[i])) return false;
  return true;
}

// ---------------------------------------------------------------- blocks

int BlockStructure::node_of_block(int b) const {
  for (size_t v = 0; v < blocks_at.size(); ++v)
    if (std::find(blocks_at[v].begin(), blocks_at[v].end(), b) != blocks_at[v].end()) return static_cast<int>(v);
  return -1;
}

namespace {

struct WEdge {
  int a, b;
  double w;
};

// Contract edges shorter than tol, drop empty leaves, suppress empty
// degree-2 nodes.
BlockStructure canonical_structure(int nodes, std::vector<WEdge> edges, std::vector<std::vector<int>> blocks_at,
                                   std::vector<int> ranks, double tol) {
  std::vector<int> uf(nodes);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
  for (auto& e : edges)
    if (e.w <= tol) uf[find(e.a)] = find(e.b);
  std::map<int, int> id;
  for (int v = 0; v < nodes; ++v)
    if (!id.count(find(v))) id[find(v)] = static_cast<int>(id.size());
  const int m = static_cast<int>(id.size());
  std::vector<std::vector<int>> at(m);
  for (int v = 0; v < nodes; ++v)
    for (int b : blocks_at[v]) at[id[find(v)]].push_back(b);
  std::vector<std::map<int, double>> adj(m);
  for (auto& e : edges) {
    if (e.w <= tol) continue;
    int a = id[find(e.a)], b = id[find(e.b)];
    if (a == b) continue;
    adj[a][b] = e.w;
    adj[b][a] = e.w;
  }
  std::vector<bool> alive(m, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < m; ++v) {
      if (!alive[v] || !at[v].empty()) continue;
      if (adj[v].size() <= 1) {
        for (auto& [w, _] : adj[v]) adj[w].erase(v);
        adj[v].clear();
        alive[v] = false;
        changed = true;
      } else if (adj[v].size() == 2) {
        auto it = adj[v].begin();
        auto [x, wx] = *it++;
        auto [y, wy] = *it;
        adj[x].erase(v);
        adj[y].erase(v);
        adj[x][y] = wx + wy;
        adj[y][x] = wx + wy;
        adj[v].clear();
        alive[v] = false;
        changed = true;
      }
    }
  }
  BlockStructure s;
  std::vector<int> nid(m, -1);
  int k = 0;
  for (int v = 0; v < m; ++v)
    if (alive[v]) nid[v] = k++;
  s.tree = Graph(k);
  s.blocks_at.resize(k);
  for (int v = 0; v < m; ++v) {
    if (!alive[v]) continue;
    s.blocks_at[nid[v]] = at[v];
    std::sort(s.blocks_at[nid[v]].begin(), s.blocks_at[nid[v]].end());
    for (auto& [w, len] : adj[v])
      if (v < w) {
        s.tree.add_edge(nid[v], nid[w]);
        s.lengths.push_back(len);
      }
  }
  s.block_rank = std::move(ranks);
  return s;
}

std::vector<std::vector<double>> node_distances(const BlockStructure& s) {
  const int n = s.tree.vertex_count();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, -1));
  for (int src = 0; src < n; ++src) {
    std::vector<int> stack{src};
    d[src][src] = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (Bond b : s.tree.out_bonds(v)) {
        int w = s.tree.terminus(b);
        if (d[src][w] >= 0) continue;
        d[src][w] = d[src][v] + s.lengths[edge_of(b)];
        stack.push_back(w);
      }
    }
  }
  return d;
}

}  // namespace

BlockStructure block_structure(const MetricGraph& g) {
  const Graph& G = g.graph;
  auto bt = block_decomposition(G);
  const int nb = static_cast<int>(bt.blocks.size());
  std::vector<std::vector<int>> blocks_of_vertex(G.vertex_count());
  std::vector<int> ranks;
  for (int b = 0; b < nb; ++b) {
    std::set<int> verts;
    for (int e : bt.blocks[b]) {
      verts.insert(G.edge(e).a);
      verts.insert(G.edge(e).b);
    }
    for (int v : verts) blocks_of_vertex[v].push_back(b);
    ranks.push_back(static_cast<int>(bt.blocks[b].size()) - static_cast<int>(verts.size()) + 1);
  }
  int nodes = nb;
  std::vector<int> node_of_vertex(G.vertex_count());
  std::vector<WEdge> edges;
  for (int v = 0; v < G.vertex_count(); ++v) {
    auto& bs = blocks_of_vertex[v];
    if (bs.empty()) {
      node_of_vertex[v] = nodes++;
      continue;
    }
    node_of_vertex[v] = bs[0];
    for (size_t i = 1; i < bs.size(); ++i) edges.push_back({bs[0], bs[i], 0.0});
  }
  for (int e : bt.bridges)
    edges.push_back({node_of_vertex[G.edge(e).a], node_of_vertex[G.edge(e).b], g.length[e]});
  std::vector<std::vector<int>> at(nodes);
  for (int b = 0; b < nb; ++b) at[b] = {b};
  return canonical_structure(nodes, edges, at, ranks, 1e-12);
}

bool equivalent(const BlockStructure& x, const BlockStructure& y, const std::vector<int>& map, double tol) {
  const int nb = x.block_count();
  if (nb != y.block_count() || static_cast<int>(map.size()) != nb) return false;
  std::vector<bool> hit(nb, false);
  for (int b = 0; b < nb; ++b) {
    if (map[b] < 0 || map[b] >= nb || hit[map[b]]) return false;
    hit[map[b]] = true;
    if (x.block_rank[b] != y.block_rank[map[b]]) return false;
  }
  if (x.tree.vertex_count() != y.tree.vertex_count() || x.tree.edge_count() != y.tree.edge_count()) return false;
  std::vector<int> dx, dy;
  for (int v = 0; v < x.tree.vertex_count(); ++v) dx.push_back(x.tree.degree(v));
  for (int v = 0; v < y.tree.vertex_count(); ++v) dy.push_back(y.tree.degree(v));
  std::sort(dx.begin(), dx.end());
  std::sort(dy.begin(), dy.end());
  if (dx != dy) return false;
  auto Dx = node_distances(x), Dy = node_distances(y);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      double u = Dx[x.node_of_block(a)][x.node_of_block(b)];
      double v = Dy[y.node_of_block(map[a])][y.node_of_block(map[b])];
      if (std::abs(u - v) > tol) return false;
    }
  return true;
}

namespace {

std::vector<int> share_groups(const std::vector<Vec>& basis, const LengthOracle& oracle, double tol) {
  const int n = static_cast<int>(basis.size());
  std::vector<double> l(n);
  for (int i = 0; i < n; ++i) l[i] = oracle.length(basis[i]);
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = l[i] + l[j] - tol;
      if (oracle.length_within(add(basis[i], basis[j]), s) || oracle.length_within(add(basis[i], basis[j], -1), s))
        uf[find(i)] = find(j);
    }
  std::map<int, int> id;
  std::vector<int> g(n);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (!id.count(r)) id[r] = static_cast<int>(id.size());
    g[i] = id[r];
  }
  return g;
}

}  // namespace

BlockRecovery recover_blocks(const LengthOracle& oracle) {
  const double tol = 1e-9;
  BlockRecovery r;
  r.basis = cycle_generator_basis(oracle);
  const int n = static_cast<int>(r.basis.size());
  r.block_of_generator = share_groups(r.basis, oracle, tol);
  const int nb = n ? *std::max_element(r.block_of_generator.begin(), r.block_of_generator.end()) + 1 : 0;
  std::vector<int> ranks(nb, 0);
  for (int g : r.block_of_generator) ++ranks[g];
  std::vector<double> l(n);
  for (int i = 0; i < n; ++i) l[i] = oracle.length(r.basis[i]);
  r.distance.assign(nb, std::vector<double>(nb, 0));
  for (int a = 0; a < nb; ++a)
    for (int b = a + 1; b < nb; ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (r.block_of_generator[i] != a || r.block_of_generator[j] != b) continue;
          best = std::min(best, 0.5 * (oracle.length(add(r.basis[i], r.basis[j])) - l[i] - l[j]));
        }
      r.distance[a][b] = r.distance[b][a] = std::max(0.0, best);
    }
  // distances with every inner block contracted to a point
  auto& d = r.distance;
  std::vector<std::vector<double>> D(d);
  for (int a = 0; a < nb; ++a)
    for (int b = a + 1; b < nb; ++b) {
      double s = d[a][b];
      for (int c = 0; c < nb; ++c) {
        if (c == a || c == b) continue;
        double excess = d[a][b] - d[a][c] - d[c][b];
        if (excess > 1e-9) s -= excess;
      }
      D[a][b] = D[b][a] = s;
    }
  std::vector<WEdge> edges;
  int nodes = nb;
  if (nb >= 2) {
    MetricTree t;
    try {
      t = tree_from_leaf_distances(D, 1e-8);
    } catch (const InputError& e) {
      throw NumericError(std::string("block distances are not realisable: ") + e.what());
    }
    nodes = t.tree.vertex_count();
    for (int e = 0; e < t.tree.edge_count(); ++e)
      edges.push_back({t.tree.edge(e).a, t.tree.edge(e).b, t.lengths[e]});
  }
  std::vector<std::vector<int>> at(nodes);
  for (int b = 0; b < nb; ++b) at[b] = {b};
  r.structure = canonical_structure(nodes, edges, at, ranks, 1e-8);
  return r;
}

// ---------------------------------------------------------------- planarity

namespace {

struct Planarity {
  const LengthOracle& oracle;
  const PlanarityOptions& opts;
  double tol = 1e-9;
  int n = 0;
  ClassList cands;
  ClassList all;  // classes up to the total length, for cycle checks
  std::map<std::pair<int, int>, int> rel_memo;
  long nodes = 0;
  std::optional<PlanarBasis> best;

  Planarity(const LengthOracle& o, const PlanarityOptions& p) : oracle(o), opts(p) {}

  // 1: shared edges in the same direction, 2: in opposite directions.
  int overlap_kind(const Vec& a, double la, const Vec& b, double lb) const {
    int k = 0;
    double s = la + lb - tol;
    if (oracle.length_within(add(a, b, -1), s)) k |= 1;
    if (oracle.length_within(add(a, b), s)) k |= 2;
    return k;
  }

  int rel(int i, int j) {
    auto key = std::minmax(i, j);
    auto it = rel_memo.find(key);
    if (it != rel_memo.end()) return it->second;
    int k = overlap_kind(cands[i].first, cands[i].second, cands[j].first, cands[j].second);
    rel_memo[key] = k;
    return k;
  }

  // Signs making every overlap negative; empty when impossible.
  std::optional<std::vector<int>> signs(const std::vector<int>& chosen) {
    const int m = static_cast<int>(chosen.size());
    std::vector<int> s(m, 0);
    for (int r = 0; r < m; ++r) {
      if (s[r]) continue;
      s[r] = 1;
      std::vector<int> stack{r};
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w = 0; w < m; ++w) {
          if (w == u) continue;
          int k = rel(chosen[u], chosen[w]);
          if (k == 0) continue;
          if (k == 3) return std::nullopt;
          int want = k == 1 ? -s[u] : s[u];
          if (s[w] == 0) {
            s[w] = want;
            stack.push_back(w);
          } else if (s[w] != want) {
            return std::nullopt;
          }
        }
      }
    }
    return s;
  }

  bool outer_ok(std::vector<Vec>& oriented) {
    Vec outer(n, 0);
    for (auto& c : oriented) outer = add(outer, c, -1);
    auto lo = oracle.length_within(outer, oracle.total_length() + tol);
    if (!lo) return false;
    auto cl = all;
    if (splits(outer, *lo, cl, oracle, tol)) return false;
    for (auto& c : oriented)
      if (overlap_kind(outer, *lo, c, oracle.length(c)) & 1) return false;
    return true;
  }

  void accept(const std::vector<int>& chosen, const std::vector<int>& s, double total) {
    std::vector<Vec> oriented;
    for (size_t i = 0; i < chosen.size(); ++i)
      oriented.push_back(s[i] > 0 ? cands[chosen[i]].first : neg(cands[chosen[i]].first));
    if (opts.require_outer_face) {
      // each connected group of overlaps may be flipped as a whole
      const int m = static_cast<int>(chosen.size());
      std::vector<int> comp(m, -1);
      int nc = 0;
      for (int r = 0; r < m; ++r) {
        if (comp[r] >= 0) continue;
        std::vector<int> stack{r};
        comp[r] = nc;
        while (!stack.empty()) {
          int u = stack.back();
          stack.pop_back();
          for (int w = 0; w < m; ++w)
            if (comp[w] < 0 && rel(chosen[u], chosen[w]) != 0) {
              comp[w] = nc;
              stack.push_back(w);
            }
        }
        ++nc;
      }
      bool found = false;
      for (long mask = 0; mask < (1L << (nc - 1)) && !found; ++mask) {
        auto trial = oriented;
        for (int i = 0; i < m; ++i)
          if (comp[i] > 0 && ((mask >> (comp[i] - 1)) & 1)) trial[i] = neg(trial[i]);
        if (outer_ok(trial)) {
          oriented = trial;
          found = true;
        }
      }
      if (!found) return;
    }
    best = PlanarBasis{oriented, total};
  }

  void search(std::vector<int>& chosen, size_t from, double total) {
    if (++nodes > opts.max_nodes) throw InconclusiveError("planarity search exceeded its node budget");
    const int depth = static_cast<int>(chosen.size());
    if (depth == n) {
      std::vector<Vec> rows;
      for (int c : chosen) rows.push_back(cands[c].first);
      if (std::abs(int_det(rows, n)) != 1) return;
      auto s = signs(chosen);
      if (s) accept(chosen, *s, total);
      return;
    }
    for (size_t i = from; i < cands.size(); ++i) {
      // the remaining picks are at least as long as this one
      if (best && total + (n - depth) * cands[i].second >= best->total - tol) break;
      chosen.push_back(static_cast<int>(i));
      std::vector<Vec> rows;
      for (int c : chosen) rows.push_back(cands[c].first);
      bool ok = int_rank(rows, n) == depth + 1;
      if (ok)
        for (int c : chosen)
          if (c != static_cast<int>(i) && rel(c, static_cast<int>(i)) == 3) ok = false;
      if (ok) ok = signs(chosen).has_value();
      if (ok) search(chosen, i + 1, total + cands[i].second);
      chosen.pop_back();
    }
  }
};

}  // namespace

std::optional<PlanarBasis> recover_planarity(const LengthOracle& oracle, const PlanarityOptions& opts) {
  Planarity p(oracle, opts);
  p.n = oracle.rank();
  if (p.n == 0) return PlanarBasis{};
  const double H = oracle.total_length() + p.tol;
  p.all = oracle.classes_within(H);
  for (const auto& [v, l] : p.all) {
    if (canonical(v) != v) continue;
    if (!splits(v, l, p.all, oracle, p.tol)) p.cands.push_back({v, l});
  }
  std::vector<int> chosen;
  p.search(chosen, 0, 0.0);
  return p.best;
}

int count_shared_edges(const std::vector<long>& a, const std::vector<long>& b, const LengthOracle& oracle) {
  const double tol = 1e-9;
  double la = oracle.length(a), lb = oracle.length(b);
  Vec sum = add(a, b);
  if (is_zero(sum) || !oracle.length_within(sum, la + lb - tol)) return 0;
  std::vector<std::pair<Vec, double>> parts;
  std::function<void(const Vec&)> split = [&](const Vec& mu) {
    double l = oracle.length(mu);
    auto cands = oracle.classes_within(l);
    Vec k;
    if (splits(mu, l, cands, oracle, tol, &k)) {
      split(k);
      split(add(mu, k, -1));
    } else {
      parts.push_back({mu, l});
    }
  };
  split(sum);
  int touches = 0;
  for (size_t i = 0; i < parts.size(); ++i)
    for (size_t j = i + 1; j < parts.size(); ++j) {
      double s = parts[i].second + parts[j].second;
      auto l = oracle.length_within(add(parts[i].first, parts[j].first), s + tol);
      if (l && std::abs(*l - s) <= tol) ++touches;
    }
  return static_cast<int>(parts.size()) - touches;
}

RecoveredDual recover_dual(const LengthOracle& oracle) {
  auto basis = cycle_generator_basis(oracle);
  auto groups = share_groups(basis, oracle, 1e-9);
  if (std::any_of(groups.begin(), groups.end(), [](int g) { return g != 0; }))
    throw InputError("graph is not 2-connected; recover its blocks separately");
  PlanarityOptions po;
  po.require_outer_face = true;
  auto planar = recover_planarity(oracle, po);
  if (!planar) throw InputError("graph is not planar; it has no dual");
  RecoveredDual d;
  const int n = oracle.rank();
  d.faces = planar->cycles;
  Vec outer(n, 0);
  for (auto& f : d.faces) outer = add(outer, f, -1);
  d.faces.push_back(outer);
  d.outer = n;
  d.graph = Graph(n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int k = count_shared_edges(d.faces[i], d.faces[j], oracle);
      for (int t = 0; t < k; ++t) d.graph.add_edge(i, j);
    }
  return d;
}

bool three_connected(const Graph& g) {
  const int V = g.vertex_count();
  if (V < 2) return true;
  // unit capacities on vertices (split in/out) and on every edge
  auto paths = [&](int s, int t) {
    const int N = 2 * V;
    std::vector<std::map<int, int>> cap(N);
    for (int v = 0; v < V; ++v) cap[2 * v][2 * v + 1] = (v == s || v == t) ? 1000 : 1;
    for (int e = 0; e < g.edge_count(); ++e) {
      int a = g.edge(e).a, b = g.edge(e).b;
      if (a == b) continue;
      cap[2 * a + 1][2 * b] += 1;
      cap[2 * b + 1][2 * a] += 1;
    }
    int flow = 0;
    while (flow < 3) {
      std::vector<int> par(N, -1);
      std::queue<int> q;
      q.push(2 * s + 1);
      par[2 * s + 1] = 2 * s + 1;
      while (!q.empty() && par[2 * t] < 0) {
        int u = q.front();
        q.pop();
        for (auto& [w, c] : cap[u])
          if (c > 0 && par[w] < 0) {
            par[w] = u;
            q.push(w);
          }
      }
      if (par[2 * t] < 0) break;
      for (int v = 2 * t; v != 2 * s + 1; v = par[v]) {
        cap[par[v]][v] -= 1;
        cap[v][par[v]] += 1;
      }
      ++flow;
    }
    return flow;
  };
  for (int s = 0; s < V; ++s)
    for (int t = s + 1; t < V; ++t)
      if (paths(s, t) < 3) return false;
  return true;
}

MetricGraph recover_quantum_graph(const LengthOracle& oracle) {
  auto dual = recover_dual(oracle);
  auto basis = nonpositive_basis_search(dual.graph);
  if (!basis) throw NumericError("recovered dual is not planar");
  auto gd = geometric_dual(dual.graph, *basis);
  if (!three_connected(gd.graph))
    throw InputError("reconstructed graph is not 3-connected; its dual is not unique");
  std::vector<double> len(gd.graph.edge_count());
  for (int e = 0; e < gd.graph.edge_count(); ++e) {
    const Edge& de = dual.graph.edge(gd.primal_edge[e]);
    const Vec& fa = dual.faces[de.a];
    const Vec& fb = dual.faces[de.b];
    len[e] = 0.5 * (oracle.length(fa) + oracle.length(fb) - oracle.length(add(fa, fb)));
    if (!(len[e] > 0)) {
      std::ostringstream os;
      os << "edge " << e << " gets nonpositive length " << len[e];
      throw NumericError(os.str());
    }
  }
  return MetricGraph(gd.graph, len);
}

bool metric_isomorphic(const MetricGraph& a, const MetricGraph& b, double tol) {
  const int V = a.vertex_count();
  if (V != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  auto table = [](const MetricGraph& g) {
    std::map<std::pair<int, int>, std::vector<double>> t;
    for (int e = 0; e < g.edge_count(); ++e) {
      auto k = std::minmax(g.graph.edge(e).a, g.graph.edge(e).b);
      t[{k.first, k.second}].push_back(g.length[e]);
    }
    for (auto& [_, v] : t) std::sort(v.begin(), v.end());
    return t;
  };
  auto ta = table(a), tb = table(b);
  auto same = [&](int u, int w, int fu, int fw) {
    auto ka = std::minmax(u, w), kb = std::minmax(fu, fw);
    auto ia = ta.find({ka.first, ka.second});
    auto ib = tb.find({kb.first, kb.second});
    bool ea = ia == ta.end(), eb = ib == tb.end();
    if (ea || eb) return ea == eb;
    if (ia->second.size() != ib->second.size()) return false;
    for (size_t i = 0; i < ia->second.size(); ++i)
      if (std::abs(ia->second[i] - ib->second[i]) > tol) return false;
    return true;
  };
  std::vector<int> f(V, -1);
  std::vector<bool> used(V, false);
  std::function<bool(int)> go = [&](int u) {
    if (u == V) return true;
    for (int c = 0; c < V; ++c) {
      if (used[c] || a.graph.degree(u) != b.graph.degree(c)) continue;
      if (!same(u, u, c, c)) continue;
      bool ok = true;
      for (int w = 0; w < u && ok; ++w) ok = same(u, w, c, f[w]);
      if (!ok) continue;
      f[u] = c;
      used[c] = true;
      if (go(u + 1)) return true;
      used[c] = false;
    }
    f[u] = -1;
    return false;
  };
  return go(0);
}

}  // namespace qg
