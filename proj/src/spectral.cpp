#include "qgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/tools/toms748_solve.hpp>
#include <sstream>

#include "qgraph/parallel.hpp"

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;

// Everything needed to evaluate S(k) quickly for one (g, alpha).
struct Secular {
  const MetricGraph& g;
  Eigen::MatrixXd T;
  Eigen::VectorXd len;    // per bond
  Eigen::VectorXd phase;  // -2 pi integral_b alpha
  double total;
  double r0 = 0;          // sum of eigenphase fractions at k = 0

  Secular(const MetricGraph& mg, const OneForm& alpha) : g(mg), T(vertex_scattering(mg.graph)) {
    const int B = mg.graph.bond_count();
    len.resize(B);
    phase.resize(B);
    for (Bond b = 0; b < B; ++b) {
      len(b) = mg.bond_length(b);
      phase(b) = -2 * kPi * integrate(mg, alpha, b);
    }
    total = mg.total_length();
  }

  Eigen::MatrixXcd S(cplx k) const {
    const int B = static_cast<int>(len.size());
    Eigen::MatrixXcd s(B, B);
    for (int b = 0; b < B; ++b) {
      cplx d = std::exp(cplx(0, 1) * (k * len(b) + phase(b)));
      s.row(b) = d * T.row(b).cast<cplx>();
    }
    return s;
  }

  Eigen::VectorXcd eigs(cplx k) const {
    if (len.size() == 0) return {};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(S(k), false);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalue solver failed");
    return es.eigenvalues();
  }

  // Sum of eigenphases / 2 pi, each in [0, 1). Phases within snap of a
  // full turn are treated as 0.
  double phase_sum(double k, double snap) const {
    double s = 0;
    for (const cplx& z : eigs(k)) {
      double r = std::arg(z) / (2 * kPi);
      if (r < 0) r += 1;
      if (r >= 1 - snap) r = 0;
      s += r;
    }
    return s;
  }

  // Sum of the m signed eigenphases nearest a full turn; zero where a
  // cluster of m eigenvalues passes through 1.
  double cluster_phase(double k, int m) const {
    std::vector<double> a;
    for (const cplx& z : eigs(k)) a.push_back(std::arg(z));
    std::partial_sort(a.begin(), a.begin() + m, a.end(),
                      [](double x, double y) { return std::abs(x) < std::abs(y); });
    return std::accumulate(a.begin(), a.begin() + m, 0.0);
  }

  int kernel_dim(double k, double tol) const {
    Eigen::MatrixXcd s = S(k);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(s.rows(), s.cols()) - s;
    // squared singular values; absolute error ~ eps |m|^2 stays far below tol^2
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    int small = 0;
    for (int j = 0; j < es.eigenvalues().size(); ++j)
      if (es.eigenvalues()(j) < tol * tol) ++small;
    return small;
  }

  void init_r0() { r0 = phase_sum(0.0, 1e-9); }

  double raw_count(double k) const { return k * total / kPi - phase_sum(k, 1e-14) + r0; }

  int count(double k) const {
    double n = raw_count(k);
    double r = std::round(n);
    if (std::abs(n - r) > 1e-4) {
      std::ostringstream os;
      os << "eigenphase count not integral at k=" << k << " (" << n << ")";
      throw NumericError(os.str());
    }
    return static_cast<int>(r);
  }

  double smooth_count(double k, double eps) const {
    double s = 0;
    for (const cplx& z : eigs(cplx(k, eps))) s += std::arg(1.0 - z);
    return k * total / kPi - static_cast<double>(len.size()) / 2 - s / kPi + r0;
  }
};

}  // namespace

double scattering_coefficient(const Graph& g, Bond b, Bond next) {
  int v = g.terminus(b);
  if (g.origin(next) != v) return 0.0;
  double s = 2.0 / g.degree(v);
  if (next == reverse(b)) s -= 1.0;
  return s;
}

Eigen::MatrixXd vertex_scattering(const Graph& g) {
  const int B = g.bond_count();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(B, B);
  for (Bond b = 0; b < B; ++b)
    for (Bond nb : g.out_bonds(g.terminus(b))) T(b, nb) = scattering_coefficient(g, b, nb);
  return T;
}

Eigen::MatrixXcd secular_matrix(const MetricGraph& g, const OneForm& alpha, cplx k) {
  return Secular(g, alpha).S(k);
}

cplx secular_det(const MetricGraph& g, const OneForm& alpha, cplx k) {
  Eigen::MatrixXcd s = secular_matrix(g, alpha, k);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(s.rows(), s.cols()) - s;
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

double counting_function(const MetricGraph& g, const OneForm& alpha, double k, double eps) {
  Secular sec(g, alpha);
  sec.init_r0();
  if (eps > 0) return sec.smooth_count(k, eps);
  return sec.raw_count(k);
}

int zero_multiplicity(const MetricGraph& g, const OneForm& alpha) {
  HomologyBasis hb(g.graph);
  auto comp = g.graph.component_labels();
  int ncomp = g.graph.component_count();
  std::vector<char> has_edge(ncomp, 0), trivial(ncomp, 1);
  for (auto& e : g.graph.edges()) has_edge[comp[e.a]] = 1;
  for (int i = 0; i < hb.rank(); ++i) {
    double w = 0;
    for (Bond b : hb.cycles()[i].bonds) w += integrate(g, alpha, b);
    if (std::abs(w - std::round(w)) > 1e-9) trivial[hb.component()[i]] = 0;
  }
  int m = 0;
  for (int c = 0; c < ncomp; ++c)
    if (has_edge[c] && trivial[c]) ++m;
  return m;
}

std::vector<double> SpectrumSlice::flat() const {
  std::vector<double> out;
  for (size_t i = 0; i < k.size(); ++i)
    for (int j = 0; j < mult[i]; ++j) out.push_back(k[i]);
  return out;
}

int SpectrumSlice::count_upto(double kk) const {
  int n = 0;
  for (size_t i = 0; i < k.size() && k[i] <= kk; ++i) n += mult[i];
  return n;
}

SpectrumSlice eigenvalues(const MetricGraph& g, const OneForm& alpha, double k_max,
                          const SpectrumOptions& opts) {
  if (!(k_max > 0)) throw InputError("k_max must be positive");
  SpectrumSlice out;
  out.k_max = k_max;
  out.root_tol = opts.root_tol;
  out.multiplicity_tol = opts.multiplicity_tol;
  int m0 = zero_multiplicity(g, alpha);
  if (m0 > 0) {
    out.k.push_back(0.0);
    out.mult.push_back(m0);
  }
  if (g.edge_count() == 0) return out;
  Secular sec(g, alpha);
  sec.init_r0();
  double h = opts.grid_step > 0 ? opts.grid_step : kPi / (4 * sec.total);
  out.grid_step = h;
  const size_t n = static_cast<size_t>(std::ceil(k_max / h));
  std::vector<double> grid(n + 1);
  for (size_t i = 0; i <= n; ++i) grid[i] = std::min(k_max, static_cast<double>(i) * h);
  std::vector<int> counts(n + 1, 0);
  parallel_for(n, [&](size_t i) { counts[i + 1] = sec.count(grid[i + 1]); });

  struct Root { double k; int m; bool checked = false; };
  std::vector<std::vector<Root>> found(n);
  parallel_for(n, [&](size_t i) {
    if (counts[i + 1] == counts[i]) return;
    if (counts[i + 1] < counts[i]) throw NumericError("counting function decreased; use a finer grid");
    std::vector<std::tuple<double, int, double, int>> stack{{grid[i], counts[i], grid[i + 1], counts[i + 1]}};
    while (!stack.empty()) {
      auto [a, na, b, nb] = stack.back();
      stack.pop_back();
      if (na == nb) continue;
      if (b - a <= opts.root_tol * std::max(1.0, b)) {
        found[i].push_back({0.5 * (a + b), nb - na});
        continue;
      }
      if (a > 0) {
        // bracketed solve on the crossing cluster, checked against the kernel
        const int m = nb - na;
        double fa = sec.cluster_phase(a, m), fb = sec.cluster_phase(b, m);
        if (fa < 0 && fb > 0) {
          std::uintmax_t it = 100;
          auto tol = [&](double x, double y) { return std::abs(x - y) <= opts.root_tol * std::max(1.0, y); };
          auto r = boost::math::tools::toms748_solve([&](double k) { return sec.cluster_phase(k, m); }, a, b, fa,
                                                     fb, tol, it);
          double k0 = 0.5 * (r.first + r.second);
          const double d = 1e-9 * std::max(1.0, k0);
          if (it < 100 && k0 - d > a && k0 + d < b && sec.count(k0 - d) == na && sec.count(k0 + d) == nb &&
              sec.kernel_dim(k0, opts.multiplicity_tol) == m) {
            found[i].push_back({k0, m, true});
            continue;
          }
        }
      }
      double m = 0.5 * (a + b);
      int nm = std::clamp(sec.count(m), na, nb);
      stack.push_back({m, nm, b, nb});
      stack.push_back({a, na, m, nm});
    }
  });
  // a degenerate cluster can split by rounding of k l into jumps ~1e-11 apart
  std::vector<Root> roots;
  for (auto& f : found)
    for (auto& r : f) {
      if (r.k <= 0) continue;
      if (!roots.empty() && r.k - roots.back().k <= 100 * opts.root_tol * std::max(1.0, r.k)) {
        Root& q = roots.back();
        q.k = (q.k * q.m + r.k * r.m) / (q.m + r.m);
        q.m += r.m;
        q.checked = false;
      } else {
        roots.push_back(r);
      }
    }
  for (auto& r : roots) {
    int small = r.checked ? r.m : sec.kernel_dim(r.k, opts.multiplicity_tol);
    if (small != r.m) {
      std::ostringstream os;
      os.precision(15);
      os << "unresolved near-degenerate cluster at k=" << r.k << ": counting function gives "
         << r.m << ", kernel dimension " << small << "; use a finer grid";
      throw NumericError(os.str());
    }
    out.k.push_back(r.k);
    out.mult.push_back(r.m);
  }
  return out;
}

double weyl_check(const SpectrumSlice& s, double total_length) {
  double dev = 0;
  int before = 0;
  for (size_t i = 0; i < s.k.size(); ++i) {
    double w = total_length * s.k[i] / kPi;
    dev = std::max(dev, std::abs(before - w));
    before += s.mult[i];
    dev = std::max(dev, std::abs(before - w));
  }
  dev = std::max(dev, std::abs(before - total_length * s.k_max / kPi));
  return dev;
}

Eigen::MatrixXd combinatorial_laplacian(const Graph& g) {
  const int n = g.vertex_count();
  for (int v = 0; v < n; ++v)
    if (g.degree(v) == 0) throw InputError("vertex " + std::to_string(v) + " is isolated");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto& e : g.edges()) {
    if (e.a == e.b) {
      w(e.a, e.a) += 0.5;  // half the number of loops
    } else {
      w(e.a, e.b) += 1;
      w(e.b, e.a) += 1;
    }
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      L(u, v) -= w(u, v) / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
  return L;
}

std::vector<double> combinatorial_spectrum(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combinatorial_laplacian(g));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool graph_isospectral(const Graph& g1, const Graph& g2, double tol) {
  if (g1.vertex_count() != g2.vertex_count()) return false;
  auto a = combinatorial_spectrum(g1), b = combinatorial_spectrum(g2);
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

CorrespondenceReport equilateral_correspondence_check(const Graph& g1, const Graph& g2, double ell,
                                                      double k_max, double tol) {
  auto degree_of = [](const Graph& g) {
    if (g.vertex_count() == 0) throw InputError("empty graph");
    int d = g.degree(0);
    for (int v = 1; v < g.vertex_count(); ++v)
      if (g.degree(v) != d) throw InputError("graph is not regular (vertex " + std::to_string(v) + ")");
    return d;
  };
  if (degree_of(g1) != degree_of(g2)) throw InputError("graphs are regular of different degrees");
  if (!graph_isospectral(g1, g2)) throw InputError("combinatorial spectra differ");
  MetricGraph m1(g1, std::vector<double>(g1.edge_count(), ell));
  MetricGraph m2(g2, std::vector<double>(g2.edge_count(), ell));
  auto s1 = eigenvalues(m1, zero_form(g1), k_max).flat();
  auto s2 = eigenvalues(m2, zero_form(g2), k_max).flat();
  CorrespondenceReport r;
  r.count1 = s1.size();
  r.count2 = s2.size();
  r.agree = s1.size() == s2.size();
  for (size_t i = 0; i < std::min(s1.size(), s2.size()); ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(s1[i] - s2[i]));
  if (r.max_deviation > tol) r.agree = false;
  return r;
}

}  // namespace qg
