#include "qgraph/frequencies.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace qg {

double CosineFit::operator()(double t) const {
  double s = constant;
  for (const auto& c : terms) s += c.nu * std::cos(c.mu * t);
  return s;
}

namespace {

double rms(const Eigen::VectorXd& v) { return v.size() ? v.norm() / std::sqrt(double(v.size())) : 0.0; }

Eigen::VectorXd model_residual(const Eigen::VectorXd& t, const Eigen::VectorXd& f, double c,
                               const std::vector<CosineTerm>& terms) {
  Eigen::VectorXd r = f.array() - c;
  for (const auto& k : terms) r.array() -= k.nu * (k.mu * t.array()).cos();
  return r;
}

// Amplitudes and constant for fixed frequencies.
void fit_amplitudes(const Eigen::VectorXd& t, const Eigen::VectorXd& f, double& c, std::vector<CosineTerm>& terms) {
  const int n = static_cast<int>(t.size()), m = static_cast<int>(terms.size());
  Eigen::MatrixXd A(n, m + 1);
  A.col(0).setOnes();
  for (int k = 0; k < m; ++k) A.col(k + 1) = (terms[k].mu * t.array()).cos();
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(f);
  c = x(0);
  for (int k = 0; k < m; ++k) terms[k].nu = x(k + 1);
}

void polish(const Eigen::VectorXd& t, const Eigen::VectorXd& f, double& c, std::vector<CosineTerm>& terms) {
  const int n = static_cast<int>(t.size()), m = static_cast<int>(terms.size());
  double err = model_residual(t, f, c, terms).squaredNorm();
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd r = model_residual(t, f, c, terms);
    Eigen::MatrixXd J(n, 2 * m + 1);
    J.col(0).setOnes();
    for (int k = 0; k < m; ++k) {
      Eigen::ArrayXd ph = terms[k].mu * t.array();
      J.col(1 + 2 * k) = ph.cos();
      J.col(2 + 2 * k) = -terms[k].nu * t.array() * ph.sin();
    }
    Eigen::VectorXd d = J.colPivHouseholderQr().solve(r);
    double step = 1;
    bool improved = false;
    for (int h = 0; h < 20; ++h, step *= 0.5) {
      double c2 = c + step * d(0);
      auto t2 = terms;
      for (int k = 0; k < m; ++k) {
        t2[k].nu += step * d(1 + 2 * k);
        t2[k].mu += step * d(2 + 2 * k);
      }
      double e2 = model_residual(t, f, c2, t2).squaredNorm();
      if (e2 < err) {
        improved = err - e2 > 1e-30 + 1e-14 * err;
        c = c2;
        terms = t2;
        err = e2;
        break;
      }
    }
    if (!improved) break;
  }
}

}  // namespace

CosineFit extract_frequencies(const std::vector<double>& tv, const std::vector<double>& fv, int max_terms,
                              const FrequencyOptions& opts) {
  const int N = static_cast<int>(tv.size());
  if (fv.size() != tv.size()) throw InputError("sample times and values differ in length");
  if (max_terms < 0) throw InputError("max_terms must be nonnegative");
  if (N < std::max(4 * max_terms, 4)) throw InputError("need at least 4 samples per term");
  const double dt = tv[1] - tv[0];
  if (!(dt > 0)) throw InputError("sample times must increase");
  for (int i = 1; i < N; ++i)
    if (std::abs(tv[i] - tv[0] - i * dt) > 1e-9 * std::max(1.0, std::abs(tv[i])))
      throw InputError("sample times are not uniform");
  Eigen::Map<const Eigen::VectorXd> t(tv.data(), N), f(fv.data(), N);
  const double T = N * dt;
  const double fmax = f.cwiseAbs().maxCoeff();

  CosineFit fit;
  if (fmax == 0) return fit;

  // Hankel pencil; roots are exp(+-i mu dt) and exp(0) for the constant.
  const int M = 2 * max_terms + 1;
  const int L = N / 2;
  Eigen::MatrixXd Y(N - L, L + 1);
  for (int i = 0; i < N - L; ++i)
    for (int j = 0; j <= L; ++j) Y(i, j) = f(i + j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  int r = 0;
  while (r < s.size() && r < M && s(r) > opts.rank_tol * s(0)) ++r;
  Eigen::MatrixXd V = svd.matrixV().leftCols(r);
  Eigen::MatrixXd V1 = V.topRows(L), V2 = V.bottomRows(L);
  Eigen::MatrixXd P = V1.completeOrthogonalDecomposition().solve(V2);
  Eigen::EigenSolver<Eigen::MatrixXd> es(P, false);
  std::vector<double> omegas;
  for (int k = 0; k < r; ++k) {
    double w = std::abs(std::arg(es.eigenvalues()(k))) / dt;
    if (w * T < 1e-6) continue;
    bool dup = false;
    for (double o : omegas)
      if (std::abs(o - w) <= 1e-9 * std::max(1.0, w)) dup = true;
    if (!dup) omegas.push_back(w);
  }
  std::sort(omegas.begin(), omegas.end());
  for (double w : omegas) fit.terms.push_back({w, 0});
  fit_amplitudes(t, f, fit.constant, fit.terms);
  polish(t, f, fit.constant, fit.terms);
  auto drop = [&]() {
    auto it = std::remove_if(fit.terms.begin(), fit.terms.end(),
                             [&](const CosineTerm& c) { return std::abs(c.nu) < opts.amplitude_tol * fmax; });
    if (it == fit.terms.end()) return false;
    fit.terms.erase(it, fit.terms.end());
    return true;
  };
  if (drop()) {
    fit_amplitudes(t, f, fit.constant, fit.terms);
    polish(t, f, fit.constant, fit.terms);
  }
  for (auto& c : fit.terms) c.mu = std::abs(c.mu);
  std::sort(fit.terms.begin(), fit.terms.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
  fit.residual = rms(model_residual(t, f, fit.constant, fit.terms)) / rms(f);
  if (fit.residual > opts.residual_tol) throw NumericError("model order exceeded or noise too high");
  return fit;
}

std::vector<Rational> derivative_prony(const std::vector<Rational>& m, int r) {
  if (r < 1 || static_cast<int>(m.size()) < 2 * r) throw InputError("need 2r moments");
  // Hankel system sum_i a_i m_{k+i} = -m_{k+r}, k = 0 .. r-1
  std::vector<std::vector<Rational>> A(r, std::vector<Rational>(r + 1));
  for (int k = 0; k < r; ++k) {
    for (int i = 0; i < r; ++i) A[k][i] = m[k + i];
    A[k][r] = -m[k + r];
  }
  for (int c = 0; c < r; ++c) {
    int p = c;
    while (p < r && A[p][c] == 0) ++p;
    if (p == r) throw NumericError("moment matrix is singular; fewer terms than requested");
    std::swap(A[p], A[c]);
    for (int i = 0; i < r; ++i) {
      if (i == c || A[i][c] == 0) continue;
      Rational q = A[i][c] / A[c][c];
      for (int j = c; j <= r; ++j) A[i][j] -= q * A[c][j];
    }
  }
  std::vector<Rational> a(r + 1);
  for (int i = 0; i < r; ++i) a[i] = A[i][r] / A[i][i];
  a[r] = 1;
  return a;
}

}  // namespace qg
