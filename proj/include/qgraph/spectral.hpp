// Secular equation det(I - S(k, alpha)) = 0 for the magnetic Laplacian
// with Kirchhoff conditions, eigenvalue extraction with multiplicities,
// and the normalized combinatorial Laplacian.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/metric_core.hpp"

namespace qg {

using cplx = std::complex<double>;

// T_{bb'} = -delta + 2/deg(t(b)) when t(b) = o(b'), delta = 1 iff b' = reverse(b).
Eigen::MatrixXd vertex_scattering(const Graph& g);
double scattering_coefficient(const Graph& g, Bond b, Bond next);

// S = D T with D_bb = exp(i k L(b) - 2 pi i integral_b alpha).
Eigen::MatrixXcd secular_matrix(const MetricGraph& g, const OneForm& alpha, cplx k);
cplx secular_det(const MetricGraph& g, const OneForm& alpha, cplx k);

struct SpectrumOptions {
  double grid_step = 0;          // 0: pi / (4 * total length)
  double root_tol = 1e-12;       // relative width at which bisection stops
  double multiplicity_tol = 1e-6;
};

struct SpectrumSlice {
  std::vector<double> k;   // strictly increasing wavenumbers, k[0] may be 0
  std::vector<int> mult;
  double k_max = 0;
  double grid_step = 0;
  double root_tol = 0;
  double multiplicity_tol = 0;

  std::size_t size() const { return k.size(); }
  // Wavenumbers repeated by multiplicity.
  std::vector<double> flat() const;
  int count_upto(double kk) const;  // eigenvalues in [0, kk]
};

// Number of spectral wavenumbers in (0, k], from the eigenphases of S(k).
// With eps > 0 the smooth version evaluated at k + i eps is returned.
double counting_function(const MetricGraph& g, const OneForm& alpha, double k, double eps = 0);

// Multiplicity of the eigenvalue 0: components with trivial holonomy.
int zero_multiplicity(const MetricGraph& g, const OneForm& alpha);

SpectrumSlice eigenvalues(const MetricGraph& g, const OneForm& alpha, double k_max,
                          const SpectrumOptions& opts = {});

// max |N(k) - L k / pi| just below and at every eigenvalue and at k_max.
double weyl_check(const SpectrumSlice& s, double total_length);

Eigen::MatrixXd combinatorial_laplacian(const Graph& g);
std::vector<double> combinatorial_spectrum(const Graph& g);
bool graph_isospectral(const Graph& g1, const Graph& g2, double tol = 1e-10);

struct CorrespondenceReport {
  bool agree = false;
  double max_deviation = 0;
  std::size_t count1 = 0, count2 = 0;
};
CorrespondenceReport equilateral_correspondence_check(const Graph& g1, const Graph& g2, double ell,
                                                      double k_max, double tol = 1e-6);

}  // namespace qg
