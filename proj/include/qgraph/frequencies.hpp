// Recovery of finite cosine sums c + sum nu_j cos(mu_j t) from samples.
#pragma once

#include <vector>

#include "qgraph/metric_core.hpp"

namespace qg {

struct CosineTerm {
  double mu = 0;
  double nu = 0;
};

struct CosineFit {
  double constant = 0;
  std::vector<CosineTerm> terms;  // ascending mu
  double residual = 0;            // rms residual over rms signal

  double operator()(double t) const;
};

struct FrequencyOptions {
  double rank_tol = 1e-9;      // singular values below rank_tol * s_max are noise
  double amplitude_tol = 1e-10;  // terms below amplitude_tol * max|f| are dropped
  double residual_tol = 1e-6;
};

// Matrix pencil on uniform samples, amplitudes by least squares, then a
// Gauss-Newton polish of all parameters.
CosineFit extract_frequencies(const std::vector<double>& t, const std::vector<double>& f, int max_terms,
                              const FrequencyOptions& opts = {});

// Exact moment method. Given m_k = f^(2k)(0) for k = 0 .. 2r-1 of a sum of
// r terms (the constant counting as mu = 0), returns the monic polynomial
// a_0 + a_1 x + ... + x^r whose roots are -mu_j^2.
std::vector<Rational> derivative_prony(const std::vector<Rational>& moments, int r);

}  // namespace qg
