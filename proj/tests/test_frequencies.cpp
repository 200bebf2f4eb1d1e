#include <cmath>
#include <random>

#include "doctest.h"
#include "qgraph/frequencies.hpp"

using namespace qg;

namespace {

struct Signal {
  double c;
  std::vector<CosineTerm> terms;
  double operator()(double t) const {
    double s = c;
    for (auto& k : terms) s += k.nu * std::cos(k.mu * t);
    return s;
  }
};

void sample(const Signal& s, int n, double T, std::vector<double>& t, std::vector<double>& f) {
  t.resize(n);
  f.resize(n);
  for (int i = 0; i < n; ++i) {
    t[i] = T * i / n;
    f[i] = s(t[i]);
  }
}

}  // namespace

TEST_CASE("single cosine and constant") {
  std::vector<double> t, f;
  sample({0, {{2, 3}}}, 40, 20, t, f);
  auto fit = extract_frequencies(t, f, 3);
  REQUIRE(fit.terms.size() == 1);
  CHECK(fit.terms[0].mu == doctest::Approx(2).epsilon(1e-12));
  CHECK(fit.terms[0].nu == doctest::Approx(3).epsilon(1e-12));
  CHECK(std::abs(fit.constant) < 1e-10);

  sample({5, {}}, 16, 4, t, f);
  fit = extract_frequencies(t, f, 2);
  CHECK(fit.terms.empty());
  CHECK(fit.constant == doctest::Approx(5));
}

TEST_CASE("two incommensurate cosines") {
  std::vector<double> t, f;
  Signal s{1, {{1, 2}, {std::sqrt(2.0), 0.5}}};
  sample(s, 64, 30, t, f);
  auto fit = extract_frequencies(t, f, 4);
  REQUIRE(fit.terms.size() == 2);
  CHECK(std::abs(fit.terms[0].mu - 1) < 1e-8);
  CHECK(std::abs(fit.terms[1].mu - std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(fit.terms[0].nu - 2) < 1e-8);
  CHECK(std::abs(fit.terms[1].nu - 0.5) < 1e-8);
  CHECK(std::abs(fit.constant - 1) < 1e-8);

  // the exact moment method has the squared frequencies as roots
  std::vector<Rational> m(6);
  for (int k = 0; k < 6; ++k) {
    Rational sign = (k % 2) ? -1 : 1;
    Rational two_k = 1;
    for (int i = 0; i < k; ++i) two_k *= 2;
    m[k] = Rational(2) * sign + Rational(1, 2) * sign * two_k + (k == 0 ? Rational(1) : Rational(0));
  }
  auto a = derivative_prony(m, 3);
  CHECK(a == std::vector<Rational>{0, 2, 3, 1});
  for (auto& term : fit.terms) {
    double x = -term.mu * term.mu;
    double p = 0;
    for (int i = 3; i >= 0; --i) p = p * x + static_cast<double>(a[i]);
    CHECK(std::abs(p) < 1e-7);
  }
}

TEST_CASE("random cosine sums") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uf(0.02, 0.98), ua(0.1, 3), uc(-1, 1);
  std::uniform_int_distribution<int> nt(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    Signal s{uc(rng), {}};
    int n = nt(rng);
    while (static_cast<int>(s.terms.size()) < n) {
      double mu = uf(rng);
      bool ok = true;
      for (auto& k : s.terms) ok = ok && std::abs(k.mu - mu) >= 0.02;
      if (ok) s.terms.push_back({mu, ua(rng)});
    }
    std::sort(s.terms.begin(), s.terms.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
    std::vector<double> t, f;
    sample(s, 400, 400, t, f);
    auto fit = extract_frequencies(t, f, 5);
    REQUIRE(fit.terms.size() == s.terms.size());
    for (size_t i = 0; i < s.terms.size(); ++i) {
      CHECK(std::abs(fit.terms[i].mu - s.terms[i].mu) < 1e-7);
      CHECK(std::abs(fit.terms[i].nu - s.terms[i].nu) < 1e-6);
    }
    CHECK(std::abs(fit.constant - s.c) < 1e-6);
  }
}

TEST_CASE("model order too small is reported") {
  std::vector<double> t, f;
  sample({0, {{0.3, 1}, {0.5, 1}, {0.7, 1}}}, 64, 60, t, f);
  CHECK_THROWS_WITH_AS(extract_frequencies(t, f, 1), "model order exceeded or noise too high", NumericError);
  CHECK_THROWS_AS(extract_frequencies(t, f, 20), InputError);
  t[3] += 0.1;
  CHECK_THROWS_AS(extract_frequencies(t, f, 2), InputError);
}
