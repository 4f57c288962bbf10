#include "aqpt/linalg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace aqpt;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("derive_seed produces distinct streams") {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("haar unitary columns are orthonormal") {
  Rng rng = make_rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 2 + trial % 9;
    const int cols = 1 + trial % rows;
    const CMatrix u = haar_random_unitary(rows, cols, rng);
    const CMatrix q = u.adjoint() * u;
    CHECK((q - CMatrix::Identity(cols, cols)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("haar moment: mean |U11|^2 of 2x2 draws is 1/2") {
  Rng rng = make_rng(2);
  double acc = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const CMatrix u = haar_random_unitary(2, 2, rng);
    acc += std::norm(u(0, 0));
  }
  CHECK(std::abs(acc / trials - 0.5) < 0.01);
}

TEST_CASE("trace distribution is invariant under fixed left rotation") {
  Rng rng = make_rng(3);
  const CMatrix fixed = haar_random_unitary(2, 2, rng);
  std::vector<double> plain, rotated;
  for (int t = 0; t < 2000; ++t) {
    plain.push_back((haar_random_unitary(2, 2, rng)).trace().real());
    rotated.push_back((fixed * haar_random_unitary(2, 2, rng)).trace().real());
  }
  const double d = ks_two_sample(plain, rotated);
  // alpha = 0.001 critical value for n = m = 2000
  CHECK(d < 1.95 * std::sqrt(2.0 / 2000.0));
}

TEST_CASE("haar_random_unitary rejects rows < cols") {
  Rng rng = make_rng(4);
  CHECK_THROWS_AS(haar_random_unitary(2, 3, rng), std::invalid_argument);
}

TEST_CASE("psd_sqrt squares back") {
  Rng rng = make_rng(5);
  const CMatrix g = ginibre(4, 4, rng);
  const CMatrix a = g * g.adjoint();
  const CMatrix s = psd_sqrt(a);
  CHECK((s * s - a).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(is_hermitian(s, 1e-10));
}

TEST_CASE("psd_sqrt clips small negative eigenvalues") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1e-13;
  const CMatrix s = psd_sqrt(a);
  CHECK(s(1, 1).real() == 0.0);
  CHECK(s(0, 0).real() == doctest::Approx(1.0));
}
