#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"

using namespace nbv;

TEST_CASE("mean and sample stddev") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  CHECK(sample_stddev(std::vector<double>{7.0}) == 0.0);
  CHECK_THROWS_AS((void)mean(std::vector<double>{}), InvalidInput);
}

TEST_CASE("spearman: monotone, reversed, and tie-averaged cases") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up{0.1, 0.5, 0.6, 2.0, 9.0};
  std::vector<double> down(up.rbegin(), up.rend());
  CHECK(spearman(x, up) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spearman(x, down) == doctest::Approx(-1.0).epsilon(1e-14));

  // Reference value computed with an arbitrary-precision implementation of
  // tie-averaged rank correlation.
  const std::vector<double> a{1.0, 2.0, 2.0, 3.0, 5.0};
  const std::vector<double> b{2.0, 1.0, 4.0, 4.0, 8.0};
  CHECK(spearman(a, b) == doctest::Approx(0.7631578947368421).epsilon(1e-13));

  const std::vector<double> shorter{1.0, 2.0};
  CHECK_THROWS_AS((void)spearman(x, shorter), InvalidInput);
  const std::vector<double> constant{3.0, 3.0, 3.0, 3.0, 3.0};
  CHECK_THROWS_AS((void)spearman(x, constant), InvalidInput);
}

TEST_CASE("student t survival matches frozen high-precision values") {
  CHECK(student_t_sf(2.0, 19) == doctest::Approx(0.030001018193049183).epsilon(1e-12));
  CHECK(student_t_sf(-1.3, 7) == doctest::Approx(0.88261608230381142).epsilon(1e-12));
  CHECK(student_t_sf(5.5, 3) == doctest::Approx(0.0059147957851642599).epsilon(1e-12));
  CHECK(student_t_sf(0.7, 1) == doctest::Approx(0.30559988778578522).epsilon(1e-12));
  CHECK(student_t_sf(0.0, 5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("chi-square survival matches frozen high-precision values") {
  CHECK(chi_square_sf(14.067, 7) == doctest::Approx(0.050002444680797639).epsilon(1e-12));
  CHECK(chi_square_sf(2.0, 7) == doctest::Approx(0.95984036873010156).epsilon(1e-12));
  CHECK(chi_square_sf(18.475, 7) == doctest::Approx(0.010001165377280873).epsilon(1e-12));
  CHECK(chi_square_sf(3.84, 1) == doctest::Approx(0.050043521248705103).epsilon(1e-12));
  CHECK(chi_square_sf(0.5, 2) == doctest::Approx(0.77880078307140487).epsilon(1e-12));
  CHECK(chi_square_sf(-1.0, 3) == 1.0);
}

TEST_CASE("paired one-sided t-test: frozen value, symmetry, degenerate cases") {
  const std::vector<double> a{2.1, 3.4, 2.9, 4.0, 3.3, 2.8};
  const std::vector<double> b{1.9, 3.1, 3.0, 3.2, 2.9, 2.7};
  CHECK(paired_t_pvalue(a, b) == doctest::Approx(0.036324995119249079).epsilon(1e-10));
  CHECK(paired_t_pvalue(a, b) + paired_t_pvalue(b, a) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(paired_t_pvalue(a, a) == 1.0);  // identical samples: no evidence
  std::vector<double> shifted = a;
  for (double& v : shifted) v -= 0.5;
  CHECK(paired_t_pvalue(a, shifted) == 0.0);  // constant positive difference
  CHECK(paired_t_pvalue(shifted, a) == 1.0);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS((void)paired_t_pvalue(one, one), InvalidInput);
  CHECK_THROWS_AS((void)paired_t_pvalue(a, one), InvalidInput);
}

TEST_CASE("binary entropy endpoints and peak") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-14));
  CHECK_THROWS_AS((void)binary_entropy(1.5), InvalidInput);
}
