#pragma once

#include <cstddef>
#include <span>

namespace nbv {

double mean(std::span<const double> v);

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> v);

// Spearman rank correlation with tie-averaged ranks. Throws InvalidInput on
// size mismatch, fewer than two pairs, or a constant input (ranks have no
// variance to correlate).
double spearman(std::span<const double> a, std::span<const double> b);

// One-sided survival P(T > t) of Student's t with `dof` degrees of freedom.
double student_t_sf(double t, int dof);

// Paired one-sided t-test of H1: mean(a - b) > 0. Degenerate inputs resolve
// without a t statistic: zero-variance differences give p = 0 when their mean
// is positive and p = 1 otherwise (identical inputs land on 1).
double paired_t_pvalue(std::span<const double> a, std::span<const double> b);

// Survival P(X > x) of the chi-square distribution with `dof` degrees.
double chi_square_sf(double x, int dof);

// Shannon entropy (nats) of a Bernoulli(p); 0 at p in {0, 1}.
double binary_entropy(double p);

}  // namespace nbv
