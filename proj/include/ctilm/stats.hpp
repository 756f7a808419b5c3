#pragma once

namespace ctilm {

// log density of Gamma(shape, rate) at x; -inf for x <= 0
double log_gamma_pdf(double x, double shape, double rate);

// regularized lower incomplete gamma P(shape, rate*x) = CDF of Gamma(shape, rate)
double gamma_cdf(double x, double shape, double rate);

// regularized incomplete beta I_x(a, b)
double reg_inc_beta(double a, double b, double x);

double f_cdf(double f, double d1, double d2);

// inverse of f_cdf in f for fixed degrees of freedom
double f_quantile(double p, double d1, double d2);

// Kolmogorov distribution survival function Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2)
double kolmogorov_sf(double t);

} // namespace ctilm
