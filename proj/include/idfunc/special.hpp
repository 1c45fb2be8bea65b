#pragma once

#include <vector>

namespace idfunc {

double norm_pdf(double z);
/// Standard normal CDF via erfc; accurate in both tails.
double norm_cdf(double z);
/// Inverse standard normal CDF (Wichura's PPND16 rational
/// approximations); relative error below 1e-15 on (0,1).
double norm_quantile(double p);

/// Regularized lower incomplete gamma P(a,x): series for x < a+1,
/// Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chi_square_cdf(double x, double dof);
double chi_square_sf(double x, double dof);
double chi_square_quantile(double p, double dof);

/// Regularized incomplete beta I_x(a,b) by continued fraction.
double regularized_beta(double x, double a, double b);

double student_t_pdf(double x, double dof);
double student_t_cdf(double x, double dof);

/// Two-sided Kolmogorov-Smirnov distance of a sample from U(0,1).
/// The input need not be sorted.
double ks_distance_uniform(std::vector<double> values);

}  // namespace idfunc
