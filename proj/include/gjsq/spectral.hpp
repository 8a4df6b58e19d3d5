#pragma once

#include <Eigen/Dense>
#include <complex>

namespace gjsq {

using Complex = std::complex<double>;

// Exact limiting conditional arrival rates for the canonical two-server
// system (rates [1, s], exponential sizes) in heavy queue-1 state. All
// formulas work in the scaled variable z = beta / alpha with
// alpha = rho^(1+s), which keeps roots O(1).

double alpha_of(double rho, int s);

// Roots of real polynomials (ascending coefficients) via the companion
// matrix; trailing zero coefficients stripped, leading zeros rejected.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& ascending_coeffs);

// Scaled first characteristic polynomial P1~(z) = q~(z)^s - alpha s^s z^(s+1),
// where q~(z) = -(1+s) rho z^2 + (1+s)(rho+1) z - 1. Ascending coefficients.
Eigen::VectorXd p1_scaled_coeffs(double rho, int s);

// Scaled second characteristic polynomial P2~(z) = P2(alpha z) / alpha^2 with
// P2(beta) = alpha^2 s^s + beta^2 ((1+s) rho)^s - alpha beta s^s p_s(beta),
// p_k the power sums of the g+- roots. Ascending coefficients.
Eigen::VectorXd p2_scaled_coeffs(double rho, int s);

// The s roots of P1 inside |beta| < alpha (returned unscaled, beta = alpha z).
// For s = 1 the closed form beta_1 = rho^2 / (2 + rho) is used.
Eigen::VectorXcd inner_roots_pos(double rho, int s);

// The single root beta_{s+1} of P2 inside |beta| < alpha (unscaled).
Complex inner_root_neg(double rho, int s);

// Geometric-term base and value:
//   ipos(alpha, beta, r) = ((alpha beta (1+s)(rho+1) - beta^2 (1+s) rho
//                            - alpha^2) / (alpha beta s))^r
Complex ipos(double alpha, Complex beta, int r, double rho, int s);

// Roots of s x^2 - ((1+s)(rho+1) - beta) x + (1+s) rho = 0 (g+ first).
std::pair<Complex, Complex> g_pm(Complex beta, double rho, int s);

// F(alpha, beta, x) = beta - (1+s)(rho+1) + s x + (beta/alpha)(1+s) rho x^(s-1)
Complex F_of(double alpha, Complex beta, Complex x, double rho, int s);

// ineg(alpha, beta, r) = (F(g-) g+^r - F(g+) g-^r) / (F(g-) - F(g+))
Complex ineg(double alpha, Complex beta, int r, double rho, int s);

struct SpectralData {
  int s = 1;
  double rho = 0.0;
  double alpha = 0.0;
  Eigen::VectorXcd betas;     // s inner roots of P1
  Complex beta_neg;           // inner root of P2
  Eigen::VectorXcd c_hat;     // coefficients from the boundary system
  Eigen::VectorXcd h;         // h(0..s-1)
};

// Solves the boundary linear system for c_hat and assembles h. Throws
// std::runtime_error if root counts are off or the system is singular.
SpectralData solve_spectral(double rho, int s);

// A(r) = sum_i c_i beta_i/(alpha-beta_i) ipos(..,r) + h(r)
//        + beta_neg/(1-beta_neg) ineg(..,r),  real and positive for
// r = 0..s-1. Throws std::runtime_error if the imaginary part exceeds
// 1e-9 relative or the value is not positive.
double A_of(const SpectralData& data, int r);

struct LimitingRates {
  double alpha = 0.0;
  double lambda1 = 0.0;        // = alpha
  Eigen::VectorXd lambda2;     // lambda2lim(0..s-1)
};

// Limiting rates: lambda1lim = alpha;
// lambda2lim(r) = s A(r+1)/A(r) for r <= s-2, s alpha A(0)/A(s-1) for r = s-1.
LimitingRates limiting_rates(double rho, int s);

}  // namespace gjsq
