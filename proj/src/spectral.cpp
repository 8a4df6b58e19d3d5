#include "gjsq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gjsq {

namespace {

void check_args(double rho, int s) {
  if (s < 1) throw std::invalid_argument("spectral: s must be >= 1");
  if (!(rho > 0.0) || !(rho < 1.0))
    throw std::invalid_argument("spectral: rho must be inside (0, 1)");
}

Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Integer power by repeated multiplication (exact exponent handling for the
// small r used here).
Complex powi(Complex base, int r) {
  Complex out{1.0, 0.0};
  for (int k = 0; k < r; ++k) out *= base;
  return out;
}

double spow(double base, int r) {
  double out = 1.0;
  for (int k = 0; k < r; ++k) out *= base;
  return out;
}

}  // namespace

double alpha_of(double rho, int s) {
  check_args(rho, s);
  return spow(rho, s + 1);
}

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& ascending_coeffs) {
  Eigen::VectorXd c = ascending_coeffs;
  Eigen::Index degree = c.size() - 1;
  while (degree > 0 && c[degree] == 0.0) --degree;
  if (degree <= 0)
    throw std::invalid_argument("polynomial_roots: degree must be >= 1");

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i)
    companion(i, degree - 1) = -c[i] / c[degree];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("polynomial_roots: eigenvalue iteration failed");
  Eigen::VectorXcd roots = solver.eigenvalues();
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

Eigen::VectorXd p1_scaled_coeffs(double rho, int s) {
  check_args(rho, s);
  // q~(z) = -1 + (1+s)(rho+1) z - (1+s) rho z^2, ascending.
  Eigen::VectorXd qt(3);
  qt << -1.0, (1.0 + s) * (rho + 1.0), -(1.0 + s) * rho;
  Eigen::VectorXd p(1);
  p << 1.0;
  for (int k = 0; k < s; ++k) p = convolve(p, qt);
  // p has degree 2s >= s+1; subtract alpha s^s z^(s+1).
  p[s + 1] -= alpha_of(rho, s) * spow(static_cast<double>(s), s);
  return p;
}

namespace {

// Power sums p_k(beta) = g+^k + g-^k as ascending polynomials in beta, via
// p_k = e1 p_{k-1} - e2 p_{k-2}; e1 = ((1+s)(rho+1) - beta)/s (linear in
// beta), e2 = g+ g- = (1+s) rho / s.
Eigen::VectorXd power_sum_coeffs(double rho, int s) {
  Eigen::VectorXd e1(2);
  e1 << (1.0 + s) * (rho + 1.0) / s, -1.0 / s;
  const double e2 = (1.0 + s) * rho / s;
  Eigen::VectorXd pkm2(1), pkm1 = e1;
  pkm2 << 2.0;
  if (s == 1) return pkm1;
  Eigen::VectorXd pk;
  for (int k = 2; k <= s; ++k) {
    pk = convolve(e1, pkm1);
    pk.head(pkm2.size()) -= e2 * pkm2;
    pkm2 = pkm1;
    pkm1 = pk;
  }
  return pkm1;
}

}  // namespace

Eigen::VectorXd p2_scaled_coeffs(double rho, int s) {
  check_args(rho, s);
  const double alpha = alpha_of(rho, s);
  const double ss = spow(static_cast<double>(s), s);
  Eigen::VectorXd ps = power_sum_coeffs(rho, s);  // degree s
  Eigen::Index n = std::max<Eigen::Index>(3, ps.size() + 1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c[0] += alpha * alpha * ss;
  c[2] += spow((1.0 + s) * rho, s);
  for (Eigen::Index k = 0; k < ps.size(); ++k) c[k + 1] -= alpha * ss * ps[k];
  // Scale beta = alpha z and divide by alpha^2 for conditioning.
  Eigen::VectorXd cz(n);
  double ak = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cz[k] = c[k] * ak / (alpha * alpha);
    ak *= alpha;
  }
  return cz;
}

namespace {

std::vector<Complex> roots_inside_unit_disc(const Eigen::VectorXd& coeffs) {
  // Work on the reversed polynomial: its leading coefficient is the original
  // constant term (O(1) here), so the companion matrix stays well conditioned
  // even when small rho sends the outer roots toward infinity and the
  // original leading coefficients toward zero. Inner roots |z| < 1 map to
  // reversed roots |w| > 1 with z = 1/w.
  Eigen::VectorXd reversed = coeffs.reverse();
  Eigen::VectorXcd wroots = polynomial_roots(reversed);
  std::vector<Complex> inside;
  for (Eigen::Index i = 0; i < wroots.size(); ++i)
    if (std::abs(wroots[i]) > 1.0 + 1e-10) inside.push_back(1.0 / wroots[i]);
  std::sort(inside.begin(), inside.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return inside;
}

}  // namespace

Eigen::VectorXcd inner_roots_pos(double rho, int s) {
  check_args(rho, s);
  const double alpha = alpha_of(rho, s);
  if (s == 1) {
    Eigen::VectorXcd betas(1);
    betas[0] = Complex(rho * rho / (2.0 + rho), 0.0);
    return betas;
  }
  std::vector<Complex> inside = roots_inside_unit_disc(p1_scaled_coeffs(rho, s));
  if (static_cast<int>(inside.size()) != s) {
    std::ostringstream msg;
    msg << "inner_roots_pos: expected " << s << " roots inside the disc, got "
        << inside.size() << " (rho=" << rho << ", s=" << s << ")";
    throw std::runtime_error(msg.str());
  }
  Eigen::VectorXcd betas(s);
  for (int i = 0; i < s; ++i) betas[i] = alpha * inside[i];
  return betas;
}

Complex inner_root_neg(double rho, int s) {
  check_args(rho, s);
  std::vector<Complex> inside = roots_inside_unit_disc(p2_scaled_coeffs(rho, s));
  if (inside.size() != 1) {
    std::ostringstream msg;
    msg << "inner_root_neg: expected 1 root inside the disc, got "
        << inside.size() << " (rho=" << rho << ", s=" << s << ")";
    throw std::runtime_error(msg.str());
  }
  return alpha_of(rho, s) * inside.front();
}

Complex ipos(double alpha, Complex beta, int r, double rho, int s) {
  Complex base = (alpha * beta * (1.0 + s) * (rho + 1.0) -
                  beta * beta * (1.0 + s) * rho - alpha * alpha) /
                 (alpha * beta * static_cast<double>(s));
  return powi(base, r);
}

std::pair<Complex, Complex> g_pm(Complex beta, double rho, int s) {
  Complex disc = (beta - (1.0 + s) * (rho + 1.0)) * (beta - (1.0 + s) * (rho + 1.0)) -
                 4.0 * s * (1.0 + s) * rho;
  Complex sq = std::sqrt(disc);
  Complex gp = ((1.0 + s) * (rho + 1.0) - beta + sq) / (2.0 * s);
  Complex gm = ((1.0 + s) * (rho + 1.0) - beta - sq) / (2.0 * s);
  return {gp, gm};
}

Complex F_of(double alpha, Complex beta, Complex x, double rho, int s) {
  return beta - (1.0 + s) * (rho + 1.0) + static_cast<double>(s) * x +
         (beta / alpha) * (1.0 + s) * rho * powi(x, s - 1);
}

Complex ineg(double alpha, Complex beta, int r, double rho, int s) {
  auto [gp, gm] = g_pm(beta, rho, s);
  Complex Fp = F_of(alpha, beta, gp, rho, s);
  Complex Fm = F_of(alpha, beta, gm, rho, s);
  return (Fm * powi(gp, r) - Fp * powi(gm, r)) / (Fm - Fp);
}

SpectralData solve_spectral(double rho, int s) {
  check_args(rho, s);
  SpectralData data;
  data.s = s;
  data.rho = rho;
  data.alpha = alpha_of(rho, s);
  data.betas = inner_roots_pos(rho, s);
  data.beta_neg = inner_root_neg(rho, s);

  const double alpha = data.alpha;
  const double sp1 = 1.0 + s;
  using MatC = Eigen::MatrixXcd;
  using VecC = Eigen::VectorXcd;

  MatC I = MatC::Identity(s, s);
  MatC M_0_sm1 = MatC::Zero(s, s);
  M_0_sm1(0, s - 1) = 1.0;
  MatC M_sm1_0 = MatC::Zero(s, s);
  M_sm1_0(s - 1, 0) = 1.0;
  MatC Lo = MatC::Zero(s, s);
  for (int x = 1; x < s; ++x) Lo(x, x - 1) = 1.0;

  MatC P = 0.5 * sp1 * rho * M_0_sm1 + alpha * I;
  Eigen::PartialPivLU<MatC> plu(P);
  MatC C = -sp1 * (rho + 1.0) * I + static_cast<double>(s) * Lo.transpose() +
           sp1 * rho * Lo;

  auto ib_pos = [&](Complex beta) {
    VecC ib(s);
    for (int r = 0; r < s; ++r) ib[r] = ipos(alpha, beta, r, rho, s);
    return ib;
  };

  MatC V(s, s);
  for (int i = 0; i < s; ++i) {
    Complex beta = data.betas[i];
    VecC ib = ib_pos(beta);
    VecC col = beta * (sp1 * rho * ib + alpha * static_cast<double>(s) * (M_sm1_0 * ib));
    col += alpha * alpha * (C * plu.solve(ib));
    V.col(i) = col;
  }

  VecC ibn(s);
  for (int r = 0; r < s; ++r) ibn[r] = ineg(alpha, data.beta_neg, r, rho, s);
  VecC rhs = -data.beta_neg * (sp1 * rho * (M_0_sm1 * ibn) + alpha * ibn);

  Eigen::PartialPivLU<MatC> vlu(V);
  data.c_hat = vlu.solve(rhs);
  if (!data.c_hat.allFinite())
    throw std::runtime_error("solve_spectral: boundary system is singular");

  VecC acc = VecC::Zero(s);
  for (int i = 0; i < s; ++i) acc += data.c_hat[i] * ib_pos(data.betas[i]);
  data.h = alpha * plu.solve(acc);
  return data;
}

double A_of(const SpectralData& data, int r) {
  if (r < 0 || r >= data.s) throw std::invalid_argument("A_of: r must be in [0, s)");
  const double alpha = data.alpha;
  Complex v{0.0, 0.0};
  for (int i = 0; i < data.s; ++i) {
    Complex beta = data.betas[i];
    v += data.c_hat[i] * beta / (alpha - beta) * ipos(alpha, beta, r, data.rho, data.s);
  }
  v += data.h[r];
  v += data.beta_neg / (1.0 - data.beta_neg) * ineg(alpha, data.beta_neg, r, data.rho, data.s);

  double scale = std::max(1.0, std::abs(v.real()));
  if (!(std::abs(v.imag()) <= 1e-9 * scale))
    throw std::runtime_error("A_of: limit series has a non-negligible imaginary part");
  if (!(v.real() > 0.0))
    throw std::runtime_error("A_of: limit series must be positive");
  return v.real();
}

LimitingRates limiting_rates(double rho, int s) {
  SpectralData data = solve_spectral(rho, s);
  Eigen::VectorXd A(s);
  for (int r = 0; r < s; ++r) A[r] = A_of(data, r);
  LimitingRates lim;
  lim.alpha = data.alpha;
  lim.lambda1 = data.alpha;
  lim.lambda2.resize(s);
  for (int r = 0; r < s; ++r) {
    lim.lambda2[r] = (r <= s - 2) ? s * A[r + 1] / A[r]
                                  : s * data.alpha * A[0] / A[s - 1];
  }
  return lim;
}

}  // namespace gjsq
