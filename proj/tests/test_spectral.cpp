#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gjsq/spectral.hpp"

using namespace gjsq;

namespace {

// Horner evaluation of an ascending-coefficient polynomial at a complex point.
Complex horner(const Eigen::VectorXd& coeffs, Complex z) {
    Complex acc(0.0, 0.0);
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
        acc = acc * z + coeffs[i];
    return acc;
}

// Durand-Kerner root finder: an independent cross-check on the companion-
// matrix roots. Returns all roots of the ascending-coefficient polynomial.
std::vector<Complex> durand_kerner(const Eigen::VectorXd& coeffs) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    double lead = coeffs[deg];
    std::vector<Complex> z(deg);
    for (int i = 0; i < deg; ++i)
        z[i] = std::pow(Complex(0.4, 0.9), i);  // standard non-real seeds
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < deg; ++i) {
            Complex num = horner(coeffs, z[i]) / lead;
            Complex den(1.0, 0.0);
            for (int j = 0; j < deg; ++j)
                if (j != i) den *= z[i] - z[j];
            Complex step = num / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

void sort_complex(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("polynomial_roots solves a factored cubic") {
    // (z - 1)(z - 2)(z + 3) = z^3 - 7z + 6.
    Eigen::VectorXd coeffs(4);
    coeffs << 6.0, -7.0, 0.0, 1.0;
    Eigen::VectorXcd roots = polynomial_roots(coeffs);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].real() == doctest::Approx(-3.0));
    CHECK(roots[1].real() == doctest::Approx(1.0));
    CHECK(roots[2].real() == doctest::Approx(2.0));
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(roots[i].imag()) < 1e-9);
}

TEST_CASE("alpha is rho^(1+s)") {
    CHECK(alpha_of(0.7, 2) == doctest::Approx(0.343).epsilon(1e-12));
    CHECK(alpha_of(0.9, 4) == doctest::Approx(std::pow(0.9, 5)).epsilon(1e-12));
}

TEST_CASE("s = 1 closed forms") {
    double rho = 0.6;
    Eigen::VectorXcd pos = inner_roots_pos(rho, 1);
    REQUIRE(pos.size() == 1);
    CHECK(pos[0].real() == doctest::Approx(rho * rho / (2.0 + rho)).epsilon(1e-12));
    CHECK(pos[0].real() == doctest::Approx(0.13846153846153844).epsilon(1e-12));
    CHECK(pos[0].imag() == 0.0);

    // For s = 1 the second characteristic polynomial has the same inner root.
    Complex neg = inner_root_neg(rho, 1);
    CHECK(neg.real() == doctest::Approx(rho * rho / (2.0 + rho)).epsilon(1e-10));
    CHECK(std::abs(neg.imag()) < 1e-12);

    SpectralData data = solve_spectral(rho, 1);
    REQUIRE(data.c_hat.size() == 1);
    CHECK(data.c_hat[0].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(data.c_hat[0].imag()) < 1e-10);
    double alpha = alpha_of(rho, 1);
    REQUIRE(data.h.size() == 1);
    CHECK(data.h[0].real() == doctest::Approx(alpha / (rho + alpha)).epsilon(1e-10));
    CHECK(data.h[0].real() == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(A_of(data, 0) == doctest::Approx(1.1607142857142854).epsilon(1e-10));
}

TEST_CASE("inner root counts across the parameter grid") {
    for (int s = 1; s <= 5; ++s) {
        for (double rho : {0.3, 0.5, 0.7, 0.9, 0.95}) {
            double alpha = alpha_of(rho, s);
            Eigen::VectorXcd pos = inner_roots_pos(rho, s);
            CHECK(pos.size() == s);
            for (int i = 0; i < pos.size(); ++i)
                CHECK(std::abs(pos[i]) < alpha);
            Complex neg = inner_root_neg(rho, s);
            CHECK(std::abs(neg) < alpha);
        }
    }
}

TEST_CASE("inner roots agree with an independent Durand-Kerner solve") {
    int s = 2;
    double rho = 0.7, alpha = alpha_of(rho, s);

    auto inner_of = [&](const Eigen::VectorXd& coeffs) {
        std::vector<Complex> all = durand_kerner(coeffs);
        std::vector<Complex> inner;
        for (Complex z : all)
            if (std::abs(z) < 1.0 - 1e-10) inner.push_back(alpha * z);
        sort_complex(inner);
        return inner;
    };

    std::vector<Complex> dk1 = inner_of(p1_scaled_coeffs(rho, s));
    Eigen::VectorXcd pos = inner_roots_pos(rho, s);
    std::vector<Complex> lib(pos.data(), pos.data() + pos.size());
    sort_complex(lib);
    REQUIRE(dk1.size() == lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i)
        CHECK(std::abs(dk1[i] - lib[i]) < 1e-9);

    std::vector<Complex> dk2 = inner_of(p2_scaled_coeffs(rho, s));
    REQUIRE(dk2.size() == 1);
    CHECK(std::abs(dk2[0] - inner_root_neg(rho, s)) < 1e-9);
}

TEST_CASE("p2 coefficients match the direct power-sum formula") {
    // P2(beta) = alpha^2 s^s + beta^2 ((1+s) rho)^s - alpha beta s^s p_s(beta)
    // with p_s = g+^s + g-^s; the returned (scaled) coefficients must agree
    // pointwise with this direct evaluation.
    int s = 3;
    double rho = 0.7, alpha = alpha_of(rho, s);
    Eigen::VectorXd coeffs = p2_scaled_coeffs(rho, s);
    double ss = std::pow(static_cast<double>(s), s);
    for (Complex z : {Complex(0.3, 0.2), Complex(-0.5, 0.1), Complex(0.9, 0.0)}) {
        Complex beta = alpha * z;
        auto [gp, gm] = g_pm(beta, rho, s);
        Complex ps = std::pow(gp, s) + std::pow(gm, s);
        Complex direct = alpha * alpha * ss +
                         beta * beta * std::pow((1.0 + s) * rho, s) -
                         alpha * beta * ss * ps;
        Complex scaled = horner(coeffs, z) * alpha * alpha;
        CHECK(std::abs(direct - scaled) <= 1e-10 * std::abs(direct));
    }
}

TEST_CASE("g_pm root identities") {
    int s = 3;
    double rho = 0.7;
    for (Complex beta : {Complex(0.2, 0.1), Complex(0.05, -0.3), Complex(0.4, 0.0)}) {
        auto [gp, gm] = g_pm(beta, rho, s);
        Complex sum_expect = ((1.0 + s) * (rho + 1.0) - beta) / static_cast<double>(s);
        Complex prod_expect = (1.0 + s) * rho / static_cast<double>(s);
        CHECK(std::abs(gp + gm - sum_expect) < 1e-12);
        CHECK(std::abs(gp * gm - prod_expect) < 1e-12);
        // Both satisfy the defining quadratic s x^2 - (...) x + (1+s) rho = 0.
        for (Complex g : {gp, gm}) {
            Complex val = static_cast<double>(s) * g * g -
                          ((1.0 + s) * (rho + 1.0) - beta) * g +
                          (1.0 + s) * rho;
            CHECK(std::abs(val) < 1e-10);
        }
    }
}

TEST_CASE("ipos is a geometric term whose base is an s-th root of beta") {
    for (int s : {2, 3, 4}) {
        double rho = 0.7, alpha = alpha_of(rho, s);
        Eigen::VectorXcd pos = inner_roots_pos(rho, s);
        for (int i = 0; i < pos.size(); ++i) {
            Complex beta = pos[i];
            CHECK(std::abs(ipos(alpha, beta, 0, rho, s) - 1.0) < 1e-12);
            Complex base = ipos(alpha, beta, 1, rho, s);
            // At a root of P1, base^s = beta.
            CHECK(std::abs(std::pow(base, s) - beta) < 1e-9);
            // And ipos(r) is base^r.
            Complex r3 = ipos(alpha, beta, 3, rho, s);
            CHECK(std::abs(r3 - base * base * base) < 1e-12);
        }
    }
}

TEST_CASE("A(r) is real and positive across the grid") {
    for (int s = 1; s <= 4; ++s) {
        for (double rho : {0.3, 0.6, 0.9}) {
            SpectralData data = solve_spectral(rho, s);
            for (int r = 0; r < s; ++r) CHECK(A_of(data, r) > 0.0);
        }
    }
}

TEST_CASE("limiting rates: frozen reference values") {
    LimitingRates lim = limiting_rates(0.7, 4);
    REQUIRE(lim.lambda2.size() == 4);
    CHECK(lim.lambda1 == doctest::Approx(std::pow(0.7, 5)).epsilon(1e-12));
    CHECK(lim.lambda2[0] == doctest::Approx(2.186607861818515).epsilon(1e-8));
    CHECK(lim.lambda2[1] == doctest::Approx(2.913686190418278).epsilon(1e-8));
    CHECK(lim.lambda2[2] == doctest::Approx(3.013388770361053).epsilon(1e-8));
    CHECK(lim.lambda2[3] == doctest::Approx(2.241100430499918).epsilon(1e-8));

    lim = limiting_rates(0.7, 3);
    REQUIRE(lim.lambda2.size() == 3);
    CHECK(lim.lambda2[0] == doctest::Approx(1.659446003106344).epsilon(1e-8));
    CHECK(lim.lambda2[1] == doctest::Approx(2.2899354675502326).epsilon(1e-8));
    CHECK(lim.lambda2[2] == doctest::Approx(1.7059627934348771).epsilon(1e-8));

    lim = limiting_rates(0.9, 2);
    REQUIRE(lim.lambda2.size() == 2);
    CHECK(lim.lambda2[0] == doctest::Approx(1.7292840751596503).epsilon(1e-8));
    CHECK(lim.lambda2[1] == doctest::Approx(1.6862469514910616).epsilon(1e-8));
}

TEST_CASE("limiting rates telescope: product equals s^s alpha") {
    for (int s = 1; s <= 5; ++s) {
        for (double rho : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
            LimitingRates lim = limiting_rates(rho, s);
            double prod = 1.0;
            for (int r = 0; r < s; ++r) {
                CHECK(lim.lambda2[r] > 0.0);
                prod *= lim.lambda2[r];
            }
            double expect = std::pow(static_cast<double>(s), s) * alpha_of(rho, s);
            CHECK(prod == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("light traffic: inner roots shrink with rho") {
    int s = 3;
    Eigen::VectorXcd pos = inner_roots_pos(0.05, s);
    double alpha = alpha_of(0.05, s);
    for (int i = 0; i < pos.size(); ++i) CHECK(std::abs(pos[i]) < alpha);
    CHECK(std::abs(inner_root_neg(0.05, s)) < alpha);
    CHECK(alpha < 1e-5);  // rho^4
}

}  // TEST_SUITE
