#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "jops/family.hpp"
#include "jops/rng.hpp"
#include "jops/transfer.hpp"

using jops::CoefficientFamily;
using jops::cplx;
using jops::SolutionPath;
using jops::Transfer2;

namespace {

CoefficientFamily free_family() {
    return CoefficientFamily("custom", 1, {}, [](long) {
        jops::BlockPair p{jops::Mat(1), jops::Herm(1)};
        p.A(0, 0) = 1.0;
        return p;
    });
}

// u_n reconstructed at natural scale; valid while the path magnitude fits a double.
cplx value_at(const SolutionPath& p, long n) {
    double la = p.log_abs(n);
    if (la == -std::numeric_limits<double>::infinity()) return cplx(0, 0);
    return p.direction(n) * std::exp(la);
}

// Largest relative three-term residual over the interior of the path.
double max_relative_residual(const CoefficientFamily& f, const SolutionPath& p) {
    double worst = 0.0;
    for (long n = 2; n < p.size(); ++n) {
        double base = std::max({p.log_abs(n - 1), p.log_abs(n), p.log_abs(n + 1)});
        if (base == -std::numeric_limits<double>::infinity()) continue;
        auto scaled = [&](long m) {
            double la = p.log_abs(m);
            if (la == -std::numeric_limits<double>::infinity()) return cplx(0, 0);
            return p.direction(m) * std::exp(la - base);
        };
        cplx r = f.a_of(n - 1) * scaled(n - 1) + f.b_of(n) * scaled(n) +
                 f.a_of(n) * scaled(n + 1) - p.lambda * scaled(n);
        double local = std::abs(f.a_of(n - 1)) + std::abs(f.b_of(n)) + std::abs(f.a_of(n)) +
                       std::abs(p.lambda);
        worst = std::max(worst, std::abs(r) / local);
    }
    return worst;
}

}  // namespace

TEST_CASE("one-step propagator entries") {
    CoefficientFamily f = jops::scalar_power(1.0);
    Transfer2 t = jops::transfer_step(f, 2, 0.0);
    REQUIRE(t.a11 == cplx(0, 0));
    REQUIRE(t.a12 == cplx(1, 0));
    REQUIRE(t.a21 == cplx(-0.5, 0));
    REQUIRE(t.a22 == cplx(0, 0));
    REQUIRE_THROWS_AS(jops::transfer_step(f, 1, 0.0), jops::domain_error);
}

TEST_CASE("one-step determinant is the coefficient ratio") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    jops::Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        long n = 2 + rng.integer(0, 500);
        double lambda = rng.uniform(-5.0, 5.0);
        Transfer2 m = jops::transfer_step(f, n, lambda);
        double expect = f.a_of(n - 1) / f.a_of(n);
        REQUIRE(std::abs(m.det() - cplx(expect, 0)) < 1e-14 * (1.0 + expect));
    }
}

TEST_CASE("sparse-diagonal one-step row") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    Transfer2 t = jops::transfer_step(f, 3, 2.0);
    REQUIRE(t.a21.real() == Catch::Approx(-std::pow(2.0 / 3.0, 0.75)).epsilon(1e-14));
    REQUIRE(t.a22.real() ==
            Catch::Approx((2.0 - std::pow(3.0, 0.75)) / std::pow(3.0, 0.75)).epsilon(1e-14));
}

TEST_CASE("two-step product starts with the odd-step row") {
    CoefficientFamily f = jops::heuristic2step(0.8, 0.3);
    for (long n : {2L, 7L, 40L}) {
        Transfer2 s = jops::kstep_product(f, n, 2, 1.3);
        double a_prev = f.a_of(2 * n - 2), a_odd = f.a_of(2 * n - 1), b_odd = f.b_of(2 * n - 1);
        REQUIRE(std::abs(s.a11 - cplx(-a_prev / a_odd, 0)) < 1e-12);
        REQUIRE(std::abs(s.a12 - cplx((1.3 - b_odd) / a_odd, 0)) < 1e-12);
    }
    REQUIRE_THROWS_AS(jops::kstep_product(f, 2, 4, 0.0), jops::domain_error);
    REQUIRE_THROWS_AS(jops::kstep_product(f, 1, 2, 0.0), jops::domain_error);
}

TEST_CASE("three-step determinant identity") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    for (double lambda : {-2.0, 1.0, 5.0}) {
        double worst = 0.0;
        for (long n = 2; n <= 500; ++n) {
            Transfer2 s = jops::kstep_product(f, n, 3, lambda);
            worst = std::max(worst,
                             std::abs(s.det() - cplx(jops::step3_det_form(0.75, n), 0)));
        }
        REQUIRE(worst < 1e-12);
    }
}

TEST_CASE("three-step trace asymptotic") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    double C = 0.0;
    for (long n = 10; n <= 10000; ++n) {
        Transfer2 s = jops::kstep_product(f, n, 3, 1.0);
        double form = jops::step3_trace_form(0.75, 1.0, 1.0, n);
        C = std::max(C, std::abs(s.tr() - cplx(form, 0)) * std::pow(double(n), 1.5));
    }
    REQUIRE(C <= 10.0);
}

TEST_CASE("2x2 eigenvalues on closed forms") {
    Transfer2 m;
    m.a11 = 0.0;
    m.a12 = -1.0;
    m.a21 = 1.0;
    m.a22 = 1.0;
    auto [e1, e2] = jops::eig_2x2(m);
    REQUIRE(e1.real() == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(std::abs(e1.imag()) == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-14));
    REQUIRE(std::abs(e1) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(std::abs(e2) == Catch::Approx(1.0).margin(1e-14));

    Transfer2 id;
    id.a11 = 1.0;
    id.a12 = 0.0;
    id.a21 = 0.0;
    id.a22 = 1.0;
    auto [i1, i2] = jops::eig_2x2(id);
    REQUIRE(std::abs(i1 - cplx(1, 0)) < 1e-15);
    REQUIRE(std::abs(i2 - cplx(1, 0)) < 1e-15);
}

TEST_CASE("2x2 eigenvalues reconstruct trace and determinant") {
    jops::Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        Transfer2 m;
        m.a11 = rng.cnormal();
        m.a12 = rng.cnormal();
        m.a21 = rng.cnormal();
        m.a22 = rng.cnormal();
        auto [e1, e2] = jops::eig_2x2(m);
        REQUIRE(std::abs(e1 + e2 - m.tr()) < 1e-12);
        REQUIRE(std::abs(e1 * e2 - m.det()) < 1e-12);
    }
}

TEST_CASE("conjugate pair moduli match the determinant") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    long pairs = 0;
    for (long n = 5; n <= 500; ++n) {
        Transfer2 s = jops::kstep_product(f, n, 3, 1.0);
        cplx h = 0.5 * s.tr();
        if ((h * h - s.det()).real() < 0.0) {
            auto [e1, e2] = jops::eig_2x2(s);
            REQUIRE(std::abs(std::norm(e1) - s.det().real()) < 1e-10);
            REQUIRE(std::abs(std::norm(e2) - s.det().real()) < 1e-10);
            ++pairs;
        }
    }
    REQUIRE(pairs > 400);  // the regime is complex for nearly all n here
}

TEST_CASE("asymptotic splitting satisfies the hypotheses for large gaps") {
    CoefficientFamily f = jops::step3(0.75, 3.0);
    auto [vs, rs] = jops::step3_splitting(f, 1.0, 10, 10000);
    jops::LevinsonReport rep = jops::levinson_hypotheses(vs, rs, 10, 10000);
    REQUIRE(rep.pass);
    REQUIRE(rep.det_nonvanishing);
    REQUIRE(rep.bv_summable);
    REQUIRE(rep.l1_summable);
    REQUIRE(rep.bv_fit_exponent <= -1.0);
    REQUIRE(rep.l1_fit_exponent == Catch::Approx(-1.5).margin(0.1));
    REQUIRE(rep.eigs_distinct);
    REQUIRE(rep.moduli_distinct);
    REQUIRE_FALSE(rep.flag_equal_moduli_distinct_eigs);
    // limit eigenvalues (3 +- sqrt(5))/2
    double big = (3.0 + std::sqrt(5.0)) / 2.0;
    REQUIRE(std::abs(rep.vinf_eig1) == Catch::Approx(big).margin(1e-2));
}

TEST_CASE("asymptotic splitting flags the oscillatory regime") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    auto [vs, rs] = jops::step3_splitting(f, 1.0, 10, 10000);
    jops::LevinsonReport rep = jops::levinson_hypotheses(vs, rs, 10, 10000);
    REQUIRE_FALSE(rep.pass);
    REQUIRE(rep.flag_equal_moduli_distinct_eigs);
    REQUIRE(rep.eigs_distinct);
    REQUIRE_FALSE(rep.moduli_distinct);
    REQUIRE(rep.l1_fit_exponent == Catch::Approx(-1.5).margin(0.1));
    // the limit matrix is estimated at the window edge, so moduli sit within O(1/n) of 1
    REQUIRE(std::abs(rep.vinf_eig1) == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("splitting requires the sparse-diagonal family") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    REQUIRE_THROWS_AS(jops::step3_splitting(f, 1.0, 10, 100), jops::domain_error);
}

TEST_CASE("recursion on the free lattice is periodic") {
    CoefficientFamily f = free_family();
    SolutionPath p = jops::solve_recursion(f, 0.0, {cplx(1, 0), cplx(0, 0)}, 101, true);
    // u_{n+1} = -u_{n-1}: pattern 1, 0, -1, 0, 1, ...
    REQUIRE(value_at(p, 1) == cplx(1, 0));
    REQUIRE(value_at(p, 3) == cplx(-1, 0));
    REQUIRE(value_at(p, 5) == cplx(1, 0));
    REQUIRE(value_at(p, 2) == cplx(0, 0));
    REQUIRE(value_at(p, 100) == cplx(0, 0));
    REQUIRE(value_at(p, 101) == cplx(1, 0));
}

TEST_CASE("forward path satisfies the three-term recursion") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    SolutionPath p = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0.3, -0.2)}, 400, true);
    REQUIRE(max_relative_residual(f, p) < 1e-9);
}

TEST_CASE("backward path satisfies the recursion and decays forward") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    SolutionPath p = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0, 0)}, 10000, false);
    REQUIRE(max_relative_residual(f, p) < 1e-9);
    // renormalized so the head is O(1), the path is tiny at the far end
    REQUIRE(p.log_abs(10000) < p.log_abs(1) - 10.0);
}

TEST_CASE("recursion input validation and overflow guard") {
    CoefficientFamily f = free_family();
    REQUIRE_THROWS_AS(jops::solve_recursion(f, 0.0, {cplx(1, 0), cplx(0, 0)}, 2, true),
                      jops::domain_error);
    CoefficientFamily g = jops::prop6();
    REQUIRE_THROWS_AS(jops::solve_recursion(g, 0.0, {cplx(1, 0), cplx(0, 0)}, 10, true),
                      jops::domain_error);
}

TEST_CASE("ratio trace of two generic solutions stays bounded") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    SolutionPath u = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0, 0)}, 10000, true);
    SolutionPath v = jops::solve_recursion(f, 1.0, {cplx(0, 0), cplx(1, 0)}, 10000, true);
    jops::SubordinacyTrace trace = jops::subordinacy_ratio(u, v);
    REQUIRE(trace.trend == "bounded-oscillating");
    REQUIRE(trace.checkpoints.front() == 100);
    REQUIRE(trace.checkpoints.back() == 10000);
    REQUIRE(trace.ratios.size() == trace.checkpoints.size());
}

TEST_CASE("ratio trace detects the decaying solution") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    SolutionPath u = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0, 0)}, 10000, false);
    SolutionPath v = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0, 0)}, 10000, true);
    jops::SubordinacyTrace trace = jops::subordinacy_ratio(u, v);
    REQUIRE(trace.trend == "to-zero");
}

TEST_CASE("ratio trace rejects dependent solutions") {
    CoefficientFamily f = jops::step3(0.75, 1.0);
    SolutionPath u = jops::solve_recursion(f, 1.0, {cplx(1, 0), cplx(0.5, 0)}, 500, true);
    SolutionPath v = jops::solve_recursion(f, 1.0, {cplx(2, 0), cplx(1, 0)}, 500, true);
    REQUIRE_THROWS_AS(jops::subordinacy_ratio(u, v), jops::domain_error);
    SolutionPath w = jops::solve_recursion(jops::example1(0.75, 1.0), 1.0,
                                           {cplx(0, 0), cplx(1, 0)}, 500, true);
    REQUIRE_THROWS_AS(jops::subordinacy_ratio(u, w), jops::domain_error);  // family mismatch
}

TEST_CASE("Wronskian of two solutions is constant") {
    CoefficientFamily f = jops::example1(0.75, 1.0);
    SolutionPath u = jops::solve_recursion(f, 0.7, {cplx(1, 0), cplx(0, 0)}, 300, true);
    SolutionPath v = jops::solve_recursion(f, 0.7, {cplx(0, 0), cplx(1, 0)}, 300, true);
    cplx w_ref;
    for (long n = 1; n < 300; ++n) {
        cplx t1 = value_at(u, n) * value_at(v, n + 1);
        cplx t2 = value_at(u, n + 1) * value_at(v, n);
        cplx w = f.a_of(n) * (t1 - t2);
        // cancellation between the two products bounds the achievable accuracy, so
        // compare at the scale of the operands rather than of the tiny constant
        double scale = std::abs(f.a_of(n)) * (std::abs(t1) + std::abs(t2)) + std::abs(w_ref);
        if (n == 1)
            w_ref = w;
        else
            REQUIRE(std::abs(w - w_ref) <= 1e-12 * scale);
    }
}

TEST_CASE("log product of unit factors vanishes") {
    std::vector<cplx> ones(100, cplx(1, 0));
    jops::LogProduct lp = jops::log_product(ones, 1, 101);
    REQUIRE(lp.log_modulus == 0.0);
    REQUIRE(lp.phase == 0.0);
}

TEST_CASE("log product telescopes on the modulus sequence") {
    // mu_k = (1 - 1/k)^{0.375}: sum of logs telescopes to 0.375 log((n0-1)/(n-1))
    long n0 = 2, n = 10000;
    std::vector<cplx> mu;
    for (long k = n0; k < n; ++k)
        mu.push_back(cplx(std::pow(1.0 - 1.0 / double(k), 0.375), 0));
    jops::LogProduct lp = jops::log_product(mu, n0, n);
    double expect = 0.375 * std::log(double(n0 - 1) / double(n - 1));
    REQUIRE(std::abs(lp.log_modulus - expect) < 1e-10);
}

TEST_CASE("log product rejects zero factors with the failing index") {
    std::vector<cplx> mu{cplx(0, 0), cplx(1, 0)};
    try {
        jops::log_product(mu, 1, 3);
        FAIL("expected domain_error");
    } catch (const jops::domain_error& e) {
        REQUIRE(std::string(e.what()).find("index 1") != std::string::npos);
    }
    REQUIRE_THROWS_AS(jops::log_product(mu, 3, 3), jops::domain_error);
}

TEST_CASE("two-step branch validation") {
    REQUIRE_THROWS_AS(jops::heuristic2step_branch(0.8, 0.3, 0.0, 5, +1), jops::domain_error);
    REQUIRE_THROWS_AS(jops::heuristic2step_branch(0.8, 0.3, -1.0, 5, -1), jops::domain_error);
    REQUIRE_THROWS_AS(jops::heuristic2step_branch(0.8, 0.3, 1.0, 0, +1), jops::domain_error);
}

TEST_CASE("two-step branch drift follows the predicted exponent") {
    // decaying branch of the two-step heuristic: drift of the log-modulus grows
    // like n^{1 - alpha + beta/2}
    double alpha = 0.8, beta = 0.3;
    std::vector<cplx> mu;
    long k0 = 10, k1 = 100000;
    for (long k = k0; k < k1; ++k) mu.push_back(jops::heuristic2step_branch(alpha, beta, 1.0, k, +1));
    std::vector<double> xs, ys;
    double run = 0.0;
    long k = k0;
    for (const cplx& m : mu) {
        run += std::log(std::abs(m));
        ++k;
        if (k % 10000 == 0) {
            xs.push_back(std::log(double(k)));
            ys.push_back(std::log(-run));
        }
    }
    double slope = jops::fit_log_slope(xs, ys);
    REQUIRE(slope == Catch::Approx(1.0 - alpha + beta / 2.0).margin(0.05));
}

TEST_CASE("two-step discriminant cancellation at the predicted scale") {
    // ((tr/2)^2 - det) * (2n)^{2 alpha} / (lambda b_{2n-1}) -> 1
    CoefficientFamily f = jops::heuristic2step(0.8, 0.3);
    long n = 100000;
    Transfer2 s = jops::kstep_product(f, n, 2, 1.0);
    cplx h = 0.5 * s.tr();
    cplx disc = h * h - s.det();
    double scale = std::pow(2.0 * double(n), 1.6) / (1.0 * f.b_of(2 * n - 1));
    cplx w = disc * scale;
    REQUIRE(w.real() == Catch::Approx(1.0).margin(0.1));
    REQUIRE(std::abs(w.imag()) < 1e-10);
}
