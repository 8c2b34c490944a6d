// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "edgewave/bedrf.hpp"
#include "edgewave/rng.hpp"

using namespace edgewave;

TEST_CASE("kappa arithmetic and range") {
    CHECK(kappa(kPi / 4) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(kappa(kPi / 3) == doctest::Approx(3.0 / 4.0).epsilon(1e-14));
    CHECK(kappa(1e-9) == doctest::Approx(0.5).epsilon(1e-8));  // thin screen limit
    CHECK(kappa(kPi / 2 - 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS(kappa(0.0));
    CHECK_THROWS(kappa(kPi / 2));
    CHECK_THROWS(kappa(-0.3));
}

TEST_CASE("r_param special values") {
    CHECK(r_param(0.3, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r_param(0.0, kPi / 2) == doctest::Approx(0.0));
    CHECK(r_param(0.0, kPi / 2 - 1e-8) < 1e-7);
    // hand evaluation: (1 - 1/2) / (sqrt(3)/2) = 1/sqrt(3)
    CHECK(r_param(0.0, kPi / 6) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    // r = 1 iff equal elevations
    Pcg32 rng(7, 1);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(-1.5, 1.5);
        double b = rng.uniform(-1.5, 1.5);
        double r = r_param(a, b);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        if (std::abs(a - b) > 1e-6) CHECK(r < 1.0);
    }
}

TEST_CASE("f zero cases and high-precision value") {
    // zero numerator at r_log = 0 with distinct cosine terms
    CHECK(*f(0.3, 1.1, 2.0, 0.0, 0.7) == doctest::Approx(0.0).epsilon(1e-14));
    // theta0 == theta1 makes the arc empty
    CHECK(*f(0.9, 0.9, 0.3, -0.5, 0.8) == doctest::Approx(0.0).epsilon(1e-14));
    // frozen 50-digit re-evaluation of the same formula
    double v = *f(-kPi / 2, 3 * kPi / 2, kPi / 4, std::log(1.0 / std::sqrt(3.0)),
                  2.0 / 3.0);
    CHECK(v == doctest::Approx(0.9275448345718994).epsilon(1e-13));
}

TEST_CASE("df_dr closed form") {
    CHECK(*df_dr(0.9, 0.9, 0.3, -0.5, 0.8) == 0.0);
    // frozen high-precision value
    CHECK(*df_dr(0.4, 2.9, 1.1, -0.35, 0.61) ==
          doctest::Approx(0.5091752897854795).epsilon(1e-13));
    // cosh domination kills the derivative as r -> 0
    CHECK(*df_dr(0.4, 2.9, 1.1, -200.0, 0.61) == 0.0);

    // centered finite differences of f, away from singular directions
    Pcg32 rng(11, 2);
    for (int i = 0; i < 2000; ++i) {
        double t0 = rng.uniform(-3, 3), t1 = rng.uniform(-3, 3);
        double th = rng.uniform(-3, 3), rl = rng.uniform(-3, -0.01);
        double kp = rng.uniform(0.51, 0.99);
        double a = kp * (t1 - t0) / 2, b = kp * (th - (t0 + t1) / 2);
        double den = std::pow(std::sinh(kp * rl) * std::sin(a), 2) +
                     std::pow(std::cosh(kp * rl) * std::cos(a) - std::cos(b), 2);
        if (den < 1e-2) continue;
        double h = 1e-5;
        double fd = (*f(t0, t1, th, rl + h, kp) - *f(t0, t1, th, rl - h, kp)) / (2 * h);
        double d = *df_dr(t0, t1, th, rl, kp);
        CHECK(std::abs(d - fd) <= 1e-5 * std::max(1e-4, std::abs(fd)));
    }
}

TEST_CASE("shadow boundary identities") {
    ShadowBoundaries sb = shadow_boundaries(kPi / 2, kPi / 4);
    CHECK(sb.omega_lu == doctest::Approx(-kPi / 2));
    CHECK(sb.omega_lr == doctest::Approx(-kPi));
    CHECK(sb.omega_ru == doctest::Approx(3 * kPi / 2));
    CHECK(sb.omega_rr == doctest::Approx(0.0));

    sb = shadow_boundaries(kPi / 3, kPi / 4);
    CHECK(sb.omega_lu == doctest::Approx(-2 * kPi / 3));
    CHECK(sb.omega_lr == doctest::Approx(-5 * kPi / 6));
    CHECK(sb.omega_ru == doctest::Approx(4 * kPi / 3));
    CHECK(sb.omega_rr == doctest::Approx(kPi / 6));
}

TEST_CASE("kappa-scaled boundaries are symmetric about the wedge plane") {
    Pcg32 rng(3, 3);
    for (int i = 0; i < 200; ++i) {
        double phi = rng.uniform(0.05, kPi / 2 - 0.05);
        double kap = kappa(phi);
        double ti = rng.uniform(-(kPi - phi) + 0.01, kPi - phi - 0.01);
        ShadowBoundaries sb = shadow_boundaries(ti, phi);
        // reflection alpha -> pi - alpha maps ru<->rr and lu<->lr (mod 2 pi)
        double a = wrap_angle(kPi - kap * sb.omega_rr - kap * sb.omega_ru);
        double b = wrap_angle(kPi - kap * sb.omega_lu - kap * sb.omega_lr);
        CHECK(std::abs(a) < 1e-10);
        CHECK(std::abs(b) < 1e-10);
    }
}

TEST_CASE("bedrf frozen values and structure") {
    WedgeAngles w;
    w.phi = kPi / 4;
    w.theta_i = kPi / 2;
    w.varphi_i = 0.0;
    w.theta_o = 0.3;
    w.varphi_o = 0.25;
    auto rd = bedrf_eval(w, BoundaryCondition::Dirichlet);
    auto rn = bedrf_eval(w, BoundaryCondition::Neumann);
    REQUIRE(rd.has_value());
    REQUIRE(rn.has_value());
    // frozen 50-digit re-evaluations; the response is signed
    CHECK(*rd == doctest::Approx(-0.2073724378152413).epsilon(1e-12));
    CHECK(*rn == doctest::Approx(0.3624279303766978).epsilon(1e-12));

    // sign structure: the two conditions differ only in the second term
    double kap = kappa(w.phi);
    ShadowBoundaries sb = shadow_boundaries(w.theta_i, w.phi);
    double rl = std::log(r_param(w.varphi_i, w.varphi_o));
    double t1 = *df_dr(sb.omega_lu, sb.omega_ru, w.theta_o, rl, kap);
    double t2 = *df_dr(sb.omega_lr, sb.omega_rr, w.theta_o, rl, kap);
    CHECK(*rd + *rn == doctest::Approx(t1).epsilon(1e-12));
    CHECK(*rd - *rn == doctest::Approx(t2).epsilon(1e-12));
}

TEST_CASE("bedrf is singular exactly on a shadow boundary") {
    // the visualization configuration puts the reflection boundary at
    // theta_o = 0, and varphi_o = varphi_i puts r at 1: both terms of the
    // denominator vanish together
    WedgeAngles w;
    w.phi = kPi / 4;
    w.theta_i = kPi / 2;
    w.varphi_i = 0.0;
    w.theta_o = 0.0;
    w.varphi_o = 0.0;
    CHECK_FALSE(bedrf_eval(w, BoundaryCondition::Dirichlet).has_value());
}

TEST_CASE("bedrf reciprocity over random tuples") {
    Pcg32 rng(17, 4);
    for (int i = 0; i < 20000; ++i) {
        WedgeAngles w;
        w.phi = rng.uniform(0.05, kPi / 2 - 0.05);
        double lim = kPi - w.phi - 1e-3;
        w.theta_i = rng.uniform(-lim, lim);
        w.theta_o = rng.uniform(-lim, lim);
        w.varphi_i = rng.uniform(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
        w.varphi_o = rng.uniform(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
        WedgeAngles s = w;
        std::swap(s.theta_i, s.theta_o);
        std::swap(s.varphi_i, s.varphi_o);
        for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
            auto r1 = bedrf_eval(w, bc);
            auto r2 = bedrf_eval(s, bc);
            REQUIRE(r1.has_value() == r2.has_value());
            if (r1) {
                CHECK(std::abs(*r1 - *r2) <= 1e-9 * std::max(1.0, std::abs(*r1)));
            }
        }
    }
}

TEST_CASE("keller time solution causality and decay") {
    double c = 344.0;
    double r_star = 2.0;
    double arrival = r_star / c;
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        CHECK(keller_time_solution(0.9, 0.2, -1.5, r_star, kPi / 4, bc,
                                   arrival * 0.9, c) == 0.0);
        CHECK(keller_time_solution(0.9, 0.2, -1.5, r_star, kPi / 4, bc, -1.0, c) ==
              0.0);
        double late = std::abs(
            keller_time_solution(0.9, 0.2, -1.5, r_star, kPi / 4, bc, 5.0, c));
        double mid = std::abs(keller_time_solution(0.9, 0.2, -1.5, r_star, kPi / 4,
                                                   bc, arrival * 1.5, c));
        CHECK(late < 1e-3 * mid);
    }
}

TEST_CASE("keller integral matches quadrature of the density") {
    double c = 344.0, r_star = 2.0, phi = kPi / 4;
    double theta_i = 0.9, varphi_i = 0.2, theta_o = -1.5;
    double t0 = 1.2 * r_star / c, t1 = 1.6 * r_star / c;
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        double exact = keller_time_solution_integral(theta_i, varphi_i, theta_o,
                                                     r_star, phi, bc, t0, t1, c);
        int n = 20000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double t = t0 + (i + 0.5) * (t1 - t0) / n;
            acc += keller_time_solution(theta_i, varphi_i, theta_o, r_star, phi, bc,
                                        t, c);
        }
        acc *= (t1 - t0) / n;
        CHECK(exact == doctest::Approx(acc).epsilon(1e-6));
    }
}
