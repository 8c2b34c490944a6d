// SPDX-License-Identifier: Apache-2.0

#include "edgewave/bedrf.hpp"

#include <cmath>
#include <stdexcept>

namespace edgewave {

namespace {

constexpr double kSingularDen = 1e-18;

// Arguments common to f and df_dr: half-span A and offset B, kappa-scaled.
struct FcArgs {
    double a;  // kappa (theta1 - theta0) / 2
    double b;  // kappa (theta - (theta0 + theta1) / 2)
};

inline FcArgs fc_args(double theta0, double theta1, double theta, double kap) {
    return {kap * (theta1 - theta0) / 2.0, kap * (theta - (theta0 + theta1) / 2.0)};
}

}  // namespace

double kappa(double phi) {
    if (!(phi > 0.0 && phi < kPi / 2)) {
        throw std::invalid_argument("kappa: half-wedge angle must lie in (0, pi/2)");
    }
    return kPi / (2.0 * kPi - 2.0 * phi);
}

double r_param(double varphi_i, double varphi_o) {
    double ci = std::cos(varphi_i);
    double co = std::cos(varphi_o);
    if (ci <= 0.0 || co <= 0.0) return 0.0;  // |varphi| = pi/2 limit
    double si = std::sin(varphi_i);
    double so = std::sin(varphi_o);
    double r = (1.0 - si * so - std::abs(si - so)) / (ci * co);
    return clamp(r, 0.0, 1.0);
}

ShadowBoundaries shadow_boundaries(double theta_i, double phi) {
    return {theta_i - kPi, -theta_i - kPi + 2.0 * phi, theta_i + kPi,
            -theta_i + kPi - 2.0 * phi};
}

std::optional<double> f(double theta0, double theta1, double theta, double r_log,
                        double kappa) {
    auto [a, b] = fc_args(theta0, theta1, theta, kappa);
    double big_r = std::exp(kappa * r_log);
    double num = (1.0 - big_r * big_r) * std::sin(a);
    double den = (1.0 + big_r * big_r) * std::cos(a) - 2.0 * big_r * std::cos(b);
    if (num == 0.0 && std::abs(den) < 1e-15) return std::nullopt;
    return std::atan2(num, den) / kPi;
}

std::optional<double> df_dr(double theta0, double theta1, double theta, double r_log,
                            double kappa) {
    auto [a, b] = fc_args(theta0, theta1, theta, kappa);
    double sa = std::sin(a);
    if (sa == 0.0) return 0.0;
    double x = kappa * r_log;
    if (std::abs(x) > 60.0) return 0.0;  // cosh dominates, value underflows
    double ch = std::cosh(x);
    double sh = std::sinh(x);
    double ca = std::cos(a);
    double cb = std::cos(b);
    double num = kappa * sa * (ch * cb - ca);
    double den = sqr(sh * sa) + sqr(ch * ca - cb);
    if (den < kSingularDen) return std::nullopt;
    return num / (kPi * den);
}

std::optional<double> bedrf_eval(const WedgeAngles& w, BoundaryCondition bc) {
    double kap = kappa(w.phi);
    double r = r_param(w.varphi_i, w.varphi_o);
    if (r <= 0.0) return 0.0;  // grazing along the edge carries no response
    double r_log = std::log(r);
    ShadowBoundaries sb = shadow_boundaries(w.theta_i, w.phi);
    auto t1 = df_dr(sb.omega_lu, sb.omega_ru, w.theta_o, r_log, kap);
    auto t2 = df_dr(sb.omega_lr, sb.omega_rr, w.theta_o, r_log, kap);
    if (!t1 || !t2) return std::nullopt;
    return bc == BoundaryCondition::Dirichlet ? 0.5 * (*t1 + *t2) : 0.5 * (*t1 - *t2);
}

namespace {

// r(t) of the canonical Keller geometry; 1 at/before first arrival.
inline double keller_r(double varphi_i, double listener_distance, double t,
                       double sound_speed, double* sqrt_s2_d2) {
    double ci = std::cos(varphi_i);
    double si = std::sin(varphi_i);
    double d = listener_distance * ci;
    double s = (sound_speed * t - listener_distance * si * si) / ci;
    if (s <= d) {
        if (sqrt_s2_d2) *sqrt_s2_d2 = 0.0;
        return 1.0;
    }
    double root = std::sqrt(s * s - d * d);
    if (sqrt_s2_d2) *sqrt_s2_d2 = root;
    return (s - root) / d;
}

}  // namespace

double keller_time_solution(double theta_i, double varphi_i, double theta_o,
                            double listener_distance, double phi,
                            BoundaryCondition bc, double t, double sound_speed) {
    double kap = kappa(phi);
    double root = 0.0;
    double r = keller_r(varphi_i, listener_distance, t, sound_speed, &root);
    if (root <= 0.0) return 0.0;  // before first arrival
    double r_log = std::log(r);
    double dlnr_dt = -sound_speed / (root * std::cos(varphi_i));
    ShadowBoundaries sb = shadow_boundaries(theta_i, phi);
    auto t1 = df_dr(sb.omega_ru, sb.omega_lu, theta_o, r_log, kap);
    auto t2 = df_dr(sb.omega_rr, sb.omega_lr, theta_o, r_log, kap);
    if (!t1 || !t2) return 0.0;
    double sum = bc == BoundaryCondition::Dirichlet ? (*t1 + *t2) : (*t1 - *t2);
    return dlnr_dt * sum;
}

double keller_time_solution_integral(double theta_i, double varphi_i, double theta_o,
                                     double listener_distance, double phi,
                                     BoundaryCondition bc, double t0, double t1,
                                     double sound_speed) {
    double kap = kappa(phi);
    ShadowBoundaries sb = shadow_boundaries(theta_i, phi);
    auto step = [&](double t) -> double {
        double r = keller_r(varphi_i, listener_distance, t, sound_speed, nullptr);
        double r_log = std::log(r);
        auto a = f(sb.omega_ru, sb.omega_lu, theta_o, r_log, kap);
        auto b = f(sb.omega_rr, sb.omega_lr, theta_o, r_log, kap);
        if (!a || !b) return 0.0;
        return bc == BoundaryCondition::Dirichlet ? (*a + *b) : (*a - *b);
    };
    return step(t1) - step(t0);
}

}  // namespace edgewave
