// SPDX-License-Identifier: Apache-2.0

#include "edgewave/sampler.hpp"

#include <cmath>

namespace edgewave {

namespace {

constexpr double kThetaAClampEps = 1e-6;
constexpr double kArccosClampEps = 1e-9;

// Endpoint derivative of the two circle-function terms at r = 1 for outgoing
// planar angle theta_o; the phi_o-marginal of the response scales with this.
double endpoint_derivative_magnitude(double theta_i, double varphi_i, double theta_o,
                                     double kap, BoundaryCondition bc) {
    double sk = std::sin(kap * kPi);
    double ck = std::cos(kap * kPi);
    double d1 = std::cos(kap * (theta_o - theta_i)) - ck;
    double d2 = std::cos(kap * (theta_o + theta_i)) + ck;
    double t1 = std::abs(d1) > 1e-12 ? sk / (kPi * d1) : sk / (kPi * 1e-12);
    double t2 = std::abs(d2) > 1e-12 ? sk / (kPi * d2) : sk / (kPi * 1e-12);
    double sum = bc == BoundaryCondition::Dirichlet ? t1 + t2 : t1 - t2;
    return std::abs(sum) * sqr(std::cos(varphi_i));
}

// sin(varphi_o) for given r on the lower (varphi_o < varphi_i) or upper branch.
double sin_phi_o_from_r(double r, double varphi_i, bool upper) {
    double si = std::sin(varphi_i);
    double ci = std::cos(varphi_i);
    double rc2 = sqr(r * ci);
    if (upper) {
        double k = sqr(1.0 + si);
        return (k - rc2) / (k + rc2);
    }
    double k = sqr(1.0 - si);
    return (rc2 - k) / (rc2 + k);
}

}  // namespace

double pc_value(double theta_a, double theta_b, double x) {
    double n = (1.0 - x * x) * std::sin(theta_a);
    double base = (1.0 + x * x) * std::cos(theta_a);
    double off = 2.0 * x * std::cos(theta_b);
    return (std::atan2(n, base - off) - std::atan2(n, base + off)) / kPi;
}

double pc_derivative(double theta_a, double theta_b, double x) {
    double sa = std::sin(theta_a);
    double ca = std::cos(theta_a);
    double cb = std::cos(theta_b);
    double n = (1.0 - x * x) * sa;
    double dn = -2.0 * x * sa;
    auto term = [&](double sign) {
        double d = (1.0 + x * x) * ca + sign * 2.0 * x * cb;
        double dd = 2.0 * x * ca + sign * 2.0 * cb;
        return (dn * d - n * dd) / (n * n + d * d);
    };
    return (term(-1.0) - term(+1.0)) / kPi;
}

double pc_derivative_at_one(double theta_a, double theta_b) {
    double sa = std::sin(theta_a);
    double cb = std::cos(theta_b);
    return 2.0 * sa * cb / (kPi * (cb * cb - sqr(std::cos(theta_a))));
}

double pc_inverse(double theta_a, double theta_b, double u) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        if (pc_value(theta_a, theta_b, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double theta_b_from_x(double theta_a, double x) {
    double sa = std::sin(theta_a);
    double v = sa / (kPi * std::max(x, 1e-300));
    v = std::min(v, 0.5);
    double ca = std::cos(theta_a);
    double u = v + std::sqrt(v * v + ca * ca);
    u = clamp(u, ca * (1.0 + kArccosClampEps) + kArccosClampEps,
              1.0 - kArccosClampEps);
    double tb = std::acos(u);
    return std::min(tb, theta_a * (1.0 - kArccosClampEps));
}

double blend_from_x(double theta_a, double x) {
    double e = 1.0 - 2.0 * std::sin(theta_a) / (kPi * std::max(x, 1e-300));
    return clamp(1.0 - 0.5 * std::exp(e), 0.0, 1.0);
}

EdgeSamplerParams compute_params(double theta_i, double varphi_i, double phi,
                                 BoundaryCondition bc) {
    EdgeSamplerParams p;
    p.kappa = kappa(phi);
    p.theta_i = theta_i;
    p.varphi_i = varphi_i;
    p.phi = phi;
    p.bc = bc;
    double tk = std::tan(p.kappa * kPi);  // negative for kappa in (1/2, 1)
    double arg = -sqr(std::cos(varphi_i)) / tk;
    arg = clamp(arg, kThetaAClampEps, 1.0 - kThetaAClampEps);
    p.theta_a = std::asin(arg);
    p.x = (2.0 / kPi) * std::abs(tk) * sqr(std::cos(varphi_i));
    p.theta_b = theta_b_from_x(p.theta_a, p.x);
    p.blend_a = blend_from_x(p.theta_a, p.x);
    return p;
}

PhiParams effective_phi_params(const EdgeSamplerParams& p, double theta_i,
                               double theta_o) {
    double x = endpoint_derivative_magnitude(theta_i, p.varphi_i, theta_o, p.kappa,
                                             p.bc);
    return {theta_b_from_x(p.theta_a, x), blend_from_x(p.theta_a, x)};
}

double pdf_varphi(double varphi_i, double kappa, double theta_a,
                  const PhiParams& pp, double varphi_o) {
    double co = std::cos(varphi_o);
    if (co <= 0.0) return 0.0;
    double p_phi = pp.blend_a / kPi;
    double r = r_param(varphi_i, varphi_o);
    if (r > 0.0) {
        double y = std::pow(r, kappa);
        double pc = pc_derivative(theta_a, pp.theta_b, y);
        p_phi += (1.0 - pp.blend_a) * kappa * y * pc / (2.0 * co);
    }
    return p_phi;
}

double sample_varphi(double varphi_i, double kappa, double theta_a,
                     const PhiParams& pp, Pcg32& rng, bool* used_floor) {
    if (rng.next_double() < pp.blend_a) {
        if (used_floor) *used_floor = true;
        return rng.uniform(-kPi / 2, kPi / 2);
    }
    if (used_floor) *used_floor = false;
    double y = pc_inverse(theta_a, pp.theta_b, rng.next_double());
    double r = std::pow(y, 1.0 / kappa);
    bool upper = rng.next_double() < 0.5;
    double so = sin_phi_o_from_r(r, varphi_i, upper);
    return std::asin(clamp(so, -1.0, 1.0));
}

double pdf(double theta_i, double varphi_i, double theta_o, double varphi_o,
           double phi, const EdgeSamplerParams& params) {
    double p_theta = 1.0 / (2.0 * (kPi - phi));
    double co = std::cos(varphi_o);
    if (co <= 0.0) return 0.0;
    PhiParams pp = effective_phi_params(params, theta_i, theta_o);
    double p_phi = pdf_varphi(varphi_i, params.kappa, params.theta_a, pp, varphi_o);
    return p_theta * p_phi / co;
}

DirectionSample sample_edge_direction(double theta_i, double varphi_i, double phi,
                                      const EdgeSamplerParams& params, Pcg32& rng) {
    DirectionSample s;
    s.theta_o = rng.uniform(phi - kPi, kPi - phi);
    PhiParams pp = effective_phi_params(params, theta_i, s.theta_o);
    bool floor_branch = false;
    s.varphi_o = sample_varphi(varphi_i, params.kappa, params.theta_a, pp, rng,
                               &floor_branch);
    s.from_uniform_floor = floor_branch;
    s.pdf = pdf(theta_i, varphi_i, s.theta_o, s.varphi_o, phi, params);
    return s;
}

SurfaceSample sample_surface(const Vec3& incident, const Vec3& normal,
                             const Material& material, Pcg32& rng) {
    SurfaceSample s;
    if (rng.next_double() < material.specularity) {
        s.specular = true;
        s.direction = (incident - 2.0 * dot(incident, normal) * normal).normalized();
        s.pdf = material.specularity;
        return s;
    }
    // cosine-weighted hemisphere about the normal
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    double rad = std::sqrt(u1);
    double ang = kTwoPi * u2;
    Vec3 t = std::abs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = cross(normal, t).normalized();
    Vec3 v = cross(normal, u);
    double zc = std::sqrt(std::max(0.0, 1.0 - u1));
    s.direction = (rad * std::cos(ang) * u + rad * std::sin(ang) * v + zc * normal)
                      .normalized();
    s.pdf = surface_pdf(normal, material, s.direction);
    return s;
}

double surface_pdf(const Vec3& normal, const Material& material, const Vec3& out) {
    double c = dot(normal, out);
    if (c <= 0.0) return 0.0;
    return (1.0 - material.specularity) * c / kPi;
}

}  // namespace edgewave
