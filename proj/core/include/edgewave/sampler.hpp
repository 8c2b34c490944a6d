// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "edgewave/bedrf.hpp"
#include "edgewave/math.hpp"
#include "edgewave/rng.hpp"

namespace edgewave {

// Parameters of the outgoing-direction sampler at an edge interaction.
// theta_a depends only on (kappa, varphi_i). theta_b, blend_a and x stored
// here are reference values at the design anchor dPc/dx(1) = -(2/pi) tan(kappa pi);
// pdf() and sample_edge_direction() sharpen them per outgoing theta_o from the
// endpoint derivative of the response at r = 1 (see effective_phi_params).
struct EdgeSamplerParams {
    double kappa = 0.0;
    double theta_a = 0.0;
    double theta_b = 0.0;
    double blend_a = 1.0;           // weight of the uniform floor, in [0,1]
    double x = 0.0;                 // |dP_phi/d(r^kappa)(1)| reference magnitude
    double theta_i = 0.0;
    double varphi_i = 0.0;
    double phi = 0.0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

struct DirectionSample {
    double theta_o = 0.0;
    double varphi_o = 0.0;
    double pdf = 0.0;               // per steradian; exact for non-delta branches
    bool from_uniform_floor = false;
    bool specular = false;          // surface sampler only
};

struct Material {
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    double reflection = 0.0;        // amplitude coefficient in [0,1]
    double specularity = 0.0;       // probability mass of the mirror branch
};

// Monotone CDF on [0,1] built from the circle function, with P'(1) = -P''(1).
double pc_value(double theta_a, double theta_b, double x);
double pc_derivative(double theta_a, double theta_b, double x);
double pc_derivative_at_one(double theta_a, double theta_b);
// Inverse by bisection; converges below 1e-12 within 60 iterations.
double pc_inverse(double theta_a, double theta_b, double u);

// theta_b solving dPc/dx(1) = x, with sin(theta_a)/(pi x) replaced by
// min{., 1/2} and the arccos argument clamped into the open interval.
double theta_b_from_x(double theta_a, double x);
// Uniform-floor weight a = 1 - e^{1 - 2 sin(theta_a)/(pi x)} / 2, clamped to [0,1].
double blend_from_x(double theta_a, double x);

EdgeSamplerParams compute_params(double theta_i, double varphi_i, double phi,
                                 BoundaryCondition bc);

// Per-theta_o refinement of (theta_b, a) from the endpoint derivative of the
// response at r = 1 along that outgoing plane.
struct PhiParams {
    double theta_b = 0.0;
    double blend_a = 1.0;
};
PhiParams effective_phi_params(const EdgeSamplerParams& params, double theta_i,
                               double theta_o);

// Marginal density of varphi_o (integrates to 1 over (-pi/2, pi/2)):
// a/pi + (1-a) kappa r^kappa pc(r^kappa) / (2 cos varphi_o).
double pdf_varphi(double varphi_i, double kappa, double theta_a,
                  const PhiParams& pp, double varphi_o);
double sample_varphi(double varphi_i, double kappa, double theta_a,
                     const PhiParams& pp, Pcg32& rng, bool* used_floor = nullptr);

// Joint density of (theta_o, varphi_o) per steradian:
// p = p_theta * p_phi / cos(varphi_o) with p_theta uniform over (phi-pi, pi-phi)
// and p_phi the blend of a uniform floor (density 1/pi) with the Pc branch
// kappa r^kappa pc(r^kappa) / (2 cos varphi_o), split evenly across the two
// varphi_o roots of r.
double pdf(double theta_i, double varphi_i, double theta_o, double varphi_o,
           double phi, const EdgeSamplerParams& params);

DirectionSample sample_edge_direction(double theta_i, double varphi_i, double phi,
                                      const EdgeSamplerParams& params, Pcg32& rng);

// Surface scattering: ideal-specular / cosine-weighted-diffuse mixture.
// incident is the unit propagation direction into the surface; normal the unit
// outward surface normal. The returned sample stores the world direction in
// (theta_o, varphi_o)-free form via out_direction.
struct SurfaceSample {
    Vec3 direction;
    double pdf = 0.0;               // per steradian for the diffuse branch
    bool specular = false;
};

SurfaceSample sample_surface(const Vec3& incident, const Vec3& normal,
                             const Material& material, Pcg32& rng);

// Density of the diffuse branch of the surface sampler for a given outgoing
// direction (0 if below the hemisphere). The specular branch is a delta and
// carries its discrete probability separately.
double surface_pdf(const Vec3& normal, const Material& material, const Vec3& out);

}  // namespace edgewave
