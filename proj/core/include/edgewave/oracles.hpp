// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "edgewave/rng.hpp"
#include "edgewave/transport.hpp"

namespace edgewave::oracles {

// Piecewise-constant circle function, complex form:
// (arg((x - e^{i t1}) / (x - e^{i t0})) - (t1 - t0)/2) / pi.
// 1 on the arc (t0, t1) of the unit circle, 0 on the complement, harmonic
// measure of the arc inside the disk. Throws at the two singular points.
double fc_complex(double theta0, double theta1, std::complex<double> x);

// Same function through the real arctangent expression; agrees with
// fc_complex inside the disk.
double fc_real_form(double theta0, double theta1, std::complex<double> x);

// Analytic description of a single (numerically infinite) wedge for the
// deterministic quadrature references.
struct WedgeGeom {
    Vec3 origin;      // a point on the edge
    WedgeFrame frame; // t along the edge
    double z_min = 0.0, z_max = 0.0;  // edge extent along frame.t
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

WedgeGeom wedge_geom_from_edge(const Scene& scene, int edge_index);

// Plane-impulse incidence with direction given by (theta_i, varphi_i) in the
// wedge frame. Time zero is the wavefront passing the listener's stationary
// edge point; bin k integrates response over [k/rate, (k+1)/rate).
std::vector<double> edge_quadrature_plane(const WedgeGeom& wedge, double theta_i,
                                          double varphi_i, const Vec3& listener,
                                          double sample_rate, int bins, int steps,
                                          double sound_speed);

// Keller closed form binned on the same grid (exact step-difference integrals)
// for the listener implied by (theta_o, r_star) under the canonical alignment.
std::vector<double> keller_binned(double theta_i, double varphi_i, double theta_o,
                                  double r_star, double phi, BoundaryCondition bc,
                                  double sample_rate, int bins, double sound_speed);

// Point-source first-order quadrature: amplitude/R_s incidence, absolute
// delays (R_s + R)/c; occlusion aware via the scene.
std::vector<double> edge_quadrature_point(const Scene& scene, const WedgeGeom& wedge,
                                          const Vec3& source, const Vec3& listener,
                                          double sample_rate, int bins, int steps,
                                          const MediaTerm& media, double source_amp);

// Deterministic second-order reference: nested quadrature of rho1 * rho2 with
// media terms over two edges.
std::vector<double> double_edge_quadrature_point(const Scene& scene,
                                                 const WedgeGeom& e1,
                                                 const WedgeGeom& e2,
                                                 const Vec3& source,
                                                 const Vec3& listener,
                                                 double sample_rate, int bins,
                                                 int steps, const MediaTerm& media,
                                                 double source_amp);

// Classical normalized single-slit intensity for far-field positions on a
// screen at the given distance.
std::vector<double> single_slit_pattern(double slit_width, double wavelength,
                                        double screen_distance,
                                        const std::vector<double>& positions);

// Uniform-area samples on the edge's two neighbor triangles, rejected when
// invisible from origin, projected through the opposite vertex onto the edge.
// Returns the histogram over `bins` equal sub-intervals of the edge.
std::vector<double> bruteforce_triangle_projection(const Scene& scene,
                                                   const ConvexEdge& edge,
                                                   const Vec3& origin, int n_samples,
                                                   int bins, Pcg32& rng);

// Predicted projection density on the same histogram grid from
// measure_conversion, scaled to the sample total of `hist`.
std::vector<double> predicted_projection_density(const Scene& scene,
                                                 const ConvexEdge& edge,
                                                 const Vec3& origin, int bins,
                                                 double total_mass);

}  // namespace edgewave::oracles
