// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "edgewave/math.hpp"

namespace edgewave {

enum class BoundaryCondition { Dirichlet, Neumann };

// The four local angles of a wedge interaction plus the half-wedge angle.
// theta_i/theta_o live in (phi-pi, pi-phi), varphi_i/varphi_o in (-pi/2, pi/2),
// and phi in (0, pi/2). theta is measured from the exterior bisector n toward b;
// varphi is the elevation along the edge axis, with the incident and outgoing
// elevations measured with the same axis sense so that the diffraction cone
// (edge-parallel wavevector preserved) is varphi_o == varphi_i.
struct WedgeAngles {
    double theta_i = 0.0;
    double varphi_i = 0.0;
    double theta_o = 0.0;
    double varphi_o = 0.0;
    double phi = 0.0;  // half-wedge angle

    bool valid() const {
        double lim = kPi - phi;
        return phi > 0.0 && phi < kPi / 2 && theta_i > -lim && theta_i < lim &&
               theta_o > -lim && theta_o < lim && std::abs(varphi_i) < kPi / 2 &&
               std::abs(varphi_o) < kPi / 2;
    }
};

// Shadow-boundary directions for incident angle theta_i on a wedge of
// half-angle phi. l/r selects the half-plane, u/r unoccluded vs reflected.
struct ShadowBoundaries {
    double omega_lu;
    double omega_lr;
    double omega_ru;
    double omega_rr;
};

// kappa = pi / (2 pi - 2 phi), in (1/2, 1) for phi in (0, pi/2).
double kappa(double phi);

// r = (1 - sin vi sin vo - |sin vi - sin vo|) / (cos vi cos vo), in [0, 1].
// r == 1 iff varphi_i == varphi_o; r -> 0 as either elevation tends to +-pi/2.
double r_param(double varphi_i, double varphi_o);

ShadowBoundaries shadow_boundaries(double theta_i, double phi);

// Piecewise-constant circle function evaluated at radius e^{kappa r_log} and
// angle theta (both scaled by kappa). Equals the harmonic measure of the arc
// (theta0, theta1); on the circle itself it is the arc indicator. Returns
// nullopt at the singular arc endpoints.
std::optional<double> f(double theta0, double theta1, double theta, double r_log,
                        double kappa);

// Closed-form derivative of f with respect to r_log. Returns nullopt when the
// evaluation point coincides with a shadow-boundary singularity.
std::optional<double> df_dr(double theta0, double theta1, double theta, double r_log,
                            double kappa);

// Signed edge diffraction response. Per unit edge length; spherical 1/R
// spreading is carried separately by the media term. Returns nullopt on a
// shadow-boundary singularity (caller applies outlier handling).
std::optional<double> bedrf_eval(const WedgeAngles& angles, BoundaryCondition bc);

// Time-domain Keller wedge solution for an incident plane impulse, evaluated
// at the listener implied by (theta_o, R*) with the canonical alignment: the
// wavefront touches the coordinate origin on the edge at t = 0 and the origin
// is the listener's stationary (first-arrival) edge point, so the first
// arrival is at t = R*/c. Zero before arrival.
double keller_time_solution(double theta_i, double varphi_i, double theta_o,
                            double listener_distance, double phi,
                            BoundaryCondition bc, double t, double sound_speed);

// Integral of the Keller solution over [t0, t1], computed exactly from the
// step-solution difference. Used to bin the reference IR without quadrature
// error near the wavefront singularity.
double keller_time_solution_integral(double theta_i, double varphi_i, double theta_o,
                                     double listener_distance, double phi,
                                     BoundaryCondition bc, double t0, double t1,
                                     double sound_speed);

}  // namespace edgewave
