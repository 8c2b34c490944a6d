// SPDX-License-Identifier: Apache-2.0

#include "edgewave/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace edgewave::oracles {

double fc_complex(double theta0, double theta1, std::complex<double> x) {
    std::complex<double> e0 = std::polar(1.0, theta0);
    std::complex<double> e1 = std::polar(1.0, theta1);
    if (std::abs(x - e0) < 1e-12 || std::abs(x - e1) < 1e-12) {
        throw std::invalid_argument("fc_complex: singular arc endpoint");
    }
    // the function lives on the branch arg in [0, 2 pi): inscribed angles on
    // the near arc exceed pi
    double a = std::arg((x - e1) / (x - e0));
    if (a < 0.0) a += kTwoPi;
    return (a - (theta1 - theta0) / 2.0) / kPi;
}

double fc_real_form(double theta0, double theta1, std::complex<double> x) {
    double r = std::abs(x);
    double th = std::arg(x);
    double a = (theta1 - theta0) / 2.0;
    double num = (1.0 - r * r) * std::sin(a);
    double den = (1.0 + r * r) * std::cos(a) -
                 2.0 * r * std::cos(th - (theta0 + theta1) / 2.0);
    return std::atan2(num, den) / kPi;
}

WedgeGeom wedge_geom_from_edge(const Scene& scene, int edge_index) {
    const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(edge_index)];
    WedgeGeom g;
    Vec3 a = scene.mesh.vertex(e.a);
    Vec3 b = scene.mesh.vertex(e.b);
    g.origin = a;
    g.frame = {e.n, e.t, e.bvec, e.phi};
    g.z_min = std::min(0.0, dot(b - a, e.t));
    g.z_max = std::max(0.0, dot(b - a, e.t));
    g.bc = scene.material_of(e.tri1).bc;
    return g;
}

namespace {

// Outgoing angles from an edge point toward a listener; theta_o is constant
// along a straight edge, varphi_o varies.
struct EdgeToListener {
    double theta_o;
    double d_perp;   // in-plane distance of the listener from the edge line
    double z_l;      // listener coordinate along the edge
};

EdgeToListener listener_coords(const WedgeGeom& w, const Vec3& listener) {
    Vec3 rel = listener - w.origin;
    double zn = dot(rel, w.frame.n);
    double zb = dot(rel, w.frame.b);
    EdgeToListener out;
    out.theta_o = std::atan2(zb, zn);
    out.d_perp = std::hypot(zn, zb);
    out.z_l = dot(rel, w.frame.t);
    return out;
}

}  // namespace

std::vector<double> edge_quadrature_plane(const WedgeGeom& wedge, double theta_i,
                                          double varphi_i, const Vec3& listener,
                                          double sample_rate, int bins, int steps,
                                          double sound_speed) {
    std::vector<double> ir(static_cast<size_t>(bins), 0.0);
    EdgeToListener lc = listener_coords(wedge, listener);
    // first-arrival (stationary-delay) edge point of this listener
    double z_star = lc.z_l + lc.d_perp * std::tan(varphi_i);
    double si = std::sin(varphi_i);

    double z0 = wedge.z_min, z1 = wedge.z_max;
    double dz = (z1 - z0) / static_cast<double>(steps);
    WedgeAngles ang;
    ang.phi = wedge.frame.phi;
    ang.theta_i = theta_i;
    ang.varphi_i = varphi_i;
    ang.theta_o = lc.theta_o;
    for (int k = 0; k < steps; ++k) {
        double z = z0 + (static_cast<double>(k) + 0.5) * dz;
        double dzl = lc.z_l - z;
        double r_out = std::hypot(lc.d_perp, dzl);
        if (r_out < 1e-12) continue;
        // plane wavefront delay relative to the stationary point: the wave
        // travels with edge-axis speed component -sin(varphi_i)
        double t_w = -(z - z_star) * si / sound_speed;
        double tau = t_w + r_out / sound_speed;
        // formulas measure the outgoing elevation with the incident axis sense
        ang.varphi_o = std::asin(clamp(-dzl / r_out, -1.0, 1.0));
        auto rho = bedrf_eval(ang, wedge.bc);
        if (!rho) continue;
        int bin = static_cast<int>(tau * sample_rate);
        if (bin < 0 || bin >= bins) continue;
        ir[static_cast<size_t>(bin)] += *rho / r_out * dz;
    }
    return ir;
}

std::vector<double> keller_binned(double theta_i, double varphi_i, double theta_o,
                                  double r_star, double phi, BoundaryCondition bc,
                                  double sample_rate, int bins, double sound_speed) {
    std::vector<double> ir(static_cast<size_t>(bins), 0.0);
    for (int k = 0; k < bins; ++k) {
        double t0 = static_cast<double>(k) / sample_rate;
        double t1 = static_cast<double>(k + 1) / sample_rate;
        ir[static_cast<size_t>(k)] = keller_time_solution_integral(
            theta_i, varphi_i, theta_o, r_star, phi, bc, t0, t1, sound_speed);
    }
    return ir;
}

std::vector<double> edge_quadrature_point(const Scene& scene, const WedgeGeom& wedge,
                                          const Vec3& source, const Vec3& listener,
                                          double sample_rate, int bins, int steps,
                                          const MediaTerm& media, double source_amp) {
    std::vector<double> ir(static_cast<size_t>(bins), 0.0);
    double z0 = wedge.z_min, z1 = wedge.z_max;
    double dz = (z1 - z0) / static_cast<double>(steps);
    WedgeFrame frame = wedge.frame;
    for (int k = 0; k < steps; ++k) {
        double z = z0 + (static_cast<double>(k) + 0.5) * dz;
        Vec3 x = wedge.origin + z * frame.t;
        Vec3 d_in = x - source;
        double r_s = d_in.norm();
        Vec3 d_out = listener - x;
        double r_l = d_out.norm();
        if (r_s < 1e-12 || r_l < 1e-12) continue;
        auto ang = directions_to_angles(frame, d_in / r_s, d_out / r_l);
        if (!ang) continue;
        auto rho = bedrf_eval(*ang, wedge.bc);
        if (!rho) continue;
        if (!scene.mesh.triangles.empty()) {
            if (scene.bvh.segment_occluded(scene.mesh, source, x) ||
                scene.bvh.segment_occluded(scene.mesh, x, listener))
                continue;
        }
        MediaResult m1 = media_apply(source_amp, r_s, media);
        MediaResult m2 = media_apply(m1.amplitude, r_l, media);
        double tau = m1.delay + m2.delay;
        int bin = static_cast<int>(tau * sample_rate);
        if (bin < 0 || bin >= bins) continue;
        ir[static_cast<size_t>(bin)] += m2.amplitude * *rho * dz;
    }
    return ir;
}

std::vector<double> double_edge_quadrature_point(const Scene& scene,
                                                 const WedgeGeom& e1,
                                                 const WedgeGeom& e2,
                                                 const Vec3& source,
                                                 const Vec3& listener,
                                                 double sample_rate, int bins,
                                                 int steps, const MediaTerm& media,
                                                 double source_amp) {
    std::vector<double> ir(static_cast<size_t>(bins), 0.0);
    double dz1 = (e1.z_max - e1.z_min) / static_cast<double>(steps);
    double dz2 = (e2.z_max - e2.z_min) / static_cast<double>(steps);
    for (int k1 = 0; k1 < steps; ++k1) {
        double z1 = e1.z_min + (static_cast<double>(k1) + 0.5) * dz1;
        Vec3 x1 = e1.origin + z1 * e1.frame.t;
        Vec3 d_in = x1 - source;
        double r_s = d_in.norm();
        if (r_s < 1e-12) continue;
        if (scene.bvh.segment_occluded(scene.mesh, source, x1)) continue;
        for (int k2 = 0; k2 < steps; ++k2) {
            double z2 = e2.z_min + (static_cast<double>(k2) + 0.5) * dz2;
            Vec3 x2 = e2.origin + z2 * e2.frame.t;
            Vec3 d_mid = x2 - x1;
            double r_m = d_mid.norm();
            Vec3 d_out = listener - x2;
            double r_l = d_out.norm();
            if (r_m < 1e-12 || r_l < 1e-12) continue;
            auto a1 = directions_to_angles(e1.frame, d_in / r_s, d_mid / r_m);
            if (!a1) continue;
            auto rho1 = bedrf_eval(*a1, e1.bc);
            if (!rho1 || *rho1 == 0.0) continue;
            auto a2 = directions_to_angles(e2.frame, d_mid / r_m, d_out / r_l);
            if (!a2) continue;
            auto rho2 = bedrf_eval(*a2, e2.bc);
            if (!rho2 || *rho2 == 0.0) continue;
            if (scene.bvh.segment_occluded(scene.mesh, x1, x2) ||
                scene.bvh.segment_occluded(scene.mesh, x2, listener))
                continue;
            MediaResult m1 = media_apply(source_amp, r_s, media);
            MediaResult m2 = media_apply(m1.amplitude * *rho1, r_m, media);
            MediaResult m3 = media_apply(m2.amplitude * *rho2, r_l, media);
            double tau = m1.delay + m2.delay + m3.delay;
            int bin = static_cast<int>(tau * sample_rate);
            if (bin < 0 || bin >= bins) continue;
            ir[static_cast<size_t>(bin)] += m3.amplitude * dz1 * dz2;
        }
    }
    return ir;
}

std::vector<double> single_slit_pattern(double slit_width, double wavelength,
                                        double screen_distance,
                                        const std::vector<double>& positions) {
    std::vector<double> out(positions.size(), 0.0);
    for (size_t i = 0; i < positions.size(); ++i) {
        double sin_t = positions[i] / std::hypot(positions[i], screen_distance);
        double u = kPi * slit_width * sin_t / wavelength;
        double v = std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u;
        out[i] = v * v;
    }
    return out;
}

std::vector<double> bruteforce_triangle_projection(const Scene& scene,
                                                   const ConvexEdge& edge,
                                                   const Vec3& origin, int n_samples,
                                                   int bins, Pcg32& rng) {
    std::vector<double> hist(static_cast<size_t>(bins), 0.0);
    Vec3 a = scene.mesh.vertex(edge.a);
    Vec3 b = scene.mesh.vertex(edge.b);
    double area1 = scene.mesh.area(edge.tri1);
    double area2 = scene.mesh.area(edge.tri2);
    double p1 = area1 / (area1 + area2);
    for (int s = 0; s < n_samples; ++s) {
        bool first = rng.next_double() < p1;
        Vec3 c = scene.mesh.vertex(first ? edge.c1 : edge.c2);
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        if (u1 + u2 > 1.0) {
            u1 = 1.0 - u1;
            u2 = 1.0 - u2;
        }
        Vec3 p = a + u1 * (b - a) + u2 * (c - a);
        if (scene.bvh.segment_occluded(scene.mesh, origin, p)) continue;
        // project through the opposite vertex onto ab
        Vec3 d = p - c;
        Vec3 eab = b - a;
        Vec3 n = cross(d, eab);
        double denom = n.norm2();
        if (denom < 1e-24) continue;
        double t = dot(cross(eab, c - a), n) / denom;
        Vec3 x = c + t * d;
        double w = dot(x - a, eab) / eab.norm2();
        if (w < 0.0 || w >= 1.0) continue;
        int bin = static_cast<int>(w * bins);
        hist[static_cast<size_t>(bin)] += 1.0;
    }
    return hist;
}

std::vector<double> predicted_projection_density(const Scene& scene,
                                                 const ConvexEdge& edge,
                                                 const Vec3& origin, int bins,
                                                 double total_mass) {
    std::vector<double> out(static_cast<size_t>(bins), 0.0);
    Vec3 a = scene.mesh.vertex(edge.a);
    Vec3 b = scene.mesh.vertex(edge.b);
    double total = 0.0;
    for (int k = 0; k < bins; ++k) {
        double w = (static_cast<double>(k) + 0.5) / static_cast<double>(bins);
        Vec3 x = a + w * (b - a);
        out[static_cast<size_t>(k)] = measure_conversion(scene, edge, x, origin);
        total += out[static_cast<size_t>(k)];
    }
    if (total > 0.0) {
        for (auto& v : out) v *= total_mass / total;
    }
    return out;
}

}  // namespace edgewave::oracles
