// SPDX-License-Identifier: Apache-2.0

#include "edgewave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace edgewave {

namespace {

constexpr double kDegenerateArea = 1e-12;  // m^2
constexpr double kMinHalfWedge = 1e-6;

struct TriHit {
    double t, u, v;
};

// Moller-Trumbore, two-sided.
inline bool ray_triangle(const Ray& ray, const Vec3& p0, const Vec3& p1,
                         const Vec3& p2, TriHit& out) {
    Vec3 e1 = p1 - p0;
    Vec3 e2 = p2 - p0;
    Vec3 pv = cross(ray.direction, e2);
    double det = dot(e1, pv);
    if (std::abs(det) < 1e-16) return false;
    double inv = 1.0 / det;
    Vec3 tv = ray.origin - p0;
    double u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return false;
    Vec3 qv = cross(tv, e1);
    double v = dot(ray.direction, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    out.t = dot(e2, qv) * inv;
    out.u = u;
    out.v = v;
    return true;
}

inline void grow(Vec3& bmin, Vec3& bmax, const Vec3& p) {
    bmin.x = std::min(bmin.x, p.x);
    bmin.y = std::min(bmin.y, p.y);
    bmin.z = std::min(bmin.z, p.z);
    bmax.x = std::max(bmax.x, p.x);
    bmax.y = std::max(bmax.y, p.y);
    bmax.z = std::max(bmax.z, p.z);
}

inline bool slab_hit(const Vec3& bmin, const Vec3& bmax, const Ray& r, double t_min,
                     double t_max) {
    for (int i = 0; i < 3; ++i) {
        double o = r.origin[i];
        double d = r.direction[i];
        double lo = bmin[i], hi = bmax[i];
        if (std::abs(d) < 1e-300) {
            if (o < lo || o > hi) return false;
            continue;
        }
        double inv = 1.0 / d;
        double t0 = (lo - o) * inv;
        double t1 = (hi - o) * inv;
        if (t0 > t1) std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        if (t_min > t_max) return false;
    }
    return true;
}

}  // namespace

Vec3 TriangleMesh::normal(int tri) const {
    const Triangle& f = triangles[static_cast<size_t>(tri)];
    return cross(vertex(f.v1) - vertex(f.v0), vertex(f.v2) - vertex(f.v0)).normalized();
}

double TriangleMesh::area(int tri) const {
    const Triangle& f = triangles[static_cast<size_t>(tri)];
    return 0.5 * cross(vertex(f.v1) - vertex(f.v0), vertex(f.v2) - vertex(f.v0)).norm();
}

Vec3 TriangleMesh::centroid(int tri) const {
    const Triangle& f = triangles[static_cast<size_t>(tri)];
    return (vertex(f.v0) + vertex(f.v1) + vertex(f.v2)) / 3.0;
}

EdgeExtraction extract_convex_edges(const TriangleMesh& mesh,
                                    double dihedral_tolerance) {
    EdgeExtraction out;
    out.tri_edges.resize(mesh.triangles.size());

    struct Adj {
        int tri;
        int opposite;
    };
    std::map<std::pair<int, int>, std::vector<Adj>> edge_map;
    for (int ti = 0; ti < static_cast<int>(mesh.triangles.size()); ++ti) {
        if (mesh.area(ti) <= kDegenerateArea) {
            out.warnings.push_back("degenerate triangle " + std::to_string(ti) +
                                   " skipped");
            continue;
        }
        const Triangle& f = mesh.triangles[static_cast<size_t>(ti)];
        int idx[3] = {f.v0, f.v1, f.v2};
        for (int k = 0; k < 3; ++k) {
            int a = idx[k], b = idx[(k + 1) % 3], c = idx[(k + 2) % 3];
            auto key = std::minmax(a, b);
            edge_map[{key.first, key.second}].push_back({ti, c});
        }
    }

    for (const auto& [key, adj] : edge_map) {
        if (adj.size() > 2) {
            out.warnings.push_back("edge (" + std::to_string(key.first) + "," +
                                   std::to_string(key.second) +
                                   ") shared by more than two triangles, skipped");
            continue;
        }
        if (adj.size() != 2) continue;  // boundary edge

        Vec3 pa = mesh.vertex(key.first);
        Vec3 pb = mesh.vertex(key.second);
        Vec3 n1 = mesh.normal(adj[0].tri);
        Vec3 n2 = mesh.normal(adj[1].tri);
        double bend = std::acos(clamp(dot(n1, n2), -1.0, 1.0));
        if (bend <= dihedral_tolerance) continue;  // flat or nearly flat

        // Convex (reflex exterior dihedral) when the opposite vertex of one
        // face lies strictly below the other's plane.
        Vec3 c2p = mesh.vertex(adj[1].opposite);
        double side = dot(n1, c2p - pa);
        if (side >= 0.0) continue;  // concave fold

        ConvexEdge e;
        e.a = key.first;
        e.b = key.second;
        e.tri1 = adj[0].tri;
        e.tri2 = adj[1].tri;
        e.c1 = adj[0].opposite;
        e.c2 = adj[1].opposite;

        Vec3 t = (pb - pa).normalized();
        auto in_face_dir = [&](int copp) {
            Vec3 w = mesh.vertex(copp) - pa;
            return (w - dot(w, t) * t).normalized();
        };
        Vec3 u1 = in_face_dir(e.c1);
        Vec3 u2 = in_face_dir(e.c2);
        e.phi = std::max(0.5 * std::acos(clamp(dot(u1, u2), -1.0, 1.0)), kMinHalfWedge);

        Vec3 bis = u1 + u2;
        if (bis.norm() < 1e-12) {
            out.warnings.push_back("edge (" + std::to_string(e.a) + "," +
                                   std::to_string(e.b) + ") has a degenerate bisector");
            continue;
        }
        e.n = (-1.0 * bis).normalized();
        Vec3 bv = cross(e.n, t);
        if (dot(u1, bv) < 0.0) {  // keep tri1 on the +theta side
            t = -1.0 * t;
            bv = cross(e.n, t);
        }
        e.t = t;
        e.bvec = bv;

        int id = static_cast<int>(out.edges.size());
        out.edges.push_back(e);
        out.tri_edges[static_cast<size_t>(e.tri1)].push_back(id);
        out.tri_edges[static_cast<size_t>(e.tri2)].push_back(id);
    }
    return out;
}

WedgeFrame wedge_frame(const TriangleMesh& mesh, const ConvexEdge& edge,
                       const Vec3& origin_point) {
    if (mesh.area(edge.tri1) <= kDegenerateArea || mesh.area(edge.tri2) <= kDegenerateArea) {
        throw std::invalid_argument("wedge_frame: degenerate adjacent triangle");
    }
    (void)origin_point;  // frame is constant along a straight edge
    return {edge.n, edge.t, edge.bvec, edge.phi};
}

std::optional<WedgeAngles> directions_to_angles(const WedgeFrame& frame,
                                                const Vec3& d_in, const Vec3& d_out) {
    WedgeAngles w;
    w.phi = frame.phi;
    double si = clamp(-dot(d_in, frame.t), -1.0, 1.0);
    w.varphi_i = std::asin(si);
    w.theta_i = std::atan2(-dot(d_in, frame.b), -dot(d_in, frame.n));
    double so = clamp(-dot(d_out, frame.t), -1.0, 1.0);
    w.varphi_o = std::asin(so);
    w.theta_o = std::atan2(dot(d_out, frame.b), dot(d_out, frame.n));
    double lim = kPi - frame.phi;
    if (std::abs(w.theta_i) >= lim || std::abs(w.theta_o) >= lim) return std::nullopt;
    return w;
}

Vec3 incident_direction_from_angles(const WedgeFrame& frame, double theta_i,
                                    double varphi_i) {
    double ci = std::cos(varphi_i);
    return -std::cos(theta_i) * ci * frame.n - std::sin(theta_i) * ci * frame.b -
           std::sin(varphi_i) * frame.t;
}

Vec3 outgoing_direction_from_angles(const WedgeFrame& frame, double theta_o,
                                    double varphi_o) {
    double co = std::cos(varphi_o);
    return std::cos(theta_o) * co * frame.n + std::sin(theta_o) * co * frame.b -
           std::sin(varphi_o) * frame.t;
}

Bvh::Bvh(const TriangleMesh& mesh) {
    int n = static_cast<int>(mesh.triangles.size());
    if (n == 0) return;
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    std::vector<Vec3> centroids(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) centroids[static_cast<size_t>(i)] = mesh.centroid(i);
    nodes_.reserve(static_cast<size_t>(2 * n));
    build(mesh, idx, 0, n, centroids);
    tri_order_ = idx;
}

int Bvh::build(const TriangleMesh& mesh, std::vector<int>& idx, int begin, int end,
               std::vector<Vec3>& centroids) {
    Node node;
    node.bmin = {1e300, 1e300, 1e300};
    node.bmax = {-1e300, -1e300, -1e300};
    for (int i = begin; i < end; ++i) {
        const Triangle& f = mesh.triangles[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        grow(node.bmin, node.bmax, mesh.vertex(f.v0));
        grow(node.bmin, node.bmax, mesh.vertex(f.v1));
        grow(node.bmin, node.bmax, mesh.vertex(f.v2));
    }
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int count = end - begin;
    if (count <= 4) {
        nodes_[static_cast<size_t>(self)].first = begin;
        nodes_[static_cast<size_t>(self)].count = count;
        return self;
    }

    // Binned SAH on the widest centroid axis.
    Vec3 cmin = {1e300, 1e300, 1e300}, cmax = {-1e300, -1e300, -1e300};
    for (int i = begin; i < end; ++i) {
        grow(cmin, cmax, centroids[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
    }
    Vec3 ext = cmax - cmin;
    int axis = ext.x > ext.y ? (ext.x > ext.z ? 0 : 2) : (ext.y > ext.z ? 1 : 2);
    double lo = cmin[axis], width = ext[axis];
    int mid;
    if (width < 1e-12) {
        mid = begin + count / 2;
    } else {
        constexpr int kBins = 16;
        struct Bin {
            Vec3 bmin{1e300, 1e300, 1e300}, bmax{-1e300, -1e300, -1e300};
            int n = 0;
        };
        Bin bins[kBins];
        auto bin_of = [&](int tri) {
            double c = centroids[static_cast<size_t>(tri)][axis];
            int b = static_cast<int>((c - lo) / width * kBins);
            return std::min(std::max(b, 0), kBins - 1);
        };
        for (int i = begin; i < end; ++i) {
            int tri = idx[static_cast<size_t>(i)];
            Bin& b = bins[bin_of(tri)];
            const Triangle& f = mesh.triangles[static_cast<size_t>(tri)];
            grow(b.bmin, b.bmax, mesh.vertex(f.v0));
            grow(b.bmin, b.bmax, mesh.vertex(f.v1));
            grow(b.bmin, b.bmax, mesh.vertex(f.v2));
            b.n++;
        }
        auto half_area = [](const Vec3& bmin, const Vec3& bmax) {
            Vec3 d = bmax - bmin;
            if (d.x < 0) return 0.0;
            return d.x * d.y + d.y * d.z + d.z * d.x;
        };
        double best_cost = 1e300;
        int best_split = -1;
        for (int s = 1; s < kBins; ++s) {
            Vec3 lmin{1e300, 1e300, 1e300}, lmax{-1e300, -1e300, -1e300};
            Vec3 rmin = lmin, rmax = lmax;
            int ln = 0, rn = 0;
            for (int b = 0; b < s; ++b) {
                if (!bins[b].n) continue;
                grow(lmin, lmax, bins[b].bmin);
                grow(lmin, lmax, bins[b].bmax);
                ln += bins[b].n;
            }
            for (int b = s; b < kBins; ++b) {
                if (!bins[b].n) continue;
                grow(rmin, rmax, bins[b].bmin);
                grow(rmin, rmax, bins[b].bmax);
                rn += bins[b].n;
            }
            if (!ln || !rn) continue;
            double cost = half_area(lmin, lmax) * ln + half_area(rmin, rmax) * rn;
            if (cost < best_cost) {
                best_cost = cost;
                best_split = s;
            }
        }
        if (best_split < 0) {
            mid = begin + count / 2;
        } else {
            auto it = std::partition(idx.begin() + begin, idx.begin() + end,
                                     [&](int tri) { return bin_of(tri) < best_split; });
            mid = static_cast<int>(it - idx.begin());
            if (mid == begin || mid == end) mid = begin + count / 2;
        }
    }
    int l = build(mesh, idx, begin, mid, centroids);
    int r = build(mesh, idx, mid, end, centroids);
    nodes_[static_cast<size_t>(self)].left = l;
    nodes_[static_cast<size_t>(self)].right = r;
    return self;
}

std::optional<Hit> Bvh::intersect(const TriangleMesh& mesh, const Ray& ray,
                                  double t_min, double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    Hit best;
    best.t = t_max;
    bool found = false;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp) {
        const Node& node = nodes_[static_cast<size_t>(stack[--sp])];
        if (!slab_hit(node.bmin, node.bmax, ray, t_min, best.t)) continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int tri = tri_order_[static_cast<size_t>(i)];
                const Triangle& f = mesh.triangles[static_cast<size_t>(tri)];
                TriHit h;
                if (!ray_triangle(ray, mesh.vertex(f.v0), mesh.vertex(f.v1),
                                  mesh.vertex(f.v2), h))
                    continue;
                if (h.t < t_min || h.t > best.t) continue;
                if (h.t == best.t && found && tri >= best.tri) continue;
                best.tri = tri;
                best.t = h.t;
                best.u = h.u;
                best.v = h.v;
                found = true;
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

bool Bvh::segment_occluded(const TriangleMesh& mesh, const Vec3& p, const Vec3& q,
                           double eps) const {
    Vec3 d = q - p;
    double len = d.norm();
    if (len < 1e-12) return false;
    Ray ray{p, d / len};
    auto hit = intersect(mesh, ray, eps * len, (1.0 - eps) * len);
    return hit.has_value();
}

void Bvh::collect_overlapping(const Vec3& bmin, const Vec3& bmax,
                              std::vector<int>& out) const {
    if (nodes_.empty()) return;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp) {
        const Node& node = nodes_[static_cast<size_t>(stack[--sp])];
        bool overlap = node.bmin.x <= bmax.x && node.bmax.x >= bmin.x &&
                       node.bmin.y <= bmax.y && node.bmax.y >= bmin.y &&
                       node.bmin.z <= bmax.z && node.bmax.z >= bmin.z;
        if (!overlap) continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                out.push_back(tri_order_[static_cast<size_t>(i)]);
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
}

void Bvh::collect_ray_crossings(const TriangleMesh& mesh, const Ray& ray,
                                std::vector<Crossing>& out, double t_min,
                                double t_max) const {
    if (nodes_.empty()) return;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp) {
        const Node& node = nodes_[static_cast<size_t>(stack[--sp])];
        if (!slab_hit(node.bmin, node.bmax, ray, t_min, t_max)) continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int tri = tri_order_[static_cast<size_t>(i)];
                const Triangle& f = mesh.triangles[static_cast<size_t>(tri)];
                TriHit h;
                if (!ray_triangle(ray, mesh.vertex(f.v0), mesh.vertex(f.v1),
                                  mesh.vertex(f.v2), h))
                    continue;
                if (h.t <= t_min || h.t >= t_max) continue;
                double c = std::abs(dot(ray.direction, mesh.normal(tri)));
                out.push_back({h.t, tri, c});
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
}

std::optional<Hit> brute_force_intersect(const TriangleMesh& mesh, const Ray& ray,
                                         double t_min) {
    Hit best;
    best.t = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
        const Triangle& f = mesh.triangles[static_cast<size_t>(tri)];
        TriHit h;
        if (!ray_triangle(ray, mesh.vertex(f.v0), mesh.vertex(f.v1), mesh.vertex(f.v2),
                          h))
            continue;
        if (h.t < t_min || h.t > best.t) continue;
        if (h.t == best.t && found && tri >= best.tri) continue;
        best = {tri, h.t, h.u, h.v};
        found = true;
    }
    if (!found) return std::nullopt;
    return best;
}

namespace {

using Intervals = std::vector<std::pair<double, double>>;

// Removes [b0,b1] from the sorted disjoint interval set.
void subtract_interval(Intervals& set, double b0, double b1) {
    if (b1 <= b0) return;
    Intervals out;
    out.reserve(set.size() + 1);
    for (auto& [a0, a1] : set) {
        if (a1 <= b0 || a0 >= b1) {
            out.emplace_back(a0, a1);
            continue;
        }
        if (a0 < b0) out.emplace_back(a0, b0);
        if (a1 > b1) out.emplace_back(b1, a1);
    }
    set = std::move(out);
}

// True when the open segment apex->p strictly crosses triangle (q0,q1,q2).
bool blocks_point(const Vec3& apex, const Vec3& p, const Vec3& q0, const Vec3& q1,
                  const Vec3& q2) {
    Vec3 n = cross(q1 - q0, q2 - q0);
    double ha = dot(n, apex - q0);
    double hp = dot(n, p - q0);
    if (ha * hp >= 0.0) return false;  // no strict plane crossing
    double lambda = ha / (ha - hp);
    Vec3 q = apex + lambda * (p - apex);
    // inside test via consistent signed areas
    double s0 = dot(cross(q1 - q0, q - q0), n);
    double s1 = dot(cross(q2 - q1, q - q1), n);
    double s2 = dot(cross(q0 - q2, q - q2), n);
    return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

}  // namespace

std::vector<std::pair<double, double>> visible_subsegments(const Vec3& apex,
                                                           const Vec3& seg_start,
                                                           const Vec3& seg_end,
                                                           const TriangleMesh& mesh,
                                                           const Bvh& bvh) {
    Intervals visible{{0.0, 1.0}};
    if (bvh.empty()) return visible;

    Vec3 bmin = apex, bmax = apex;
    grow(bmin, bmax, seg_start);
    grow(bmin, bmax, seg_end);
    std::vector<int> candidates;
    bvh.collect_overlapping(bmin - Vec3{1e-9, 1e-9, 1e-9},
                            bmax + Vec3{1e-9, 1e-9, 1e-9}, candidates);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    Vec3 e = seg_end - seg_start;
    for (int tri : candidates) {
        if (visible.empty()) break;
        const Triangle& f = mesh.triangles[static_cast<size_t>(tri)];
        Vec3 q0 = mesh.vertex(f.v0), q1 = mesh.vertex(f.v1), q2 = mesh.vertex(f.v2);
        Vec3 n = cross(q1 - q0, q2 - q0);
        if (n.norm() < 1e-14) continue;
        double ha = dot(n, apex - q0);
        if (ha == 0.0) continue;  // occluder touches the apex plane-on
        double h0 = dot(n, seg_start - q0);
        double h1 = dot(n, e);

        // Breakpoints of the blocking predicate along t. All conditions are
        // sign tests of functions linear in t once the common projective
        // denominator w(t) = ha - h(t) is factored out, so the blocked set is
        // delimited by the roots below and can be classified at midpoints.
        std::vector<double> cuts{0.0, 1.0};
        auto add_root = [&](double a, double b) {
            // root of a + b t
            if (std::abs(b) < 1e-300) return;
            double t = -a / b;
            if (t > 0.0 && t < 1.0) cuts.push_back(t);
        };
        add_root(h0, h1);            // plane crossing changes
        add_root(ha - h0, -h1);      // projective denominator w(t)
        // inside-edge conditions: G_i(t) = m_i . N(t) + c_i w(t), with
        // N(t) = ha p(t) - h(t) apex linear in t.
        Vec3 p0 = seg_start;
        Vec3 n0 = ha * p0 - h0 * apex;  // N(0)
        Vec3 n1v = ha * e - h1 * apex;  // dN/dt
        const Vec3 qs[3] = {q0, q1, q2};
        for (int k = 0; k < 3; ++k) {
            Vec3 ea = qs[(k + 1) % 3] - qs[k];
            Vec3 m = cross(ea, n);  // in-plane edge normal
            double c = -dot(m, qs[k]);
            double g0 = dot(m, n0) + c * (ha - h0);
            double g1 = dot(m, n1v) + c * (-h1);
            add_root(g0, g1);
        }
        std::sort(cuts.begin(), cuts.end());
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            double lo = cuts[i], hi = cuts[i + 1];
            if (hi - lo < 1e-15) continue;
            double mid = 0.5 * (lo + hi);
            if (blocks_point(apex, seg_start + mid * e, q0, q1, q2)) {
                subtract_interval(visible, lo, hi);
            }
        }
    }
    return visible;
}

double interval_total_length(const std::vector<std::pair<double, double>>& iv) {
    double s = 0.0;
    for (auto& [a, b] : iv) s += b - a;
    return s;
}

}  // namespace edgewave
