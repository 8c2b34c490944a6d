// SPDX-License-Identifier: Apache-2.0

#include "edgewave/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace edgewave {

namespace {

constexpr double kRayEps = 1e-7;
constexpr double kCosClamp = 1e-6;   // lower clamp of cos theta in C_o
constexpr double kGrazeEps = 1e-12;  // rejection threshold for grazing hits

// Endpoint direction sampling targets the scene surface uniformly by area:
// pick a triangle proportionally to area and a uniform point on it. The
// per-steradian density of a direction is (1/A_total) sum_i d_i^2/cos_i over
// every surface crossing along the ray, which keeps the area density of the
// first hit near 1/A_total and avoids heavy grazing-incidence weights.
Vec3 sample_endpoint_direction(const Scene& scene, const Vec3& origin, Pcg32& rng) {
    double pick = rng.next_double() * scene.total_area;
    size_t lo = 0, hi = scene.tri_cum_area.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (scene.tri_cum_area[mid] < pick)
            lo = mid + 1;
        else
            hi = mid;
    }
    const Triangle& f = scene.mesh.triangles[lo];
    double u = rng.next_double(), v = rng.next_double();
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    Vec3 p = scene.mesh.vertex(f.v0) +
             u * (scene.mesh.vertex(f.v1) - scene.mesh.vertex(f.v0)) +
             v * (scene.mesh.vertex(f.v2) - scene.mesh.vertex(f.v0));
    return (p - origin).normalized();
}

double endpoint_direction_pdf(const Scene& scene, const Vec3& origin,
                              const Vec3& dir) {
    if (scene.total_area <= 0.0) return 0.0;
    std::vector<Bvh::Crossing> crossings;
    scene.bvh.collect_ray_crossings(scene.mesh, Ray{origin, dir}, crossings);
    double acc = 0.0;
    for (const auto& c : crossings) {
        if (c.cos_theta < kGrazeEps) continue;
        acc += c.t * c.t / c.cos_theta;
    }
    return acc / scene.total_area;
}

}  // namespace

MediaResult media_apply(double amplitude, double r, const MediaTerm& media) {
    if (r <= 0.0) throw std::invalid_argument("media_apply: degenerate segment");
    return {amplitude * std::exp(-media.absorption * r) / r, r / media.sound_speed};
}

const Material& Scene::material_of(int tri) const {
    int m = mesh.triangles[static_cast<size_t>(tri)].material;
    return materials[static_cast<size_t>(m)];
}

Scene make_scene(TriangleMesh mesh, std::vector<Material> materials) {
    Scene s;
    s.mesh = std::move(mesh);
    s.bvh = Bvh(s.mesh);
    s.edges = extract_convex_edges(s.mesh);
    s.materials = std::move(materials);
    if (s.materials.empty()) s.materials.push_back(Material{});
    s.tri_cum_area.reserve(s.mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
        s.total_area += s.mesh.area(t);
        s.tri_cum_area.push_back(s.total_area);
    }
    return s;
}

std::optional<EdgeProjection> edge_pseudo_intersect(const Scene& scene,
                                                    const Vec3& origin,
                                                    const Hit& hit, Pcg32& rng) {
    const auto& cand = scene.edges.tri_edges[static_cast<size_t>(hit.tri)];
    if (cand.empty()) return std::nullopt;
    int pick = cand[rng.next_bounded(static_cast<uint32_t>(cand.size()))];
    const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(pick)];

    const Triangle& f = scene.mesh.triangles[static_cast<size_t>(hit.tri)];
    Vec3 p0 = scene.mesh.vertex(f.v0);
    Vec3 p1 = scene.mesh.vertex(f.v1);
    Vec3 p2 = scene.mesh.vertex(f.v2);
    Vec3 pseudo = (1.0 - hit.u - hit.v) * p0 + hit.u * p1 + hit.v * p2;

    int copp = e.tri1 == hit.tri ? e.c1 : e.c2;
    Vec3 c = scene.mesh.vertex(copp);
    Vec3 a = scene.mesh.vertex(e.a);
    Vec3 b = scene.mesh.vertex(e.b);

    // Extend c -> pseudo onto the edge line; the hit lies inside the triangle
    // so the intersection parameter on ab is in [0, 1].
    Vec3 eab = b - a;
    Vec3 d = pseudo - c;
    // Solve (c + s d - a) x eab = 0 in the least-degenerate component.
    Vec3 w = c - a;
    Vec3 n = cross(d, eab);
    double denom = n.norm2();
    EdgeProjection out;
    out.edge = pick;
    out.pseudo = pseudo;
    out.pseudo_tri = hit.tri;
    out.p_select = 1.0 / static_cast<double>(cand.size());
    if (denom < 1e-24) return std::nullopt;  // pseudo on the edge line itself
    double s = dot(cross(eab, w), n) / denom;
    Vec3 x = c + s * d;
    // snap onto the segment
    double t = clamp(dot(x - a, eab) / eab.norm2(), 0.0, 1.0);
    out.x = a + t * eab;
    out.visible = !scene.bvh.segment_occluded(scene.mesh, origin, out.x);
    return out;
}

namespace {

struct StripSet {
    // visible intervals in the u parameter (0 at the opposite vertex, 1 at x)
    std::vector<std::pair<double, double>> iv1, iv2;
    double h1 = 0.0, h2 = 0.0;
    double g1 = 0.0, g2 = 0.0;  // h_k * Int u du over visible intervals
    double g() const { return g1 + g2; }
};

double half_height(const Scene& scene, int tri, const ConvexEdge& e) {
    Vec3 a = scene.mesh.vertex(e.a);
    Vec3 b = scene.mesh.vertex(e.b);
    return 2.0 * scene.mesh.area(tri) / (b - a).norm();
}

double u_mass(const std::vector<std::pair<double, double>>& iv) {
    double m = 0.0;
    for (auto& [a, b] : iv) m += 0.5 * (b * b - a * a);
    return m;
}

StripSet strip_set(const Scene& scene, const ConvexEdge& e, const Vec3& x,
                   const Vec3& origin) {
    StripSet s;
    Vec3 c1 = scene.mesh.vertex(e.c1);
    Vec3 c2 = scene.mesh.vertex(e.c2);
    s.iv1 = visible_subsegments(origin, c1, x, scene.mesh, scene.bvh);
    s.iv2 = visible_subsegments(origin, c2, x, scene.mesh, scene.bvh);
    s.h1 = half_height(scene, e.tri1, e);
    s.h2 = half_height(scene, e.tri2, e);
    s.g1 = s.h1 * u_mass(s.iv1);
    s.g2 = s.h2 * u_mass(s.iv2);
    return s;
}

}  // namespace

double measure_conversion(const Scene& scene, const ConvexEdge& edge, const Vec3& x,
                          const Vec3& origin) {
    return strip_set(scene, edge, x, origin).g();
}

std::optional<StripPoint> draw_strip_point(const Scene& scene, const ConvexEdge& edge,
                                           const Vec3& x, const Vec3& origin,
                                           Pcg32& rng) {
    StripSet s = strip_set(scene, edge, x, origin);
    double total = s.g();
    if (total <= 0.0) return std::nullopt;
    bool first = rng.next_double() * total < s.g1;
    const auto& iv = first ? s.iv1 : s.iv2;
    Vec3 c = scene.mesh.vertex(first ? edge.c1 : edge.c2);
    double mass = u_mass(iv);
    double pick = rng.next_double() * mass;
    double u = iv.back().second;
    for (size_t k = 0; k < iv.size(); ++k) {
        auto [a, b] = iv[k];
        double m = 0.5 * (b * b - a * a);
        if (pick <= m || k + 1 == iv.size()) {
            // u density proportional to u: invert the in-interval CDF
            double frac = m > 0.0 ? clamp(pick / m, 0.0, 1.0) : 0.0;
            u = std::sqrt(a * a + frac * (b * b - a * a));
            break;
        }
        pick -= m;
    }
    StripPoint out;
    out.p = c + u * (x - c);
    out.tri = first ? edge.tri1 : edge.tri2;
    return out;
}

double outlier_metric(double pdf_real_dir, double pdf_pseudo_dir, double dist_real,
                      double dist_pseudo, double cos_pseudo) {
    double c = std::max(std::abs(cos_pseudo), kCosClamp);
    if (pdf_pseudo_dir <= 0.0) return 1.0;
    return (pdf_real_dir / pdf_pseudo_dir) * sqr(dist_pseudo) /
           (sqr(dist_real) * c);
}

double suppress(double c_o, double c_o_star) {
    double t = c_o / c_o_star;
    if (t < 1e-12) return 1.0;
    return std::tanh(t) / t;
}

namespace {

// Per-steradian density of the direction sampler at node `at` toward `target`,
// given the node's incident-side neighbor position (defines the sampler state).
double node_direction_pdf(const Scene& scene, const SimulationConfig& cfg,
                          const MetaPathNode& at, const Vec3& incident_from,
                          const Vec3& target) {
    Vec3 dir = (target - at.x).normalized();
    switch (at.kind) {
        case NodeKind::Endpoint:
            return endpoint_direction_pdf(scene, at.x, dir);
        case NodeKind::Surface: {
            const Material& m = scene.material_of(at.tri);
            Vec3 n = at.normal;
            if (dot(n, incident_from - at.x) < 0.0) n = -1.0 * n;
            return surface_pdf(n, m, dir);
        }
        case NodeKind::Edge: {
            const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(at.edge)];
            WedgeFrame frame{e.n, e.t, e.bvec, e.phi};
            Vec3 d_in = (at.x - incident_from).normalized();
            auto ang = directions_to_angles(frame, d_in, dir);
            if (!ang) return 0.0;
            const Material& m = scene.material_of(e.tri1);
            EdgeSamplerParams params =
                compute_params(ang->theta_i, ang->varphi_i, e.phi, m.bc);
            return pdf(ang->theta_i, ang->varphi_i, ang->theta_o, ang->varphi_o,
                       e.phi, params);
        }
    }
    return 0.0;
}

// Node response value along physical propagation d_in -> node -> d_out.
// Endpoints are unit; surfaces are diffuse refl * cos(outgoing)/pi; edges the
// signed BEDRF. nullopt marks a singular edge evaluation.
std::optional<double> node_response(const Scene& scene, const MetaPathNode& node,
                                    const Vec3& d_in_phys, const Vec3& d_out_phys) {
    switch (node.kind) {
        case NodeKind::Endpoint:
            return 1.0;
        case NodeKind::Surface: {
            const Material& m = scene.material_of(node.tri);
            Vec3 n = node.normal;
            if (dot(n, d_in_phys) > 0.0) n = -1.0 * n;  // face the incident side
            double c = dot(n, d_out_phys);
            if (c <= 0.0) return 0.0;
            return m.reflection * c / kPi;
        }
        case NodeKind::Edge: {
            const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(node.edge)];
            WedgeFrame frame{e.n, e.t, e.bvec, e.phi};
            auto ang = directions_to_angles(frame, d_in_phys, d_out_phys);
            if (!ang) return 0.0;
            const Material& m = scene.material_of(e.tri1);
            return bedrf_eval(*ang, m.bc);
        }
    }
    return 0.0;
}

enum class ExtendStatus { Advanced, EdgeFailure, Dead };

// One extension attempt. On success the new node is appended and, when the
// previous head is an edge node, its auxiliary strip point toward the new
// node is drawn.
ExtendStatus extend_subpath(const Scene& scene, const SimulationConfig& cfg,
                            std::vector<MetaPathNode>& path, SubpathMode mode,
                            Pcg32& rng) {
    MetaPathNode& u = path.back();
    if (u.weight == 0.0) return ExtendStatus::Dead;

    // 1. direction sample + local response factor
    Vec3 dir;
    double dir_pdf = 0.0;
    double f_node = 1.0;
    bool specular = false;
    double discrete_pdf = 1.0;
    switch (u.kind) {
        case NodeKind::Endpoint:
            if (scene.total_area <= 0.0) return ExtendStatus::Dead;
            dir = sample_endpoint_direction(scene, u.x, rng);
            dir_pdf = endpoint_direction_pdf(scene, u.x, dir);
            if (dir_pdf <= 0.0) return ExtendStatus::Dead;
            break;
        case NodeKind::Surface: {
            const Material& m = scene.material_of(u.tri);
            if (m.reflection <= 0.0) return ExtendStatus::Dead;
            Vec3 n = u.normal;
            if (dot(n, u.arrival_dir) > 0.0) n = -1.0 * n;
            SurfaceSample ss = sample_surface(u.arrival_dir, n, m, rng);
            dir = ss.direction;
            if (ss.specular) {
                specular = true;
                discrete_pdf = std::max(m.specularity, 1e-300);
                f_node = m.reflection;
            } else {
                dir_pdf = ss.pdf;
                if (dir_pdf <= 0.0) return ExtendStatus::Dead;
                Vec3 d_lst = mode == SubpathMode::Forward ? dir : -1.0 * u.arrival_dir;
                f_node = m.reflection * std::max(0.0, dot(n, d_lst)) / kPi;
            }
            break;
        }
        case NodeKind::Edge: {
            const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(u.edge)];
            WedgeFrame frame{e.n, e.t, e.bvec, e.phi};
            // frame.n as a dummy outgoing direction: only the incident angles
            // are needed to parameterize the sampler
            auto in_ang = directions_to_angles(frame, u.arrival_dir, frame.n);
            if (!in_ang) return ExtendStatus::Dead;
            const Material& m = scene.material_of(e.tri1);
            EdgeSamplerParams params =
                compute_params(in_ang->theta_i, in_ang->varphi_i, e.phi, m.bc);
            DirectionSample ds = sample_edge_direction(in_ang->theta_i,
                                                       in_ang->varphi_i, e.phi,
                                                       params, rng);
            dir = outgoing_direction_from_angles(frame, ds.theta_o, ds.varphi_o);
            dir_pdf = ds.pdf;
            if (dir_pdf <= 0.0) return ExtendStatus::Dead;
            // physical orientation: reciprocity lets both modes evaluate alike
            auto rho = node_response(scene, u, u.arrival_dir, dir);
            if (!rho || *rho == 0.0) return ExtendStatus::Dead;
            f_node = *rho;
            break;
        }
    }

    // 2. cast
    Ray ray{u.x + kRayEps * dir, dir};
    auto hit = scene.bvh.intersect(scene.mesh, ray);
    if (!hit) return ExtendStatus::Dead;
    Vec3 hit_point = ray.origin + hit->t * ray.direction;

    // 3. interaction branch
    bool has_edges = scene.tri_has_edges(hit->tri);
    bool edge_branch = has_edges && rng.next_double() < cfg.edge_probability;
    double branch_prob = has_edges
                             ? (edge_branch ? cfg.edge_probability
                                            : 1.0 - cfg.edge_probability)
                             : 1.0;
    if (branch_prob <= 0.0) return ExtendStatus::Dead;

    MetaPathNode v;
    v.delay = u.delay;
    v.c_o = u.c_o;
    v.n_edges = u.n_edges;
    v.specular_generated = specular;

    if (edge_branch) {
        if (u.n_edges + 1 > cfg.max_diffraction_order) return ExtendStatus::Dead;
        auto proj = edge_pseudo_intersect(scene, u.x, *hit, rng);
        if (!proj) return ExtendStatus::Dead;
        if (!proj->visible) return ExtendStatus::EdgeFailure;
        const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(proj->edge)];

        double d_pseudo = distance(u.x, proj->pseudo);
        double d_real = distance(u.x, proj->x);
        if (d_pseudo < 1e-9 || d_real < 1e-9) return ExtendStatus::Dead;
        double cos_pseudo =
            std::abs(dot(dir, scene.mesh.normal(proj->pseudo_tri)));
        if (cos_pseudo < kGrazeEps) return ExtendStatus::Dead;
        double g = measure_conversion(scene, e, proj->x, u.x);
        if (g <= 0.0) return ExtendStatus::Dead;

        v.kind = NodeKind::Edge;
        v.x = proj->x;
        v.arrival_dir = (proj->x - u.x).normalized();
        v.edge = proj->edge;
        v.gen_pseudo = proj->pseudo;
        v.gen_pseudo_tri = proj->pseudo_tri;
        v.gen_g = g;
        v.n_edges = u.n_edges + 1;

        if (specular) return ExtendStatus::Dead;  // delta through a projection is ill-posed

        double p_area = dir_pdf * cos_pseudo / sqr(d_pseudo);
        double p_total = p_area * branch_prob * proj->p_select * g * discrete_pdf;
        MediaResult med = media_apply(f_node, d_real, cfg.media());
        v.weight = u.weight * med.amplitude / p_total;
        v.delay += med.delay;

        double pdf_real = node_direction_pdf(
            scene, cfg, u,
            path.size() >= 2 ? path[path.size() - 2].x : u.x - u.arrival_dir,
            proj->x);
        v.c_o *= outlier_metric(pdf_real, dir_pdf, d_real, d_pseudo, cos_pseudo);
    } else {
        const Material& m = scene.material_of(hit->tri);
        v.kind = NodeKind::Surface;
        v.x = hit_point;
        v.arrival_dir = dir;
        v.tri = hit->tri;
        v.normal = scene.mesh.normal(hit->tri);
        double d_real = hit->t;
        MediaResult med = media_apply(f_node, d_real, cfg.media());
        if (specular) {
            v.weight = u.weight * med.amplitude / (discrete_pdf * branch_prob);
        } else {
            double cos_hit = std::abs(dot(dir, v.normal));
            if (cos_hit < kGrazeEps) return ExtendStatus::Dead;
            double p_area = dir_pdf * cos_hit / sqr(d_real);
            v.weight = u.weight * med.amplitude / (p_area * branch_prob);
        }
        v.delay += med.delay;
        // dead end immediately if the surface cannot re-emit
        if (m.reflection <= 0.0) v.weight = 0.0;
    }

    // 4. auxiliary strip point of the previous edge node, toward the new node
    if (u.kind == NodeKind::Edge) {
        const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(u.edge)];
        auto aux = draw_strip_point(scene, e, u.x, v.x, rng);
        if (!aux) return ExtendStatus::Dead;
        u.aux_pseudo = aux->p;
        u.aux_pseudo_tri = aux->tri;
        u.aux_valid = true;
    }

    path.push_back(v);
    if (v.kind == NodeKind::Surface && v.weight == 0.0) return ExtendStatus::Dead;
    return ExtendStatus::Advanced;
}

}  // namespace

std::vector<MetaPathNode> trace_subpath(const Scene& scene,
                                        const SimulationConfig& cfg,
                                        const Vec3& origin, SubpathMode mode,
                                        Pcg32& rng) {
    std::vector<MetaPathNode> path;
    MetaPathNode start;
    start.kind = NodeKind::Endpoint;
    start.x = origin;
    start.weight = mode == SubpathMode::Forward ? std::sqrt(cfg.source_energy) : 1.0;
    path.push_back(start);
    for (int depth = 0; depth < cfg.max_depth; ++depth) {
        if (extend_subpath(scene, cfg, path, mode, rng) != ExtendStatus::Advanced)
            break;
    }
    return path;
}

std::vector<int> irr_apportion(const std::vector<double>& intensities, int slots) {
    std::vector<int> counts(intensities.size(), 0);
    if (slots <= 0 || intensities.empty()) return counts;
    double total = 0.0;
    for (double v : intensities) total += std::abs(v);
    if (total <= 0.0) return counts;
    std::vector<std::pair<double, size_t>> remainders;
    int assigned = 0;
    for (size_t i = 0; i < intensities.size(); ++i) {
        double quota = static_cast<double>(slots) * std::abs(intensities[i]) / total;
        counts[i] = static_cast<int>(quota);
        assigned += counts[i];
        remainders.emplace_back(quota - static_cast<double>(counts[i]), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; assigned < slots; ++k, ++assigned) {
        counts[remainders[static_cast<size_t>(k % remainders.size())].second]++;
    }
    return counts;
}

namespace {

struct CandidatePath {
    // nodes[0] = source endpoint, nodes[m+1] = listener endpoint
    std::vector<const MetaPathNode*> nodes;
    // strip data per node (edge nodes only): source-side and listener-side
    struct Strips {
        Vec3 src_p, lst_p;
        int src_tri = -1, lst_tri = -1;
        double g_src = 0.0, g_lst = 0.0;
        bool ok = false;
    };
    std::vector<Strips> strips;
    bool any_specular = false;
};

// Density of generating nodes[idx] from its source-side neighbor (fwd) or its
// listener-side neighbor (bwd).
double strategy_density(const Scene& scene, const SimulationConfig& cfg,
                        const CandidatePath& p, size_t idx, bool forward_side) {
    const MetaPathNode& target = *p.nodes[idx];
    size_t si = forward_side ? idx - 1 : idx + 1;
    const MetaPathNode& sampler = *p.nodes[si];
    // incident-side neighbor of the sampler (opposite of the target)
    size_t inc = forward_side ? (si == 0 ? si : si - 1) : (si + 1 == p.nodes.size() ? si : si + 1);
    Vec3 incident_from = p.nodes[inc]->x;

    if (target.kind == NodeKind::Surface) {
        double pdir = node_direction_pdf(scene, cfg, sampler, incident_from, target.x);
        if (pdir <= 0.0) return 0.0;
        double d = distance(sampler.x, target.x);
        if (d < 1e-12) return 0.0;
        double c = std::abs(dot((target.x - sampler.x) / d, target.normal));
        if (c < kGrazeEps) return 0.0;
        double branch = scene.tri_has_edges(target.tri)
                            ? 1.0 - cfg.edge_probability
                            : 1.0;
        return pdir * c / (d * d) * branch;
    }
    if (target.kind == NodeKind::Edge) {
        const auto& st = p.strips[idx];
        if (!st.ok) return 0.0;
        Vec3 strip = forward_side ? st.src_p : st.lst_p;
        int strip_tri = forward_side ? st.src_tri : st.lst_tri;
        double g = forward_side ? st.g_src : st.g_lst;
        if (g <= 0.0 || strip_tri < 0) return 0.0;
        double pdir = node_direction_pdf(scene, cfg, sampler, incident_from, strip);
        if (pdir <= 0.0) return 0.0;
        double d = distance(sampler.x, strip);
        if (d < 1e-12) return 0.0;
        double c = std::abs(dot((strip - sampler.x) / d, scene.mesh.normal(strip_tri)));
        if (c < kGrazeEps) return 0.0;
        size_t n_conv = scene.edges.tri_edges[static_cast<size_t>(strip_tri)].size();
        double p_sel = n_conv ? 1.0 / static_cast<double>(n_conv) : 0.0;
        return pdir * c / (d * d) * cfg.edge_probability * p_sel * g;
    }
    return 0.0;
}

// Assembles the candidate path source -> forward[1..i] -> backward[j..1] ->
// listener, resolving per-node strip points. Returns nullopt when an edge
// node's proxy set on the required side is empty (such a meta-path cannot be
// completed in the twice-augmented space).
std::optional<CandidatePath> build_candidate(const Scene& scene,
                                             const std::vector<MetaPathNode>& forward,
                                             size_t i,
                                             const std::vector<MetaPathNode>& backward,
                                             size_t j, Pcg32& rng) {
    CandidatePath cand;
    size_t m = i + j;
    cand.nodes.resize(m + 2);
    cand.strips.resize(m + 2);
    cand.nodes[0] = &forward[0];
    for (size_t k = 1; k <= i; ++k) cand.nodes[k] = &forward[k];
    for (size_t k = 1; k <= j; ++k) cand.nodes[i + k] = &backward[j + 1 - k];
    cand.nodes[m + 1] = &backward[0];

    for (size_t k = 1; k <= m; ++k) {
        const MetaPathNode* n = cand.nodes[k];
        cand.any_specular |= n->specular_generated;
        if (n->kind != NodeKind::Edge) {
            cand.strips[k].ok = true;
            continue;
        }
        auto& st = cand.strips[k];
        const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(n->edge)];
        bool is_fwd_node = k <= i;
        bool at_connection = is_fwd_node ? (k == i) : (k == i + 1);
        if (is_fwd_node) {
            st.src_p = n->gen_pseudo;
            st.src_tri = n->gen_pseudo_tri;
            st.g_src = n->gen_g;
        } else {
            st.lst_p = n->gen_pseudo;
            st.lst_tri = n->gen_pseudo_tri;
            st.g_lst = n->gen_g;
        }
        // opposite side: stored aux for interior nodes, fresh toward the
        // connection partner otherwise
        Vec3 other_origin = is_fwd_node ? cand.nodes[k + 1]->x : cand.nodes[k - 1]->x;
        Vec3 op;
        int ot = -1;
        if (!at_connection && n->aux_valid) {
            op = n->aux_pseudo;
            ot = n->aux_pseudo_tri;
        } else {
            auto aux = draw_strip_point(scene, e, n->x, other_origin, rng);
            if (!aux) return std::nullopt;
            op = aux->p;
            ot = aux->tri;
        }
        double og = measure_conversion(scene, e, n->x, other_origin);
        if (og <= 0.0) return std::nullopt;
        if (is_fwd_node) {
            st.lst_p = op;
            st.lst_tri = ot;
            st.g_lst = og;
        } else {
            st.src_p = op;
            st.src_tri = ot;
            st.g_src = og;
        }
        st.ok = true;
    }
    return cand;
}

// Generation densities of every strategy k (nodes 1..k forward, rest backward).
std::vector<double> strategy_pdf_vector(const Scene& scene,
                                        const SimulationConfig& cfg,
                                        const CandidatePath& p) {
    size_t m = p.nodes.size() - 2;
    std::vector<double> pk(m + 1, 1.0);
    if (m == 0) return pk;

    std::vector<double> sf(m + 1, 0.0), sb(m + 1, 0.0);
    int fwd_edges = 0;
    for (size_t i = 1; i <= m; ++i) {
        sf[i] = strategy_density(scene, cfg, p, i, true);
        if (p.nodes[i]->kind == NodeKind::Edge) fwd_edges++;
        if (fwd_edges > cfg.max_diffraction_order) sf[i] = 0.0;
    }
    int bwd_edges = 0;
    for (size_t i = m; i >= 1; --i) {
        sb[i] = strategy_density(scene, cfg, p, i, false);
        if (p.nodes[i]->kind == NodeKind::Edge) bwd_edges++;
        if (bwd_edges > cfg.max_diffraction_order) sb[i] = 0.0;
    }
    for (size_t k = 0; k <= m; ++k) {
        double prod = 1.0;
        for (size_t i = 1; i <= k; ++i) prod *= sf[i];
        for (size_t i = k + 1; i <= m; ++i) prod *= sb[i];
        if (k > static_cast<size_t>(cfg.max_depth) ||
            m - k > static_cast<size_t>(cfg.max_depth))
            prod = 0.0;
        pk[k] = prod;
    }
    return pk;
}

// Balance-heuristic (or uniform) combination weight for the sampled strategy
// with s forward-generated interaction nodes out of m.
double mis_weight(const Scene& scene, const SimulationConfig& cfg,
                  const CandidatePath& p, size_t s_sampled) {
    size_t m = p.nodes.size() - 2;
    if (m == 0) return 1.0;
    if (p.any_specular) return 1.0;  // single-strategy fallback for delta chains

    std::vector<double> pk = strategy_pdf_vector(scene, cfg, p);
    double sampled = pk[s_sampled];
    if (sampled <= 0.0) return 0.0;
    if (cfg.mis) {
        double sum = 0.0;
        for (double v : pk) sum += v;
        return sampled / sum;
    }
    int feasible = 0;
    for (double v : pk) {
        if (v > 0.0) feasible++;
    }
    return feasible ? 1.0 / static_cast<double>(feasible) : 0.0;
}

}  // namespace

std::vector<double> strategy_pdfs(const Scene& scene, const SimulationConfig& cfg,
                                  const std::vector<MetaPathNode>& forward, size_t i,
                                  const std::vector<MetaPathNode>& backward, size_t j,
                                  Pcg32& rng) {
    auto cand = build_candidate(scene, forward, i, backward, j, rng);
    if (!cand) return {};
    return strategy_pdf_vector(scene, cfg, *cand);
}

std::vector<PathSample> connect_and_weight(const Scene& scene,
                                           const SimulationConfig& cfg,
                                           const std::vector<MetaPathNode>& forward,
                                           const std::vector<MetaPathNode>& backward,
                                           Pcg32& rng) {
    std::vector<PathSample> out;
    for (size_t i = 0; i < forward.size(); ++i) {
        for (size_t j = 0; j < backward.size(); ++j) {
            if (i == 0 && j == 0) continue;  // direct path handled analytically
            const MetaPathNode& u = forward[i];
            const MetaPathNode& w = backward[j];
            if (u.weight == 0.0 || w.weight == 0.0) continue;
            int total_edges = u.n_edges + w.n_edges;
            if (total_edges > cfg.max_diffraction_order) continue;
            if (static_cast<int>(i + j) > cfg.max_depth) continue;
            if (cfg.diffraction_only && total_edges == 0) continue;

            Vec3 seg = w.x - u.x;
            double dist = seg.norm();
            if (dist < 1e-9) continue;
            Vec3 dir = seg / dist;
            if (scene.bvh.segment_occluded(scene.mesh, u.x, w.x)) continue;

            auto cand_opt = build_candidate(scene, forward, i, backward, j, rng);
            if (!cand_opt) continue;
            const CandidatePath& cand = *cand_opt;

            // response factors at the two connection endpoints
            Vec3 u_in_phys = i == 0 ? dir : u.arrival_dir;
            auto rho_u = node_response(scene, u, u_in_phys, dir);
            Vec3 w_out_phys = j == 0 ? dir : -1.0 * w.arrival_dir;
            auto rho_w = node_response(scene, w, dir, w_out_phys);
            if (!rho_u || !rho_w) continue;  // singular response: skipped
            if (*rho_u == 0.0 || *rho_w == 0.0) continue;

            MediaResult med = media_apply(1.0, dist, cfg.media());
            double amplitude = u.weight * *rho_u * med.amplitude * *rho_w * w.weight;
            double wgt = mis_weight(scene, cfg, cand, i);
            if (wgt <= 0.0) continue;
            amplitude *= wgt;

            double c_o = u.c_o * w.c_o;
            if (cfg.outlier_suppression) {
                amplitude *= suppress(c_o, cfg.outlier_threshold);
            }
            if (!std::isfinite(amplitude)) continue;

            PathSample ps;
            ps.amplitude = amplitude;
            ps.delay = u.delay + med.delay + w.delay;
            ps.c_o = c_o;
            ps.n_edges = total_edges;
            out.push_back(ps);
        }
    }
    return out;
}

namespace {

struct Walker {
    std::vector<MetaPathNode> path;
    int group = 0;
    bool active = true;
};

void trace_wave(const Scene& scene, const SimulationConfig& cfg,
                std::vector<Walker>& walkers, SubpathMode mode, Pcg32& rng) {
    int next_group = 1;
    for (int depth = 0; depth < cfg.max_depth; ++depth) {
        struct Outcome {
            size_t walker;
            ExtendStatus status;
        };
        std::vector<Outcome> outcomes;
        outcomes.reserve(walkers.size());
        for (size_t wi = 0; wi < walkers.size(); ++wi) {
            if (!walkers[wi].active) continue;
            ExtendStatus st = extend_subpath(scene, cfg, walkers[wi].path, mode, rng);
            outcomes.push_back({wi, st});
        }
        if (cfg.irr) {
            // group outcomes by the walkers' shared head (group id)
            std::vector<size_t> order(outcomes.size());
            for (size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                return walkers[outcomes[a].walker].group <
                       walkers[outcomes[b].walker].group;
            });
            size_t k = 0;
            while (k < order.size()) {
                size_t k_end = k;
                int gid = walkers[outcomes[order[k]].walker].group;
                std::vector<size_t> succ, fail;
                while (k_end < order.size() &&
                       walkers[outcomes[order[k_end]].walker].group == gid) {
                    const Outcome& oc = outcomes[order[k_end]];
                    if (oc.status == ExtendStatus::Advanced) succ.push_back(oc.walker);
                    if (oc.status == ExtendStatus::EdgeFailure) fail.push_back(oc.walker);
                    k_end++;
                }
                if (!succ.empty() && !fail.empty()) {
                    std::vector<double> intensity(succ.size());
                    for (size_t s = 0; s < succ.size(); ++s) {
                        intensity[s] = walkers[succ[s]].path.back().weight;
                    }
                    std::vector<int> dup =
                        irr_apportion(intensity, static_cast<int>(fail.size()));
                    size_t slot = 0;
                    for (size_t s = 0; s < succ.size(); ++s) {
                        walkers[succ[s]].group = next_group++;
                        if (dup[s] == 0) continue;
                        // an intersection duplicated n times has its generation
                        // probability multiplied by n+1, copies included
                        double scale = 1.0 / static_cast<double>(dup[s] + 1);
                        walkers[succ[s]].path.back().weight *= scale;
                        for (int d = 0; d < dup[s]; ++d) {
                            size_t dst = fail[slot++];
                            walkers[dst].path = walkers[succ[s]].path;
                            walkers[dst].active = true;
                            walkers[dst].group = walkers[succ[s]].group;
                        }
                    }
                    for (; slot < fail.size(); ++slot) walkers[fail[slot]].active = false;
                } else {
                    for (size_t widx : fail) walkers[widx].active = false;
                    for (size_t s = 0; s < succ.size(); ++s) {
                        walkers[succ[s]].group = next_group++;
                    }
                }
                k = k_end;
            }
            for (const Outcome& oc : outcomes) {
                if (oc.status == ExtendStatus::Dead) walkers[oc.walker].active = false;
            }
        } else {
            for (const Outcome& oc : outcomes) {
                if (oc.status != ExtendStatus::Advanced) walkers[oc.walker].active = false;
                else walkers[oc.walker].group = next_group++;
            }
        }
        bool any = false;
        for (const Walker& w : walkers) any |= w.active;
        if (!any) break;
    }
}

void render_block(const Scene& scene, const SimulationConfig& cfg, const Vec3& source,
                  const Vec3& listener, int block_index, int block_samples,
                  ImpulseResponse& ir) {
    Pcg32 rng(cfg.seed, 0x9e3779b97f4a7c15ULL ^ static_cast<uint64_t>(block_index));

    std::vector<Walker> fwd(static_cast<size_t>(block_samples));
    std::vector<Walker> bwd(static_cast<size_t>(block_samples));
    double a0 = std::sqrt(cfg.source_energy);
    for (auto& w : fwd) {
        MetaPathNode n;
        n.kind = NodeKind::Endpoint;
        n.x = source;
        n.weight = a0;
        w.path.push_back(n);
        w.group = 0;
    }
    for (auto& w : bwd) {
        MetaPathNode n;
        n.kind = NodeKind::Endpoint;
        n.x = listener;
        n.weight = 1.0;
        w.path.push_back(n);
        w.group = 0;
    }
    trace_wave(scene, cfg, fwd, SubpathMode::Forward, rng);
    trace_wave(scene, cfg, bwd, SubpathMode::Backward, rng);

    bool direct_visible =
        cfg.include_direct && !cfg.diffraction_only &&
        !scene.bvh.segment_occluded(scene.mesh, source, listener);
    double direct_amp = 0.0, direct_delay = 0.0;
    if (direct_visible) {
        double d = distance(source, listener);
        if (d > 0.0) {
            MediaResult med = media_apply(a0, d, cfg.media());
            direct_amp = med.amplitude;
            direct_delay = med.delay;
        }
    }

    for (int s = 0; s < block_samples; ++s) {
        auto samples = connect_and_weight(scene, cfg, fwd[static_cast<size_t>(s)].path,
                                          bwd[static_cast<size_t>(s)].path, rng);
        for (const PathSample& ps : samples) {
            ir.accumulate(ps.amplitude, ps.delay - cfg.time_offset);
        }
        if (direct_amp != 0.0) {
            ir.accumulate(direct_amp, direct_delay - cfg.time_offset);
        }
    }
}

}  // namespace

ImpulseResponse render_ir(const Scene& scene, const SimulationConfig& cfg,
                          const Vec3& source, const Vec3& listener) {
    int blocks = (cfg.samples + cfg.block_size - 1) / cfg.block_size;
    std::vector<ImpulseResponse> partials(
        static_cast<size_t>(blocks), ImpulseResponse(cfg.sample_rate, cfg.ir_length));

    int workers = std::max(1, cfg.workers);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto job = [&]() {
        for (;;) {
            int b = next.fetch_add(1);
            if (b >= blocks) break;
            int base = b * cfg.block_size;
            int count = std::min(cfg.block_size, cfg.samples - base);
            render_block(scene, cfg, source, listener, b, count,
                         partials[static_cast<size_t>(b)]);
        }
    };
    if (workers == 1) {
        job();
    } else {
        for (int t = 0; t < workers; ++t) pool.emplace_back(job);
        for (auto& t : pool) t.join();
    }

    ImpulseResponse ir(cfg.sample_rate, cfg.ir_length);
    for (auto& p : partials) ir.merge(p);
    ir.set_sample_count(static_cast<uint64_t>(cfg.samples));
    return ir;
}

}  // namespace edgewave
