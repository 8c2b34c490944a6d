// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "edgewave/geometry.hpp"
#include "edgewave/ir.hpp"
#include "edgewave/rng.hpp"
#include "edgewave/sampler.hpp"

namespace edgewave {

struct MediaTerm {
    double absorption = 0.0;   // 1/m
    double sound_speed = 344.0;
};

// Amplitude-based media term: e^{-alpha r} / r with delay r / c.
struct MediaResult {
    double amplitude;
    double delay;
};
MediaResult media_apply(double amplitude, double r, const MediaTerm& media);

struct SimulationConfig {
    double sound_speed = 344.0;
    double air_density = 1.21;     // kg/m^3, metadata only
    double source_energy = 1.0;    // J; mapped to unit amplitude at 1 m
    double absorption = 0.0;       // 1/m
    int samples = 12000;
    int max_diffraction_order = 2;
    int max_depth = 6;
    bool mis = true;
    bool irr = true;
    bool outlier_suppression = true;
    double outlier_threshold = 100.0;  // C_o*
    double sample_rate = 48000.0;
    double ir_length = 0.2;            // seconds
    uint64_t seed = 1;
    int workers = 1;
    double edge_probability = 1.0;     // edge-interaction branch probability
    double time_offset = 0.0;          // subtracted from every path delay
    bool include_direct = true;
    bool diffraction_only = false;     // keep only paths with >= 1 edge node
    int block_size = 256;              // samples per deterministic wave block

    MediaTerm media() const { return {absorption, sound_speed}; }
};

struct Scene {
    TriangleMesh mesh;
    Bvh bvh;
    EdgeExtraction edges;
    std::vector<Material> materials;  // indexed by Triangle::material
    std::vector<double> tri_cum_area; // cumulative triangle areas
    double total_area = 0.0;

    const Material& material_of(int tri) const;
    bool tri_has_edges(int tri) const {
        return !edges.tri_edges[static_cast<size_t>(tri)].empty();
    }
};

Scene make_scene(TriangleMesh mesh, std::vector<Material> materials);

enum class NodeKind { Endpoint, Surface, Edge };

// One node of a traced subpath in the twice-augmented path space. Edge nodes
// carry the generating strip point (visible from the tracing predecessor) and
// an auxiliary strip point on the opposite side (visible from the successor),
// which is what makes both tracing directions evaluable for MIS.
struct MetaPathNode {
    NodeKind kind = NodeKind::Endpoint;
    Vec3 x;
    Vec3 arrival_dir;        // unit, along the tracing direction into the node
    double weight = 1.0;     // cumulative signed f/p including this node's creation
    double delay = 0.0;      // cumulative segment delay, seconds
    double c_o = 1.0;        // cumulative outlier ratio over edge hops
    int n_edges = 0;

    int tri = -1;            // surface: hit triangle
    Vec3 normal;             // surface: outward normal

    int edge = -1;           // edge: ConvexEdge index
    Vec3 gen_pseudo;         // edge: strip point visible from the predecessor
    int gen_pseudo_tri = -1;
    double gen_g = 0.0;      // edge: strip mass G w.r.t. the predecessor
    Vec3 aux_pseudo;         // edge: strip point visible from the successor
    int aux_pseudo_tri = -1;
    bool aux_valid = false;

    bool specular_generated = false;
};

struct PathSample {
    double amplitude = 0.0;  // signed, already MIS- and suppression-weighted
    double delay = 0.0;
    double c_o = 1.0;
    int n_edges = 0;
};

// --- spec-level building blocks (also used internally) ---

struct EdgeProjection {
    int edge = -1;
    Vec3 pseudo;        // x' on the hit triangle
    int pseudo_tri = -1;
    Vec3 x;             // real point on the edge segment
    double p_select = 0.0;
    bool visible = false;  // V(origin, x)
};

// Projects a pseudo-intersection onto one convex edge of the hit triangle,
// selected uniformly. Returns nullopt when the triangle has no convex edges.
std::optional<EdgeProjection> edge_pseudo_intersect(const Scene& scene,
                                                    const Vec3& origin,
                                                    const Hit& hit, Pcg32& rng);

// Strip mass G(x; origin) = sum_k h_k * Int_{q(S_x ∩ x c_k)} u du over the two
// neighbor triangles, with S_x the sub-segments visible from origin clipped by
// occluders. The per-length density of real points generated through a pseudo
// hit with area density p_A is p_A * p_select * G.
double measure_conversion(const Scene& scene, const ConvexEdge& edge, const Vec3& x,
                          const Vec3& origin);

// Draws a strip point with density proportional to u du on the sub-segments of
// the proxy set visible from `origin`. Returns nullopt when the set is empty.
struct StripPoint {
    Vec3 p;
    int tri = -1;
};
std::optional<StripPoint> draw_strip_point(const Scene& scene, const ConvexEdge& edge,
                                           const Vec3& x, const Vec3& origin,
                                           Pcg32& rng);

// Outlier ratio of one edge hop: (p(x - xs) / p(x' - xs)) *
// (|x' - xs|^2 / (|x - xs|^2 cos theta)), with theta at the pseudo triangle.
double outlier_metric(double pdf_real_dir, double pdf_pseudo_dir, double dist_real,
                      double dist_pseudo, double cos_pseudo);

// Logistic suppression coefficient C_s; C_s * C_o is bounded by C_o*.
double suppress(double c_o, double c_o_star);

enum class SubpathMode { Forward, Backward };

// Traces one subpath (no inverse Russian roulette; used by tests and by the
// wave tracer below). Nodes carry cumulative weights per the expanded
// estimator; node 0 is the endpoint itself.
std::vector<MetaPathNode> trace_subpath(const Scene& scene,
                                        const SimulationConfig& cfg,
                                        const Vec3& origin, SubpathMode mode,
                                        Pcg32& rng);

// Largest-remainder apportionment of `slots` duplicates over success
// intensities; returns per-success duplicate counts summing to `slots`.
std::vector<int> irr_apportion(const std::vector<double>& intensities, int slots);

// Generation densities p_k of every strategy (k forward-generated interaction
// nodes) for the path connecting forward[0..i] to backward[0..j]; one shared
// set of auxiliary strip draws. Empty when the meta-path cannot be completed.
std::vector<double> strategy_pdfs(const Scene& scene, const SimulationConfig& cfg,
                                  const std::vector<MetaPathNode>& forward, size_t i,
                                  const std::vector<MetaPathNode>& backward, size_t j,
                                  Pcg32& rng);

// Connects every forward/backward node pair of one sample, applying MIS
// weighting (balance heuristic when cfg.mis, uniform over feasible strategies
// otherwise) and outlier suppression. Emits one PathSample per connection.
std::vector<PathSample> connect_and_weight(const Scene& scene,
                                           const SimulationConfig& cfg,
                                           const std::vector<MetaPathNode>& forward,
                                           const std::vector<MetaPathNode>& backward,
                                           Pcg32& rng);

// Full renderer: deterministic for fixed (seed, block_size) regardless of
// worker count. The direct line-of-sight contribution is added analytically.
ImpulseResponse render_ir(const Scene& scene, const SimulationConfig& cfg,
                          const Vec3& source, const Vec3& listener);

}  // namespace edgewave
