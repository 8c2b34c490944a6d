// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edgewave/bedrf.hpp"
#include "edgewave/math.hpp"

namespace edgewave {

struct Triangle {
    int v0 = 0, v1 = 0, v2 = 0;
    int material = 0;
};

// Indexed triangle mesh. Triangles are expected to be consistently wound with
// outward-facing normals (the OBJ convention); convex-edge extraction relies
// on it to tell the solid side from the air side.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    Vec3 vertex(int i) const { return vertices[static_cast<size_t>(i)]; }
    Vec3 normal(int tri) const;      // unit outward normal
    double area(int tri) const;
    Vec3 centroid(int tri) const;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

struct Hit {
    int tri = -1;
    double t = 0.0;
    double u = 0.0, v = 0.0;  // barycentric coordinates of v1, v2
};

// A diffracting wedge: two triangles sharing an edge with a reflex exterior
// dihedral. The frame follows the wedge convention: t along the edge, n the
// exterior bisector, b completing it so the faces sit at theta = +-(pi - phi).
struct ConvexEdge {
    int a = 0, b = 0;        // endpoint vertex indices
    int tri1 = 0, tri2 = 0;  // adjacent triangles (tri1 on the +theta side)
    int c1 = 0, c2 = 0;      // opposite vertices of tri1/tri2
    double phi = 0.0;        // half-wedge angle in (0, pi/2)
    Vec3 n, t, bvec;         // orthonormal frame
};

struct EdgeExtraction {
    std::vector<ConvexEdge> edges;
    std::vector<std::string> warnings;   // degenerate / non-manifold reports
    // For each triangle, indices into `edges` of its convex edges.
    std::vector<std::vector<int>> tri_edges;
};

// All edges whose exterior dihedral exceeds pi + dihedral_tolerance. Boundary
// edges and edges shared by more than two triangles are skipped (reported).
EdgeExtraction extract_convex_edges(const TriangleMesh& mesh,
                                    double dihedral_tolerance = 1e-6);

struct WedgeFrame {
    Vec3 n, t, b;
    double phi = 0.0;
};

// Frame of a wedge at a point on its edge. Throws on degenerate adjacency.
WedgeFrame wedge_frame(const TriangleMesh& mesh, const ConvexEdge& edge,
                       const Vec3& origin_point);

// Angle extraction. d_in is the unit propagation direction into the edge
// point, d_out the unit propagation direction away from it. Both elevations
// are measured with the same edge-axis sense, so an undeflected ray maps to
// (theta_o, varphi_o) = (theta_i, varphi_i) up to the theta sign convention
// and the diffraction cone is varphi_o == varphi_i. Returns nullopt when a
// direction points into the solid wedge.
std::optional<WedgeAngles> directions_to_angles(const WedgeFrame& frame,
                                                const Vec3& d_in, const Vec3& d_out);

Vec3 incident_direction_from_angles(const WedgeFrame& frame, double theta_i,
                                    double varphi_i);
Vec3 outgoing_direction_from_angles(const WedgeFrame& frame, double theta_o,
                                    double varphi_o);

// Binned-SAH BVH, at most 4 triangles per leaf.
class Bvh {
  public:
    Bvh() = default;
    explicit Bvh(const TriangleMesh& mesh);

    // Nearest positive hit; ties at equal distance break to the lowest
    // triangle id. t_min/t_max bound the accepted ray parameter.
    std::optional<Hit> intersect(const TriangleMesh& mesh, const Ray& ray,
                                 double t_min = 1e-9,
                                 double t_max = std::numeric_limits<double>::infinity()) const;

    // True when the open segment between p and q is blocked. The eps fraction
    // trims both ends so shared endpoints do not self-occlude.
    bool segment_occluded(const TriangleMesh& mesh, const Vec3& p, const Vec3& q,
                          double eps = 1e-6) const;

    // Triangle ids whose bounds overlap the given AABB.
    void collect_overlapping(const Vec3& bmin, const Vec3& bmax,
                             std::vector<int>& out) const;

    struct Crossing {
        double t;
        int tri;
        double cos_theta;  // |direction . triangle normal|
    };
    // Every triangle crossing along the ray with t in (t_min, t_max), in no
    // particular order.
    void collect_ray_crossings(const TriangleMesh& mesh, const Ray& ray,
                               std::vector<Crossing>& out, double t_min = 1e-9,
                               double t_max = std::numeric_limits<double>::infinity()) const;

    bool empty() const { return nodes_.empty(); }

  private:
    struct Node {
        Vec3 bmin, bmax;
        int left = -1, right = -1;
        int first = 0, count = 0;  // leaf when count > 0
    };
    std::vector<Node> nodes_;
    std::vector<int> tri_order_;
    int build(const TriangleMesh& mesh, std::vector<int>& idx, int begin, int end,
              std::vector<Vec3>& centroids);
};

// Reference all-triangle scan with the same tie-break as Bvh::intersect.
std::optional<Hit> brute_force_intersect(const TriangleMesh& mesh, const Ray& ray,
                                         double t_min = 1e-9);

// Sub-intervals of [0,1] on the segment [seg_start, seg_end] that are mutually
// visible with apex, clipped exactly per occluder (no sampling). Intervals are
// disjoint and sorted.
std::vector<std::pair<double, double>> visible_subsegments(const Vec3& apex,
                                                           const Vec3& seg_start,
                                                           const Vec3& seg_end,
                                                           const TriangleMesh& mesh,
                                                           const Bvh& bvh);

double interval_total_length(const std::vector<std::pair<double, double>>& iv);

}  // namespace edgewave
