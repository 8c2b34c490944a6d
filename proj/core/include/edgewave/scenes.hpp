// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "edgewave/transport.hpp"

namespace edgewave::scenes {

// Right-angle wedge (half-wedge angle pi/4): two face rectangles meeting at an
// edge along the z axis, open mesh, solid toward (-x, -y). Source 2 m from the
// edge at pi/6 above the top-face plane, listener at (1, -1) in the shadow.
struct WedgeSetup {
    Scene scene;
    Vec3 source;
    Vec3 listener;
    int edge_index = 0;  // the single diffracting edge
};
WedgeSetup single_wedge(double half_length = 20.0, double face_size = 30.0,
                        BoundaryCondition bc = BoundaryCondition::Dirichlet);

// Two tent-shaped screens (apex half-angle pi/6), apex edges 2 m apart and
// 2 m above source/listener height; only the double-diffraction path connects.
struct DoubleWedgeSetup {
    Scene scene;
    Vec3 source;
    Vec3 listener;
    int edge1 = -1;  // apex edge of the source-side screen
    int edge2 = -1;
};
DoubleWedgeSetup double_wedge(double half_length = 20.0,
                              BoundaryCondition bc = BoundaryCondition::Dirichlet);

// Floor (6 triangles) plus two open-bottom boxes of footprint 12 x 12 and
// height 4: 26 triangles, 16 diffraction edges.
struct BoxesSetup {
    Scene scene;
    Vec3 source;
    Vec3 listener;
};
BoxesSetup boxes(BoundaryCondition bc = BoundaryCondition::Neumann);

// Two thin folded screens leaving a vertical slit of the given width in the
// y = 0 plane; slit edges run along z at x = +-width/2.
struct SlitSetup {
    Scene scene;
    double source_distance = 400.0;
    Vec3 source;        // far source approximating plane incidence
    double source_amp;  // emission amplitude renormalizing to unit incidence
    int edge_left = -1, edge_right = -1;
};
SlitSetup single_slit(double width = 2.0, double half_length = 40.0,
                      double screen_half_extent = 12.0,
                      BoundaryCondition bc = BoundaryCondition::Neumann);

TriangleMesh unit_cube_mesh();
TriangleMesh flat_quad_mesh();

}  // namespace edgewave::scenes
