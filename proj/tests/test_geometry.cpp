// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "edgewave/geometry.hpp"
#include "edgewave/rng.hpp"
#include "edgewave/scenes.hpp"

using namespace edgewave;

TEST_CASE("convex edge extraction counts") {
    // axis-aligned unit cube: 18 mesh edges, the 6 coplanar face diagonals
    // are excluded, all 12 body edges are convex
    TriangleMesh cube = scenes::unit_cube_mesh();
    auto ex = extract_convex_edges(cube);
    CHECK(ex.edges.size() == 12);

    // flat quad: the diagonal is coplanar, the boundary has one triangle
    TriangleMesh quad = scenes::flat_quad_mesh();
    CHECK(extract_convex_edges(quad).edges.empty());

    // boxes benchmark: 26 triangles and 16 diffraction edges
    auto boxes = scenes::boxes();
    CHECK(boxes.scene.mesh.triangles.size() == 26);
    CHECK(boxes.scene.edges.edges.size() == 16);
}

TEST_CASE("extraction is independent of triangle order") {
    TriangleMesh cube = scenes::unit_cube_mesh();
    auto base = extract_convex_edges(cube);
    auto key_set = [&](const EdgeExtraction& e) {
        std::vector<std::pair<int, int>> keys;
        for (const auto& ed : e.edges) keys.push_back(std::minmax(ed.a, ed.b));
        std::sort(keys.begin(), keys.end());
        return keys;
    };
    TriangleMesh shuffled = cube;
    Pcg32 rng(5, 5);
    for (size_t i = shuffled.triangles.size(); i > 1; --i) {
        std::swap(shuffled.triangles[i - 1],
                  shuffled.triangles[rng.next_bounded(static_cast<uint32_t>(i))]);
    }
    auto other = extract_convex_edges(shuffled);
    CHECK(key_set(base) == key_set(other));
}

TEST_CASE("non-manifold edges are skipped with a warning") {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, -1, 0}};
    m.triangles = {{0, 1, 2, 0}, {0, 1, 3, 0}, {0, 1, 4, 0}};
    auto ex = extract_convex_edges(m);
    CHECK(ex.edges.empty());
    bool reported = false;
    for (const auto& w : ex.warnings) {
        reported |= w.find("more than two") != std::string::npos;
    }
    CHECK(reported);
}

TEST_CASE("wedge frame of perpendicular half planes") {
    auto setup = scenes::single_wedge();
    REQUIRE(setup.scene.edges.edges.size() == 1);
    const ConvexEdge& e = setup.scene.edges.edges[0];
    WedgeFrame f = wedge_frame(setup.scene.mesh, e, {0, 0, 0});
    CHECK(f.phi == doctest::Approx(kPi / 4).epsilon(1e-9));
    // n bisects the exterior region: (1,1,0)/sqrt(2)
    CHECK(std::abs(f.n.x - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(f.n.y - 1 / std::sqrt(2.0)) < 1e-12);
    // orthonormality within 1e-12
    CHECK(std::abs(dot(f.n, f.t)) < 1e-12);
    CHECK(std::abs(dot(f.n, f.b)) < 1e-12);
    CHECK(std::abs(dot(f.t, f.b)) < 1e-12);
    CHECK(std::abs(f.n.norm() - 1.0) < 1e-12);
    CHECK(std::abs(f.t.norm() - 1.0) < 1e-12);
    CHECK(std::abs(f.b.norm() - 1.0) < 1e-12);
    // faces sit at theta = +-(pi - phi)
    Vec3 u1{-1, 0, 0};
    double th = std::atan2(dot(u1, f.b), dot(u1, f.n));
    CHECK(std::abs(std::abs(th) - (kPi - f.phi)) < 1e-9);
}

TEST_CASE("thin screen limit") {
    auto slit = scenes::single_slit();
    const ConvexEdge& e = slit.scene.edges.edges[static_cast<size_t>(slit.edge_left)];
    CHECK(e.phi < 0.01);
    CHECK(e.phi > 0.0);
}

TEST_CASE("direction and angle round trip") {
    auto setup = scenes::single_wedge();
    const ConvexEdge& e = setup.scene.edges.edges[0];
    WedgeFrame f = wedge_frame(setup.scene.mesh, e, {0, 0, 0});

    // frame axes map to the origin of angles
    auto w = directions_to_angles(f, -1.0 * f.n, f.n);
    REQUIRE(w.has_value());
    CHECK(std::abs(w->theta_i) < 1e-12);
    CHECK(std::abs(w->varphi_i) < 1e-12);
    CHECK(std::abs(w->theta_o) < 1e-12);
    CHECK(std::abs(w->varphi_o) < 1e-12);

    Pcg32 rng(9, 6);
    for (int i = 0; i < 100000; ++i) {
        double ti = rng.uniform(-(kPi - f.phi) + 1e-6, kPi - f.phi - 1e-6);
        double vi = rng.uniform(-kPi / 2 + 1e-6, kPi / 2 - 1e-6);
        double to = rng.uniform(-(kPi - f.phi) + 1e-6, kPi - f.phi - 1e-6);
        double vo = rng.uniform(-kPi / 2 + 1e-6, kPi / 2 - 1e-6);
        Vec3 din = incident_direction_from_angles(f, ti, vi);
        Vec3 dout = outgoing_direction_from_angles(f, to, vo);
        CHECK(std::abs(din.norm() - 1.0) < 1e-12);
        auto back = directions_to_angles(f, din, dout);
        REQUIRE(back.has_value());
        CHECK(std::abs(back->theta_i - ti) < 1e-10);
        CHECK(std::abs(back->varphi_i - vi) < 1e-10);
        CHECK(std::abs(back->theta_o - to) < 1e-10);
        CHECK(std::abs(back->varphi_o - vo) < 1e-10);
    }

    // directions into the solid wedge are rejected
    Vec3 into_solid = incident_direction_from_angles(f, kPi - f.phi + 0.05, 0.0);
    CHECK_FALSE(directions_to_angles(f, into_solid, f.n).has_value());
}

TEST_CASE("bvh intersection agrees with brute force") {
    TriangleMesh cube = scenes::unit_cube_mesh();
    Bvh bvh(cube);

    // ray from the center toward +x hits the x = 1 face at distance 0.5
    Ray r{{0.5, 0.5, 0.5}, {1, 0, 0}};
    auto hit = bvh.intersect(cube, r);
    REQUIRE(hit.has_value());
    CHECK(hit->t == doctest::Approx(0.5).epsilon(1e-12));
    Vec3 n = cube.normal(hit->tri);
    CHECK(std::abs(n.x - 1.0) < 1e-12);

    // ray outside and parallel misses
    CHECK_FALSE(bvh.intersect(cube, {{2, 2, 2}, {0, 0, 1}}).has_value());

    // random rays: identical hits (triangle id and distance) vs brute force
    Pcg32 rng(21, 7);
    auto boxes = scenes::boxes();
    Bvh bvh2(boxes.scene.mesh);
    for (int i = 0; i < 100000; ++i) {
        Vec3 o{rng.uniform(-20, 20), rng.uniform(-2, 10), rng.uniform(-20, 20)};
        double z = rng.uniform(-1, 1);
        double a = rng.uniform(0, kTwoPi);
        double rr = std::sqrt(1 - z * z);
        Ray ray{o, {rr * std::cos(a), rr * std::sin(a), z}};
        auto h1 = bvh2.intersect(boxes.scene.mesh, ray);
        auto h2 = brute_force_intersect(boxes.scene.mesh, ray);
        REQUIRE(h1.has_value() == h2.has_value());
        if (h1) {
            CHECK(h1->tri == h2->tri);
            CHECK(h1->t == doctest::Approx(h2->t).epsilon(1e-14));
        }
    }
}

TEST_CASE("visible subsegments") {
    TriangleMesh empty;
    Bvh none(empty);
    Vec3 apex{0, 1, 0};
    Vec3 s0{-1, 0, 0}, s1{1, 0, 0};
    auto iv = visible_subsegments(apex, s0, s1, empty, none);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0].first == doctest::Approx(0.0));
    CHECK(iv[0].second == doctest::Approx(1.0));

    // a large blocker between apex and segment removes everything
    TriangleMesh blocker;
    blocker.vertices = {{-5, 0.5, -5}, {5, 0.5, -5}, {0, 0.5, 10}};
    blocker.triangles = {{0, 1, 2, 0}};
    Bvh bb(blocker);
    CHECK(visible_subsegments(apex, s0, s1, blocker, bb).empty());

    // occluder shadowing the middle third: strip at half height spanning
    // x in [-1/6, 1/6] shadows t in [1/3, 2/3]
    TriangleMesh mid;
    mid.vertices = {{-1.0 / 6, 0.5, -5}, {1.0 / 6, 0.5, -5}, {1.0 / 6, 0.5, 5},
                    {-1.0 / 6, 0.5, 5}};
    mid.triangles = {{0, 1, 2, 0}, {0, 2, 3, 0}};
    Bvh bm(mid);
    auto iv2 = visible_subsegments(apex, s0, s1, mid, bm);
    double total = interval_total_length(iv2);
    CHECK(total == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(iv2.size() == 2);

    // dense point-visibility raster agrees within 1e-3
    int visible_count = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        double t = (i + 0.5) / n;
        Vec3 p = s0 + t * (s1 - s0);
        if (!bm.segment_occluded(mid, apex, p)) visible_count++;
    }
    CHECK(std::abs(static_cast<double>(visible_count) / n - total) < 1e-3);
}

TEST_CASE("visibility is monotone under added occluders") {
    Pcg32 rng(3, 8);
    Vec3 apex{0.2, 1.5, 0.1};
    Vec3 s0{-1, 0, 0}, s1{1, 0, 0.2};
    TriangleMesh m;
    double prev = 1.0;
    for (int add = 0; add < 8; ++add) {
        Vec3 c{rng.uniform(-0.8, 0.8), rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3)};
        int base = static_cast<int>(m.vertices.size());
        for (int k = 0; k < 3; ++k) {
            m.vertices.push_back(c + Vec3{rng.uniform(-0.3, 0.3),
                                          rng.uniform(-0.3, 0.3),
                                          rng.uniform(-0.3, 0.3)});
        }
        m.triangles.push_back({base, base + 1, base + 2, 0});
        Bvh b(m);
        double total = interval_total_length(visible_subsegments(apex, s0, s1, m, b));
        CHECK(total <= prev + 1e-12);
        prev = total;
    }
}
