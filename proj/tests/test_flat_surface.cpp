#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "teichsim/flat_surface.hpp"

using namespace teichsim;
using namespace teichsim::flat;

namespace {

Polygon square() {
    Polygon p;
    p.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(0)), Vec(Rat(1), Rat(1)),
           Vec(Rat(0), Rat(1))};
    return p;
}

std::set<std::pair<double, double>> holonomy_set(
    const std::vector<SaddleConnection>& v) {
    std::set<std::pair<double, double>> out;
    for (const auto& sc : v)
        out.insert({to_double(sc.holonomy.x), to_double(sc.holonomy.y)});
    return out;
}

}  // namespace

TEST_CASE("surface construction validates its input") {
    Polygon sq = square();
    std::vector<Gluing> torus_gl{{0, 0, 0, 2, GluingKind::Translation},
                                 {0, 1, 0, 3, GluingKind::Translation}};
    CHECK_NOTHROW(build_surface({sq}, torus_gl));

    Polygon cw = sq;
    std::reverse(cw.v.begin(), cw.v.end());
    CHECK_THROWS_WITH_AS(build_surface({cw}, torus_gl),
                         "polygon not counterclockwise", std::invalid_argument);

    Polygon bow;
    bow.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(1)), Vec(Rat(1), Rat(0)),
             Vec(Rat(0), Rat(1))};
    CHECK_THROWS_AS(build_surface({bow}, torus_gl), std::invalid_argument);

    CHECK_THROWS_WITH_AS(
        build_surface({sq}, {{0, 0, 0, 2, GluingKind::Translation}}),
        "gluing incomplete", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        build_surface({sq}, {{0, 0, 0, 0, GluingKind::Translation},
                             {0, 1, 0, 3, GluingKind::Translation}}),
        "edge glued to itself", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        build_surface({sq}, {{0, 0, 0, 5, GluingKind::Translation},
                             {0, 1, 0, 3, GluingKind::Translation}}),
        "bad edge reference", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        build_surface({sq}, {{0, 0, 0, 1, GluingKind::Translation},
                             {0, 2, 0, 3, GluingKind::Translation}}),
        "direction mismatch", std::invalid_argument);

    Polygon rect;
    rect.v = {Vec(Rat(0), Rat(0)), Vec(Rat(2), Rat(0)), Vec(Rat(2), Rat(1)),
              Vec(Rat(0), Rat(1))};
    CHECK_THROWS_WITH_AS(
        build_surface({rect}, {{0, 0, 0, 1, GluingKind::Translation},
                               {0, 2, 0, 3, GluingKind::Translation}}),
        "edge length mismatch", std::invalid_argument);
}

TEST_CASE("square torus and L surface invariants") {
    FlatSurface t = make_square_torus();
    CHECK(t.genus == 1);
    CHECK(t.area == 1);
    CHECK(t.cone_points.size() == 1);
    CHECK(t.cone_points[0].angle_multiple == 2);
    CHECK(t.cone_points[0].marked);
    CHECK(t.cone_points[0].singular());

    FlatSurface l = make_l_surface();
    CHECK(l.genus == 2);
    CHECK(l.area == 3);
    CHECK(l.cone_points.size() == 1);
    CHECK(l.cone_points[0].angle_multiple == 6);
    CHECK(l.cone_points[0].corners.size() == 8);
}

TEST_CASE("gauss-bonnet style genus bookkeeping on a two-square torus") {
    // two unit squares in a horizontal strip glued into a torus
    Polygon a = square();
    Polygon b = square();
    for (auto& v : b.v) v = v + Vec(Rat(1), Rat(0));
    std::vector<Gluing> gl{{0, 0, 0, 2, GluingKind::Translation},
                           {1, 0, 1, 2, GluingKind::Translation},
                           {0, 1, 1, 3, GluingKind::Translation},
                           {1, 1, 0, 3, GluingKind::Translation}};
    FlatSurface s = build_surface({a, b}, gl);
    CHECK(s.genus == 1);
    CHECK(s.area == 2);
    for (const auto& c : s.cone_points) CHECK(c.angle_multiple == 2);
}

TEST_CASE("orientation double cover of the pillowcase is a torus") {
    Polygon hex;
    hex.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(0)), Vec(Rat(2), Rat(0)),
             Vec(Rat(2), Rat(1)), Vec(Rat(1), Rat(1)), Vec(Rat(0), Rat(1))};
    std::vector<Gluing> gl{{0, 0, 0, 1, GluingKind::Semi},
                           {0, 3, 0, 4, GluingKind::Semi},
                           {0, 2, 0, 5, GluingKind::Translation}};
    FlatSurface pillow = build_surface({hex}, gl);
    CHECK(pillow.has_semi);
    CHECK(pillow.genus == 0);
    int odd = 0;
    for (const auto& c : pillow.cone_points)
        if (c.angle_multiple % 2 == 1) ++odd;
    CHECK(odd == 4);

    FlatSurface cover = orientation_double_cover(pillow);
    CHECK_FALSE(cover.has_semi);
    CHECK(cover.genus == 1);
    CHECK(cover.area == pillow.area * 2);
}

TEST_CASE("exact ray tracing on the square torus") {
    FlatSurface t = make_square_torus();
    RayHit h = trace_ray(t, 0, 0, Vec(Rat(1), Rat(1)), Rat(2));
    CHECK(h.hit);
    CHECK(h.t == 1);
    CHECK(h.end_cone == 0);

    h = trace_ray(t, 0, 0, Vec(Rat(2), Rat(1)), Rat(2));
    CHECK(h.hit);
    CHECK(h.t == 1);

    // an irrational-like direction misses within the cap
    h = trace_ray(t, 0, 0, Vec(Rat(1), Rat(100003, 141421)), Rat(5));
    CHECK_FALSE(h.hit);

    CHECK_THROWS_AS(trace_ray(t, 5, 0, Vec(Rat(1), Rat(1)), Rat(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(trace_ray(t, 0, 0, Vec(), Rat(1)), std::invalid_argument);
}

TEST_CASE("saddle connections on tori match the lattice oracle") {
    FlatSurface t = make_square_torus();
    auto c1 = enumerate_saddle_connections(t, 1.0);
    CHECK(c1.size() == 4);
    CHECK(holonomy_set(c1) ==
          std::set<std::pair<double, double>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});

    auto c2 = enumerate_saddle_connections(t, std::sqrt(2.0));
    CHECK(c2.size() == 8);

    for (double L : {1.7, 2.5}) {
        CAPTURE(L);
        CHECK(holonomy_set(enumerate_saddle_connections(t, L)) ==
              holonomy_set(torus_primitive_connections(t, L)));
    }

    FlatSurface sh = make_sheared_torus(Rat(1, 3));
    CHECK(holonomy_set(enumerate_saddle_connections(sh, 2.2)) ==
          holonomy_set(torus_primitive_connections(sh, 2.2)));
}

TEST_CASE("saddle connections on the L surface") {
    FlatSurface l = make_l_surface();
    auto c1 = enumerate_saddle_connections(l, 1.0);
    CHECK(holonomy_set(c1) ==
          std::set<std::pair<double, double>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});

    auto c2 = enumerate_saddle_connections(l, 2.3);
    Rat cap = Rat(23, 10) * Rat(23, 10);
    for (const auto& sc : c2) {
        CHECK(sc.holonomy.norm2() <= cap * (Rat(1) + Rat(1, 100000000)));
        CHECK(sc.start_cone == 0);
        CHECK(sc.end_cone == 0);
    }
    auto hs = holonomy_set(c2);
    CHECK(hs.count({1, 1}) == 1);
    CHECK(hs.count({2, 1}) == 1);
    CHECK(hs.count({1, 2}) == 1);
    // straight paths with these holonomies run through an intermediate
    // singular point, so they are not saddle connections
    CHECK(hs.count({2, 0}) == 0);
    CHECK(hs.count({0, 2}) == 0);
    CHECK(hs.count({2, 2}) == 0);  // too long anyway
}

TEST_CASE("teichmuller flow rescales holonomy and preserves area") {
    FlatSurface t = make_square_torus();
    FlatSurface t2 = apply_flow_exact(t, Rat(2));
    CHECK(t2.area == 1);
    CHECK(t2.polygons[0].edge(0) == Vec(Rat(2), Rat(0)));
    CHECK(t2.polygons[0].edge(1) == Vec(Rat(0), Rat(1, 2)));

    FlatCurve c = torus_line(t, 1, 1);
    auto [h0, v0] = unsigned_holonomy(c);
    FlatCurve cf = apply_flow(c, 0.5);
    auto [h1, v1] = unsigned_holonomy(cf);
    CHECK(h1 == doctest::Approx(h0 * std::exp(0.5)).epsilon(1e-9));
    CHECK(v1 == doctest::Approx(v0 * std::exp(-0.5)).epsilon(1e-9));

    Holonomy hol{3.0, 5.0};
    Holonomy back = apply_flow(apply_flow(hol, 1.25), -1.25);
    CHECK(back.h == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(back.v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("vertical decomposition of periodic surfaces") {
    FlatSurface t = make_square_torus();
    auto dec = vertical_decomposition(t);
    REQUIRE(dec.cylinders.size() == 1);
    CHECK(dec.minimal.empty());
    CHECK(dec.cylinders[0].circumference == 1);
    CHECK(dec.cylinders[0].width == 1);
    CHECK(dec.cylinders[0].area == 1);
    CHECK(dec.total_area == 1);
    REQUIRE(dec.cylinders[0].boundary_left.size() == 1);
    CHECK(dec.cylinders[0].boundary_left[0].holonomy == Vec(Rat(0), Rat(1)));

    FlatSurface l = make_l_surface();
    auto dl = vertical_decomposition(l);
    REQUIRE(dl.cylinders.size() == 2);
    CHECK(dl.minimal.empty());
    CHECK(dl.total_area == 3);
    std::vector<Rat> circs{dl.cylinders[0].circumference,
                           dl.cylinders[1].circumference};
    std::sort(circs.begin(), circs.end());
    CHECK(circs[0] == 1);
    CHECK(circs[1] == 2);
    for (const auto& cyl : dl.cylinders) {
        CHECK(cyl.width == 1);
        CHECK(cyl.area == cyl.circumference * cyl.width);
        CHECK_FALSE(cyl.boundary_left.empty());
        CHECK_FALSE(cyl.boundary_right.empty());
        Rat total = 0;
        for (const auto& b : cyl.boundary_left) total += abs_rat(b.holonomy.y);
        CHECK(total == cyl.circumference);
    }
}

TEST_CASE("vertical decomposition of a minimal direction") {
    Rat gamma = iet::golden_ratio();
    FlatSurface s = make_sheared_torus(Rat(1) - gamma);
    auto dec = vertical_decomposition(s, 4000);
    CHECK(dec.cylinders.empty());
    REQUIRE(dec.minimal.size() == 1);
    CHECK(dec.minimal[0].area == 1);
    CHECK(dec.total_area == 1);
    const auto& susp = dec.minimal[0].suspension;
    REQUIRE(susp.heights.size() >= 2);
    for (const auto& h : susp.heights) CHECK(h > 0);
    CHECK(to_double(susp.area()) > 0);
}

TEST_CASE("first return to a full horizontal section") {
    FlatSurface t = make_square_torus();
    ZipperedRectangles z = first_return(t, {0, Vec(Rat(0), Rat(0)), Rat(1)});
    REQUIRE(z.widths.size() == 1);
    CHECK(z.widths[0] == 1);
    CHECK(z.heights[0] == 1);

    Rat gamma = iet::golden_ratio();
    FlatSurface s = make_sheared_torus(Rat(1) - gamma);
    ZipperedRectangles zg = first_return(s, {0, Vec(Rat(0), Rat(0)), Rat(1)});
    REQUIRE(zg.widths.size() == 2);
    CHECK(zg.widths[0] == Rat(1) - gamma);
    CHECK(zg.widths[1] == gamma);
    CHECK(zg.heights[0] == 1);
    CHECK(zg.heights[1] == 1);
    // the base map is the rotation by gamma
    auto rot = iet::rotation(gamma);
    CHECK(zg.base_map.lengths == rot.lengths);
    CHECK(zg.base_map.perm == rot.perm);
}

TEST_CASE("first return error cases") {
    FlatSurface t = make_square_torus();
    CHECK_THROWS_WITH_AS(
        first_return(t, {0, Vec(Rat(0), Rat(0)), Rat(1, 2)}),
        "use cylinder data directly", std::invalid_argument);

    FlatSurface l = make_l_surface();
    CHECK_THROWS_WITH_AS(
        first_return(l, {0, Vec(Rat(1, 2), Rat(1)), Rat(1)}),
        "section meets a singularity", std::invalid_argument);

    CHECK_THROWS_AS(first_return(t, {3, Vec(Rat(0), Rat(0)), Rat(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(first_return(t, {0, Vec(Rat(0), Rat(0)), Rat(0)}),
                    std::invalid_argument);
}

TEST_CASE("intersection numbers of torus lines match the algebraic formula") {
    FlatSurface t = make_square_torus();
    FlatCurve a10 = torus_line(t, 1, 0);
    FlatCurve a01 = torus_line(t, 0, 1, Vec(Rat(1, 5), Rat(1, 11)));
    CHECK(intersection_number(t, a10, a01) == 1);
    CHECK(intersection_number(t, a10, a10) == 0);

    std::mt19937 rng(20240815);
    std::uniform_int_distribution<int> d(-6, 6);
    int done = 0;
    while (done < 200) {
        int p = d(rng), q = d(rng), r = d(rng), s = d(rng);
        if ((p == 0 && q == 0) || (r == 0 && s == 0)) continue;
        int g1 = std::gcd(std::abs(p), std::abs(q));
        int g2 = std::gcd(std::abs(r), std::abs(s));
        FlatCurve a = torus_line(t, p, q);
        FlatCurve b = torus_line(t, r, s, Vec(Rat(3, 7), Rat(2, 5)));
        long expect = std::labs(long(p) * s - long(q) * r) / (g1 * g2);
        CAPTURE(p);
        CAPTURE(q);
        CAPTURE(r);
        CAPTURE(s);
        CHECK(intersection_number(t, a, b) == expect);
        ++done;
    }

    FlatSurface sh = make_sheared_torus(Rat(2, 7));
    FlatCurve b1 = torus_line(sh, 1, 2);
    FlatCurve b2 = torus_line(sh, 3, -1, Vec(Rat(1, 13), Rat(4, 9)));
    CHECK(intersection_number(sh, b1, b2) == 7);
}

TEST_CASE("thick-part intersection bound") {
    FlatSurface t = make_square_torus();
    for (int p = -3; p <= 3; ++p) {
        for (int q = -3; q <= 3; ++q) {
            if (p == 0 && q == 0) continue;
            FlatCurve a = torus_line(t, p, q);
            FlatCurve b = torus_line(t, 1, 1, Vec(Rat(2, 7), Rat(3, 11)));
            auto rep = check_thick_intersection_bound(t, 1.0, a, b);
            CAPTURE(p);
            CAPTURE(q);
            CHECK(rep.pass);
            CHECK(rep.i == std::labs(long(p) - long(q)) /
                               std::gcd(std::abs(p), std::abs(q)));
        }
    }
    FlatCurve a = torus_line(t, 1, 0);
    CHECK_THROWS_WITH_AS(check_thick_intersection_bound(t, 1.5, a, a),
                         "not in thick part", std::invalid_argument);
}

TEST_CASE("slope-restricted intersection bound example") {
    FlatSurface t = make_square_torus();
    FlatCurve alpha = torus_line(t, 1, 12);
    FlatCurve beta = torus_line(t, 1, 17, Vec(Rat(5, 13), Rat(3, 8)));
    auto rep = slope_intersection_bound(t, alpha, beta, 3.0, 12.0, 1.0);
    CHECK(rep.i == 5);
    CHECK(rep.i_C == 5);
    CHECK(rep.i_Z == 0);
    CHECK(rep.low_slope == 0);
    CHECK(rep.k9 == doctest::Approx(15.0));
    double expect_bound =
        15.0 * std::sqrt(145.0) * std::sqrt(290.0) / 3.0;
    CHECK(rep.bound == doctest::Approx(expect_bound).epsilon(1e-9));
    CHECK(rep.pass);
    REQUIRE(rep.sojourns.size() == 1);
    CHECK(rep.sojourns[0] == 1);

    CHECK_THROWS_AS(slope_intersection_bound(t, alpha, beta, 0.0, 12.0, 1.0),
                    std::invalid_argument);
    FlatCurve flat = torus_line(t, 1, 1);
    CHECK_THROWS_WITH_AS(slope_intersection_bound(t, flat, beta, 3.0, 12.0, 1.0),
                         "slope below threshold", std::invalid_argument);
}

TEST_CASE("cylinder enumeration across directions") {
    FlatSurface t = make_square_torus();
    auto cyls = enumerate_cylinders(t, 2.5);
    CHECK(cyls.size() == 8);
    std::set<std::pair<double, double>> dirs;
    for (const auto& c : cyls) {
        CHECK(c.area == 1);
        double len = std::sqrt(to_double(c.circumference.norm2()));
        CHECK(c.height == doctest::Approx(1.0 / len).epsilon(1e-12));
        dirs.insert({to_double(c.circumference.x), to_double(c.circumference.y)});
    }
    CHECK(dirs == std::set<std::pair<double, double>>{{0, 1},
                                                      {1, -2},
                                                      {1, -1},
                                                      {1, 0},
                                                      {1, 1},
                                                      {1, 2},
                                                      {2, -1},
                                                      {2, 1}});

    FlatSurface l = make_l_surface();
    auto lc = enumerate_cylinders(l, 1.0);
    CHECK(lc.size() == 2);
    std::set<std::pair<double, double>> ldirs;
    for (const auto& c : lc) {
        CHECK(c.area == 1);
        ldirs.insert({to_double(c.circumference.x), to_double(c.circumference.y)});
    }
    CHECK(ldirs == std::set<std::pair<double, double>>{{0, 1}, {1, 0}});
}

TEST_CASE("results are stable under tiny structure-preserving perturbations") {
    Rat eps = rat_from_double(1e-9);
    Polygon sq;
    sq.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1) + eps, Rat(0)),
            Vec(Rat(1) + eps, Rat(1)), Vec(Rat(0), Rat(1))};
    FlatSurface t = build_surface({sq},
                                  {{0, 0, 0, 2, GluingKind::Translation},
                                   {0, 1, 0, 3, GluingKind::Translation}},
                                  {{0, 0}});
    auto dec = vertical_decomposition(t);
    REQUIRE(dec.cylinders.size() == 1);
    CHECK(dec.cylinders[0].circumference == 1);
    CHECK(dec.cylinders[0].width == Rat(1) + eps);

    auto conns = enumerate_saddle_connections(t, 1.0 + 1e-7);
    CHECK(conns.size() == 4);
}
