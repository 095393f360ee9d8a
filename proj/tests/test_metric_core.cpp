#include "doctest.h"

#include <cmath>
#include <random>

#include "teichsim/metric_core.hpp"

using namespace teichsim;
using namespace teichsim::metric;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("frame_triangle relabels the 3-4-5 triangle") {
    auto f = frame_triangle({1.8, 2.4}, {0, 0}, {5, 0}, Space::Euclidean);
    CHECK(f.a == doctest::Approx(3).epsilon(1e-12));
    CHECK(f.b == doctest::Approx(4).epsilon(1e-12));
    CHECK(f.c == doctest::Approx(5).epsilon(1e-12));
    CHECK(f.d == doctest::Approx(std::sqrt(7.2)).epsilon(1e-12));
    REQUIRE(f.points.has_value());
    CHECK((*f.points)[3][0] == doctest::Approx(3).epsilon(1e-12));
    CHECK((*f.points)[3][1] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("frame_triangle with x on the geodesic") {
    auto f = frame_triangle({2, 0}, {0, 0}, {5, 0}, Space::Euclidean);
    CHECK(f.a == doctest::Approx(2));
    CHECK(f.b == doctest::Approx(3));
    CHECK(f.c == doctest::Approx(5));
    CHECK(f.rho == doctest::Approx(0));
    CHECK(f.d == doctest::Approx(0));
}

TEST_CASE("frame_triangle rejects a collapsed triple and non-finite input") {
    CHECK_THROWS(frame_triangle({1, 1}, {1, 1}, {1, 1}, Space::Euclidean));
    CHECK_THROWS(frame_triangle({std::nan(""), 0}, {0, 0}, {1, 0}, Space::Euclidean));
    // two coincident points are allowed
    auto f = frame_triangle({0, 0}, {0, 0}, {1, 0}, Space::Euclidean);
    CHECK(f.c == doctest::Approx(1));
}

TEST_CASE("frame_triangle is a function of the unordered point triple") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int it = 0; it < 100; ++it) {
        Point2 p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
        auto ref = frame_triangle(p, q, r, Space::Euclidean);
        for (auto& [x, y, z] : {std::array<Point2, 3>{p, r, q}, {q, p, r},
                                {q, r, p}, {r, p, q}, {r, q, p}}) {
            auto f = frame_triangle(x, y, z, Space::Euclidean);
            CHECK(f.a == doctest::Approx(ref.a).epsilon(1e-12));
            CHECK(f.b == doctest::Approx(ref.b).epsilon(1e-12));
            CHECK(f.c == doctest::Approx(ref.c).epsilon(1e-12));
            CHECK(f.d == doctest::Approx(ref.d).epsilon(1e-12));
        }
    }
}

TEST_CASE("euclid_d closed form") {
    CHECK(euclid_d(3, 4, 5) == doctest::Approx(std::sqrt(7.2)).epsilon(1e-14));
    CHECK(euclid_d(2, 3, 5) == doctest::Approx(0));
    CHECK(euclid_d(1, 1, 1) == doctest::Approx(1));
    CHECK_THROWS(euclid_d(1, 1, 3));
    CHECK_THROWS(euclid_d(5, 1, 3));
}

TEST_CASE("euclid_d agrees with a planar embedding") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 10);
    int done = 0;
    while (done < 1000) {
        double s1 = u(rng), s2 = u(rng), s3 = u(rng);
        double c = std::max({s1, s2, s3});
        double a = std::min({s1, s2, s3});
        double b = s1 + s2 + s3 - a - c;
        if (a + b <= c + 1e-9) continue;
        // embed: y at origin, z at (c,0), x reconstructed from the sides
        double x1 = (a * a + c * c - b * b) / (2 * c);
        double h2 = a * a - x1 * x1;
        if (h2 < 1e-12) continue;
        auto f = frame_triangle({x1, std::sqrt(h2)}, {0, 0}, {c, 0}, Space::Euclidean);
        CHECK(euclid_d(f.a, f.b, f.c) == doctest::Approx(f.d).epsilon(1e-9));
        ++done;
    }
}

TEST_CASE("hyp_distance closed forms") {
    CHECK(hyp_distance({0, 1}, {0, 2}) == doctest::Approx(std::log(2)).epsilon(1e-14));
    CHECK(hyp_distance({0, 1}, {0, 1}) == doctest::Approx(0));
    CHECK(hyp_distance({0, 1}, {1, 2}) == doctest::Approx(std::acosh(1.5)).epsilon(1e-14));
    CHECK_THROWS(hyp_distance({0, -1}, {0, 1}));
}

TEST_CASE("hyperbolic geodesic points sit at the right distances") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ur(-4, 4), ui(0.2, 6);
    for (int it = 0; it < 200; ++it) {
        Point2 p{ur(rng), ui(rng)}, q{ur(rng), ui(rng)};
        double len = model_distance(Space::Hyperbolic, p, q);
        if (len < 1e-6) continue;
        double t = len * 0.37;
        Point2 w = model_geodesic_point(Space::Hyperbolic, p, q, t);
        CHECK(model_distance(Space::Hyperbolic, p, w) == doctest::Approx(t).epsilon(1e-9));
        CHECK(model_distance(Space::Hyperbolic, w, q) ==
              doctest::Approx(len - t).epsilon(1e-9));
    }
}

TEST_CASE("tripod frames are exact") {
    auto f = tripod_frame(3, 1, 2);
    REQUIRE(f.exact.has_value());
    auto [a, b, c, d] = *f.exact;
    CHECK(a == 4);
    CHECK(b == 3);
    CHECK(c == 5);
    CHECK(d == 2);
    CHECK(d == a + b - c);

    auto g = tripod_frame(5, 2, 7);
    auto [ga, gb, gc, gd] = *g.exact;
    CHECK(ga == 7);
    CHECK(gb == 9);
    CHECK(gc == 12);
    CHECK(gd == 4);
    CHECK(g.rho == doctest::Approx(4.0 / 7));

    auto h = tripod_frame(1, 0, 1);
    CHECK((*h.exact)[3] == 0);

    CHECK_THROWS(tripod_frame(1, 2, 1));  // middle leg not shortest
    CHECK_THROWS(tripod_frame(-1, 0, 1));
}

TEST_CASE("sphere counterexample family") {
    auto f = sphere_counterexample(kPi / 4);
    CHECK(f.a == doctest::Approx(kPi / 4));
    CHECK(f.b == doctest::Approx(3 * kPi / 4));
    CHECK(f.c == doctest::Approx(kPi));
    CHECK(f.d == doctest::Approx(kPi / 2));
    CHECK(f.rho == 0);

    for (double theta : {1e-4, 0.3, kPi / 2}) {
        auto g = sphere_counterexample(theta);
        CHECK(g.rho == 0);
        CHECK(g.d / g.a == doctest::Approx(2).epsilon(1e-12));
        // coordinates reproduce the frame distances
        REQUIRE(g.points.has_value());
        auto& P = *g.points;
        CHECK(model_distance(Space::Sphere, P[0], P[1]) == doctest::Approx(g.a));
        CHECK(model_distance(Space::Sphere, P[0], P[3]) == doctest::Approx(g.d));
    }
    CHECK_THROWS(sphere_counterexample(0));
    CHECK_THROWS(sphere_counterexample(2.0));
}

TEST_CASE("check_star: tripods meet f(t)=t sharply") {
    SamplerConfig cfg;
    cfg.seed = 42;
    cfg.samples = 10000;
    auto frames = sample_frames(Space::Tripod, cfg);
    auto rep = check_star(frames, StarBound::linear());
    CHECK(rep.violations.empty());
    for (const auto& bin : rep.bins) {
        if (bin.count < 50) continue;
        CHECK(bin.sup_d_over_a <= bin.rho_hi + 1e-12);
        CHECK(bin.sup_d_over_a >= bin.rho_hi - 0.05);
    }
}

TEST_CASE("check_star: planar triangles meet f(t)=sqrt(2t)") {
    SamplerConfig cfg;
    cfg.seed = 5;
    cfg.samples = 10000;
    auto frames = sample_frames(Space::Euclidean, cfg);
    auto rep = check_star(frames, StarBound::sqrt2t());
    CHECK(rep.violations.empty());
}

TEST_CASE("check_star rejects mixed spaces") {
    auto t = tripod_frame(3, 1, 2);
    auto e = frame_triangle({1.8, 2.4}, {0, 0}, {5, 0}, Space::Euclidean);
    CHECK_THROWS(check_star({t, e}, StarBound::linear()));
}

TEST_CASE("planar sharpness witnessed as b approaches c") {
    double a = 1, c = 100;
    double best = 0;
    for (double b = c - a + 1e-4; b < c; b += (c - b) / 2 + 1e-7) {
        double rho = (a + b - c) / a;
        if (rho <= 0) continue;
        best = std::max(best, euclid_d(a, b, c) / (a * std::sqrt(2 * rho)));
        if (c - b < 1e-6) break;
    }
    CHECK(best >= 0.99);
}

TEST_CASE("universal lower bound d >= (a+b-c)/2 across spaces") {
    for (auto space : {Space::Euclidean, Space::Hyperbolic, Space::Sphere, Space::Tripod}) {
        SamplerConfig cfg;
        cfg.seed = 99;
        cfg.samples = 500;
        for (const auto& f : sample_frames(space, cfg))
            CHECK(f.d >= (f.a + f.b - f.c) / 2 - 1e-12);
    }
}

TEST_CASE("hyperbolic large-scale additive constant is modest") {
    SamplerConfig cfg;
    cfg.seed = 17;
    cfg.samples = 2000;
    cfg.min_side = 10;
    auto rep = estimate_bounding_function(Space::Hyperbolic, cfg);
    REQUIRE(rep.sup_additive.has_value());
    CHECK(*rep.sup_additive < 5.0);
}

TEST_CASE("estimate_bounding_function: tripod f-hat is the identity") {
    SamplerConfig cfg;
    cfg.seed = 1;
    cfg.samples = 4000;
    auto rep = estimate_bounding_function(Space::Tripod, cfg);
    for (const auto& bin : rep.bins) {
        if (bin.count == 0) continue;
        CHECK(bin.sup_d_over_a <= bin.rho_hi + 1e-12);
        CHECK(bin.sup_d_over_a >= bin.rho_lo - 1e-12);
    }
    CHECK_THROWS(estimate_bounding_function(Space::Tripod, SamplerConfig{0, 0}));
}
