#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "teichsim/torus_teich.hpp"

using namespace teichsim::torus;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const Tau I{0, 1};

MappingClass random_word(std::mt19937_64& rng, int len) {
    MappingClass m;
    std::uniform_int_distribution<int> pick(0, 2);
    for (int i = 0; i < len; ++i) {
        switch (pick(rng)) {
            case 0: m = m * MappingClass::S(); break;
            case 1: m = m * MappingClass::T(); break;
            default: m = m * MappingClass::T().inverse(); break;
        }
    }
    return m;
}
}  // namespace

TEST_CASE("extremal length closed forms") {
    CHECK(ext_length(I, CurveClass(1, 0)) == doctest::Approx(1).epsilon(1e-14));
    CHECK(ext_length(I, CurveClass(1, 1)) == doctest::Approx(2).epsilon(1e-14));
    CHECK(ext_length(Tau{0, 2}, CurveClass(0, 1)) == doctest::Approx(2).epsilon(1e-14));
    CHECK(flat_length(Tau{0, 2}, CurveClass(1, 0)) ==
          doctest::Approx(1 / std::sqrt(2)).epsilon(1e-14));
    CHECK_THROWS_WITH(ext_length(Tau{0, -1}, CurveClass(1, 0)),
                      "not in upper half-plane");
}

TEST_CASE("curve classes canonicalize") {
    CHECK(CurveClass(2, 4) == CurveClass(1, 2));
    CHECK(CurveClass(-3, 0) == CurveClass(1, 0));
    CHECK(CurveClass(1, -2) == CurveClass(-1, 2));
    CHECK_THROWS(CurveClass(0, 0));
}

TEST_CASE("non-primitive scaling via the raw formula") {
    // length of k copies scales linearly, extremal length quadratically
    for (long k : {2L, 3L, 7L}) {
        Tau tau{0.3, 1.7};
        double e1 = ext_length(tau, CurveClass(1, 1));
        double re = 1 * k + 1 * k * tau.real(), im = 1 * k * tau.imag();
        double ek = (re * re + im * im) / tau.imag();
        CHECK(ek == doctest::Approx(double(k * k) * e1).epsilon(1e-12));
    }
}

TEST_CASE("teich_distance closed forms") {
    CHECK(teich_distance(I, Tau{0, 2}) == doctest::Approx(0.5 * std::log(2)).epsilon(1e-14));
    CHECK(teich_distance(I, Tau{1, 2}) ==
          doctest::Approx(0.5 * std::acosh(1.5)).epsilon(1e-14));
    CHECK(teich_distance(I, I) == doctest::Approx(0));
    CHECK_THROWS_WITH(teich_distance(I, Tau{0, 0}), "not in upper half-plane");
}

TEST_CASE("kerckhoff scan matches the closed form on axis pairs") {
    auto r = kerckhoff_distance(I, Tau{0, 2}, 10);
    CHECK(r.distance == doctest::Approx(0.5 * std::log(2)).epsilon(1e-14));
    CHECK(r.argmax == CurveClass(0, 1));
    CHECK_FALSE(r.near_boundary);
    CHECK_THROWS(kerckhoff_distance(I, Tau{0, 2}, 0));
}

TEST_CASE("kerckhoff scan on geodesics with rational endpoints") {
    // pairs on SL(2,Z)-images of the vertical axis: the sup is attained exactly
    // at the image of the vertical class, whose coefficients stay small
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> us(-0.25, 0.25), ut(0.1, 1.2);
    std::uniform_int_distribution<int> ulen(0, 4);
    for (int it = 0; it < 100; ++it) {
        MappingClass m = random_word(rng, ulen(rng));
        double s = us(rng), t = ut(rng);
        Tau t1 = apply_mapping_class(m, Tau{0, std::exp(2 * s)});
        Tau t2 = apply_mapping_class(m, Tau{0, std::exp(2 * (s + t))});
        REQUIRE(systole(t1) > 0.15);
        REQUIRE(systole(t2) > 0.15);
        CHECK(teich_distance(t1, t2) == doctest::Approx(t).epsilon(1e-10));
        auto r = kerckhoff_distance(t1, t2, 50);
        CHECK(r.distance == doctest::Approx(t).epsilon(1e-9));
        CHECK(std::labs(r.argmax.p) <= 10);
        CHECK(std::labs(r.argmax.q) <= 10);
        CHECK(r.argmax == CurveClass(-m.b, m.d));
    }
}

TEST_CASE("systole and thick part") {
    CHECK(systole(I) == doctest::Approx(1).epsilon(1e-14));
    CHECK(systole(Tau{0, 2}) == doctest::Approx(1 / std::sqrt(2)).epsilon(1e-14));
    CHECK(systole(Tau{0, 10}) == doctest::Approx(1 / std::sqrt(10)).epsilon(1e-12));
    CHECK(systole(Tau{5, 1}) == doctest::Approx(1).epsilon(1e-12));  // translate of i
    CHECK(in_thick(I, 0.999));
    CHECK_FALSE(in_thick(Tau{0, 10}, 0.5));
    // invariant under the mapping class group
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ur(-2, 2), ui(0.2, 4);
    for (int it = 0; it < 50; ++it) {
        Tau tau{ur(rng), ui(rng)};
        MappingClass m = random_word(rng, 5);
        CHECK(systole(apply_mapping_class(m, tau)) ==
              doctest::Approx(systole(tau)).epsilon(1e-9));
    }
}

TEST_CASE("mapping classes act as stated") {
    Tau s2i = apply_mapping_class(MappingClass::S(), Tau{0, 2});
    CHECK(s2i.real() == doctest::Approx(0));
    CHECK(s2i.imag() == doctest::Approx(0.5).epsilon(1e-14));
    Tau ti = apply_mapping_class(MappingClass::T(), I);
    CHECK(ti.real() == doctest::Approx(1));
    CHECK(ti.imag() == doctest::Approx(1));
    CHECK_THROWS(MappingClass(1, 1, 1, 1));
    CHECK(MappingClass::S() * MappingClass::S().inverse() == MappingClass());
}

TEST_CASE("mapping classes are isometries") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ur(-2, 2), ui(0.3, 3);
    for (int it = 0; it < 100; ++it) {
        Tau t1{ur(rng), ui(rng)}, t2{ur(rng), ui(rng)};
        MappingClass m = random_word(rng, 6);
        CHECK(teich_distance(apply_mapping_class(m, t1), apply_mapping_class(m, t2)) ==
              doctest::Approx(teich_distance(t1, t2)).epsilon(1e-9));
    }
}

TEST_CASE("vertical ray moves at unit speed") {
    auto g = TeichGeodesic::toward(I, kInf);
    for (double t : {0.25, 1.0, 3.0}) {
        Tau p = g.point(t);
        CHECK(p.real() == doctest::Approx(0));
        CHECK(p.imag() == doctest::Approx(std::exp(2 * t)).epsilon(1e-12));
        CHECK(teich_distance(I, p) == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK(g.point(0).imag() == doctest::Approx(1));
}

TEST_CASE("geodesic through two points hits the second at the right time") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ur(-3, 3), ui(0.2, 5);
    for (int it = 0; it < 200; ++it) {
        Tau t1{ur(rng), ui(rng)}, t2{ur(rng), ui(rng)};
        double d = teich_distance(t1, t2);
        if (d < 1e-6) continue;
        auto g = TeichGeodesic::through(t1, t2);
        Tau hit = g.point(d);
        CHECK(std::abs(hit - t2) < 1e-9 * std::max(1.0, std::abs(t2)));
        // unit speed along the whole line
        double s = 0.31 * d, t = 1.7 * d;
        CHECK(teich_distance(g.point(s), g.point(t)) ==
              doctest::Approx(t - s).epsilon(1e-9));
        CHECK(teich_distance(g.point(-0.5), g.point(0.25)) ==
              doctest::Approx(0.75).epsilon(1e-9));
    }
    CHECK_THROWS_WITH(TeichGeodesic::through(I, I), "coincident endpoints");
}

TEST_CASE("adapted holonomy diagonalizes lengths along the geodesic") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ur(-2, 2), ui(0.3, 3), utt(-2, 2);
    std::uniform_int_distribution<long> up(-5, 5);
    for (int it = 0; it < 200; ++it) {
        Tau t1{ur(rng), ui(rng)}, t2{ur(rng), ui(rng)};
        if (teich_distance(t1, t2) < 1e-3) continue;
        auto g = TeichGeodesic::through(t1, t2);
        long p = up(rng), q = up(rng);
        if (p == 0 && q == 0) p = 1;
        CurveClass cc(p, q);
        auto [h, v] = g.adapted_holonomy(cc);
        CHECK(h * h + v * v == doctest::Approx(ext_length(t1, cc)).epsilon(1e-9));
        double t = utt(rng);
        double want = std::exp(2 * t) * h * h + std::exp(-2 * t) * v * v;
        CHECK(ext_length(g.point(t), cc) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("curve families on the square torus, horizontal direction") {
    auto g = TeichGeodesic::toward(I, 0.0);  // (1,0) expands along this ray
    auto rep = curve_families(g, 0.5, 2.0);
    bool found = false;
    for (const auto& e : rep.C1) {
        if (e.curve == CurveClass(1, 0)) {
            found = true;
            CHECK(e.length == doctest::Approx(1).epsilon(1e-12));
            CHECK(e.slope == doctest::Approx(0));
        }
        CHECK(e.length < 2.0);
        CHECK(e.slope < 2.0);
    }
    CHECK(found);
    for (const auto& e : rep.C2) {
        CHECK(e.length < 2.0);
        CHECK(e.slope > 0.5);  // |h|/|v| < 2 in the flowed structure
    }
    CHECK_FALSE(rep.C2.empty());
    CHECK_THROWS_WITH(curve_families(TeichGeodesic::toward(Tau{0, 400}, kInf), 1.0, 2.0),
                      "not in thick part");
    CHECK_THROWS_WITH(curve_families(g, 0.5, 0.05), "empty family");
}

TEST_CASE("adeltabound replay on a degenerate triangle") {
    Tau y = I, z{0, std::exp(4)}, x{0, std::exp(2)};
    auto rep = adeltabound_replay(x, y, z, 2.0, 0.05);
    CHECK(rep.a == doctest::Approx(1).epsilon(1e-12));
    CHECK(rep.b == doctest::Approx(1).epsilon(1e-12));
    CHECK(rep.c == doctest::Approx(2).epsilon(1e-12));
    CHECK(rep.rho == doctest::Approx(0).epsilon(1e-9));
    CHECK(rep.d == doctest::Approx(0).epsilon(1e-9));
    CHECK(rep.k5_empirical == doctest::Approx(1).epsilon(1e-6));
    for (const auto& e : rep.families.C1) CHECK(e.ext_ratio == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("adeltabound replay on thick triangles keeps ratios in the window") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ur(-0.4, 0.4), ui(0.8, 1.6);
    int done = 0;
    double worst_k5 = 0;
    while (done < 40) {
        Tau x{ur(rng), ui(rng)}, y{ur(rng), ui(rng)}, z{ur(rng), ui(rng)};
        if (teich_distance(x, y) < 0.05 || teich_distance(x, z) < 0.05 ||
            teich_distance(y, z) < 0.05)
            continue;
        AdeltaReport rep;
        try {
            rep = adeltabound_replay(x, y, z, 3.0, 0.3);
        } catch (const std::invalid_argument&) {
            continue;
        }
        CHECK(rep.k5_empirical >= 1);
        worst_k5 = std::max(worst_k5, rep.k5_empirical);
        CHECK(rep.a <= rep.b);
        CHECK(rep.b <= rep.c + 1e-12);
        // the framed comparison point really sits on the y-z geodesic
        CHECK(teich_distance(rep.y, rep.w) == doctest::Approx(rep.a).epsilon(1e-9));
        CHECK(teich_distance(rep.y, rep.z) == doctest::Approx(rep.c).epsilon(1e-9));
        ++done;
    }
    // pilot-pinned: small thick triangles distort moderate curves very little
    CHECK(worst_k5 < 25.0);
}

TEST_CASE("adeltabound replay errors") {
    CHECK_THROWS_WITH(adeltabound_replay(I, I, I, 2.0, 0.05), "zero triangle");
    CHECK_THROWS_WITH(adeltabound_replay(Tau{0, 30}, Tau{0, 40}, Tau{0, 50}, 2.0, 0.3),
                      "not in thick part");
    CHECK_THROWS_WITH(
        adeltabound_replay(Tau{0.2, 1}, I, Tau{0, std::exp(2)}, 2.0, 0.05, 5.0),
        "side below min_side");
}
