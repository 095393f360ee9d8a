#include <algorithm>
#include <cmath>
#include <numeric>
#include <deque>
#include <set>
#include <stdexcept>
#include <tuple>

#include "surface_internal.hpp"

namespace teichsim::flat {

namespace {

Rat length_cap2(double L) {
    Rat l = rat_from_double(L);
    return l * l * (Rat(1) + Rat(1, 1000000000));
}

std::vector<int> singular_cones(const FlatSurface& s) {
    std::vector<int> out;
    for (size_t i = 0; i < s.cone_points.size(); ++i)
        if (s.cone_points[i].singular()) out.push_back(static_cast<int>(i));
    if (out.empty())
        throw std::invalid_argument("no singular or marked points");
    return out;
}

bool verified_connection(const FlatSurface& s, int cone, const Vec& w, int* end) {
    int nc = static_cast<int>(s.cone_points[cone].corners.size());
    for (int corner = 0; corner < nc; ++corner) {
        RayHit hit = trace_ray(s, cone, corner, w, Rat(1));
        if (hit.hit && hit.t == 1) {
            *end = hit.end_cone;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(const FlatSurface& s,
                                                           double L) {
    if (!(L > 0)) throw std::invalid_argument("length bound must be positive");
    Rat cap2 = length_cap2(L);
    auto cones = singular_cones(s);

    std::vector<SaddleConnection> out;
    for (int c : cones) {
        std::set<std::tuple<int, int, Rat, Rat>> visited;
        std::deque<Placement> queue;
        for (auto [p, v] : s.cone_points[c].corners) {
            Placement a{p, false, -s.polygons[p].v[v]};
            auto key = std::make_tuple(a.poly, 0, a.offset.x, a.offset.y);
            if (visited.insert(key).second) queue.push_back(a);
        }
        std::set<std::pair<Rat, Rat>> candidates;
        while (!queue.empty()) {
            Placement a = queue.front();
            queue.pop_front();
            if (detail::placed_min_dist2(s, a) > cap2) continue;
            const Polygon& poly = s.polygons[a.poly];
            for (int w = 0; w < poly.n(); ++w) {
                if (!s.cone_points[s.cone_index(a.poly, w)].singular()) continue;
                Vec pos = a.map(poly.v[w]);
                Rat n2 = pos.norm2();
                if (n2 > 0 && n2 <= cap2) candidates.insert({pos.x, pos.y});
            }
            for (int e = 0; e < poly.n(); ++e) {
                Placement b = detail::placement_across(s, a, e);
                auto key = std::make_tuple(b.poly, b.flip ? 1 : 0, b.offset.x,
                                           b.offset.y);
                if (visited.insert(key).second) queue.push_back(b);
            }
        }
        for (const auto& [x, y] : candidates) {
            Vec w{x, y};
            int end = -1;
            if (verified_connection(s, c, w, &end))
                out.push_back({w, c, end});
        }
    }
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a,
                                         const SaddleConnection& b) {
        return std::tie(a.start_cone, a.holonomy.x, a.holonomy.y) <
               std::tie(b.start_cone, b.holonomy.x, b.holonomy.y);
    });
    return out;
}

std::vector<SaddleConnection> torus_primitive_connections(const FlatSurface& s,
                                                          double L) {
    if (!(L > 0)) throw std::invalid_argument("length bound must be positive");
    if (s.polygons.size() != 1 || s.polygons[0].n() != 4)
        throw std::invalid_argument("oracle needs a one-parallelogram torus");
    auto cones = singular_cones(s);
    if (cones.size() != 1)
        throw std::invalid_argument("oracle needs a once-marked torus");
    Vec u1 = s.polygons[0].edge(0), u2 = s.polygons[0].edge(1);
    double a1 = std::sqrt(to_double(u1.norm2()));
    double a2 = std::sqrt(to_double(u2.norm2()));
    double det = std::abs(to_double(cross(u1, u2)));
    long B = static_cast<long>(L * (a1 + a2) / det) + 2;
    Rat cap2 = length_cap2(L);
    std::vector<SaddleConnection> out;
    for (long m = -B; m <= B; ++m) {
        for (long n = -B; n <= B; ++n) {
            if (std::gcd(std::labs(m), std::labs(n)) != 1) continue;
            Vec w = u1 * Rat(m) + u2 * Rat(n);
            if (w.norm2() <= cap2)
                out.push_back({w, cones[0], cones[0]});
        }
    }
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a,
                                         const SaddleConnection& b) {
        return std::tie(a.holonomy.x, a.holonomy.y) <
               std::tie(b.holonomy.x, b.holonomy.y);
    });
    return out;
}

namespace {

// reduce a rational direction to a primitive integer vector with canonical sign
std::pair<long, long> primitive_direction(const Vec& w) {
    using boost::multiprecision::cpp_int;
    cpp_int nx = numerator(w.x), dx = denominator(w.x);
    cpp_int ny = numerator(w.y), dy = denominator(w.y);
    cpp_int p = nx * dy, q = ny * dx;
    cpp_int g = gcd(abs(p), abs(q));
    if (g == 0) throw std::invalid_argument("zero direction");
    p /= g;
    q /= g;
    if (p < 0 || (p == 0 && q < 0)) {
        p = -p;
        q = -q;
    }
    if (abs(p) > 1000000000 || abs(q) > 1000000000)
        throw std::runtime_error("direction coefficients too large");
    return {static_cast<long>(p), static_cast<long>(q)};
}

// x p + y q = 1 for coprime p, q
std::pair<long, long> bezout(long p, long q) {
    long old_r = p, r = q, old_s = 1, ss = 0, old_t = 0, tt = 1;
    while (r != 0) {
        long quo = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - quo * r);
        std::tie(old_s, ss) = std::make_pair(ss, old_s - quo * ss);
        std::tie(old_t, tt) = std::make_pair(tt, old_t - quo * tt);
    }
    if (old_r < 0) {
        old_s = -old_s;
        old_t = -old_t;
    }
    return {old_s, old_t};
}

}  // namespace

std::vector<Cylinder> enumerate_cylinders(const FlatSurface& s, double L) {
    if (!(L > 0)) throw std::invalid_argument("length bound must be positive");
    auto conns = enumerate_saddle_connections(s, L);
    std::set<std::pair<long, long>> dirs;
    for (const auto& sc : conns) dirs.insert(primitive_direction(sc.holonomy));

    Rat cap2 = length_cap2(L);
    std::vector<Cylinder> out;
    for (auto [p, q] : dirs) {
        auto [pp, qq] = bezout(p, q);  // p*pp + q*qq = 1
        // M = [[q, -p], [pp, qq]] sends (p,q) to (0,1), det 1
        auto fwd = [&](const Vec& v) {
            return Vec(v.x * q - v.y * p, v.x * pp + v.y * qq);
        };
        auto back = [&](const Vec& v) {
            return Vec(v.x * qq + v.y * p, -v.x * pp + v.y * q);
        };
        std::vector<Polygon> polys = s.polygons;
        for (auto& poly : polys)
            for (auto& v : poly.v) v = fwd(v);
        FlatSurface t = build_surface(polys, s.gluings, s.marked);
        auto dec = vertical_decomposition(t);
        for (const auto& vc : dec.cylinders) {
            Vec core = back(Vec(Rat(0), vc.circumference));
            if (core.norm2() > cap2) continue;
            Cylinder cyl;
            cyl.circumference = core;
            cyl.area = vc.area;
            cyl.height = to_double(vc.area) / std::sqrt(to_double(core.norm2()));
            for (const auto& b : vc.boundary_left)
                cyl.boundary_left.push_back({back(b.holonomy), b.start_cone, b.end_cone});
            for (const auto& b : vc.boundary_right)
                cyl.boundary_right.push_back({back(b.holonomy), b.start_cone, b.end_cone});
            out.push_back(cyl);
        }
    }
    std::sort(out.begin(), out.end(), [](const Cylinder& a, const Cylinder& b) {
        return std::tie(a.circumference.x, a.circumference.y) <
               std::tie(b.circumference.x, b.circumference.y);
    });
    return out;
}

}  // namespace teichsim::flat
