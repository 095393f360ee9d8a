#include <stdexcept>

#include "surface_internal.hpp"

namespace teichsim::flat {

namespace detail {

Vec linear_part(const Placement& a, const Vec& v) { return a.flip ? -v : v; }

Placement placement_across(const FlatSurface& s, const Placement& a, int e) {
    const Gluing& g = s.gluings[s.gluing_at(a.poly, e)];
    auto [q, f] = s.partner(a.poly, e);
    Placement out;
    out.poly = q;
    if (g.kind == GluingKind::Translation) {
        // p -> q is z + tau
        Vec tau = s.polygons[q].v[(f + 1) % s.polygons[q].n()] -
                  s.polygons[a.poly].v[e];
        out.flip = a.flip;
        out.offset = a.offset - linear_part(a, tau);
    } else {
        // p -> q is -z + sigma
        Vec sigma = s.polygons[q].v[(f + 1) % s.polygons[q].n()] +
                    s.polygons[a.poly].v[e];
        out.flip = !a.flip;
        out.offset = a.offset + linear_part(a, sigma);
    }
    return out;
}

bool in_sector(const Vec& a, const Vec& b, const Vec& u) {
    bool narrow = cross(a, b) > 0 || (cross(a, b) == 0 && dot(a, b) < 0);
    if (narrow) return cross(a, u) >= 0 && cross(u, b) > 0;
    return cross(a, u) >= 0 || cross(u, b) > 0;
}

Rat placed_min_dist2(const FlatSurface& s, const Placement& a) {
    const Polygon& poly = s.polygons[a.poly];
    Rat best = -1;
    bool inside = true;
    for (int i = 0; i < poly.n(); ++i) {
        Vec p = a.map(poly.v[i]), q = a.map(poly.v[(i + 1) % poly.n()]);
        // CCW is preserved (the linear part is +-identity)
        if (cross(q - p, -p) < 0) inside = false;
        Vec d = q - p;
        Rat t = dot(-p, d) / d.norm2();
        if (t < 0) t = 0;
        if (t > 1) t = 1;
        Vec c = p + d * t;
        Rat d2 = c.norm2();
        if (best < 0 || d2 < best) best = d2;
    }
    return inside ? Rat(0) : best;
}

namespace {

struct Candidate {
    bool found = false;
    Rat t;
    int edge = 0;
    int vertex = -1;  // polygon vertex index when the hit is a vertex
};

// first boundary hit of the ray t*u, t > t_cur, in the placed polygon
Candidate next_hit(const FlatSurface& s, const Placement& a, const Vec& u,
                   const Rat& t_cur) {
    const Polygon& poly = s.polygons[a.poly];
    Candidate best;
    auto consider = [&](const Rat& t, int edge, int vertex) {
        if (t <= t_cur) return;
        if (!best.found || t < best.t) best = {true, t, edge, vertex};
        else if (t == best.t && vertex >= 0) best = {true, t, edge, vertex};
    };
    Rat uu = u.norm2();
    for (int i = 0; i < poly.n(); ++i) {
        Vec p = a.map(poly.v[i]), q = a.map(poly.v[(i + 1) % poly.n()]);
        Vec d = q - p;
        Rat den = cross(u, d);
        if (den == 0) {
            if (cross(u, p) != 0) continue;  // parallel off the ray line
            consider(dot(p, u) / uu, i, i);
            consider(dot(q, u) / uu, i, (i + 1) % poly.n());
        } else {
            Rat t = cross(p, d) / den;
            Rat sp = cross(p, u) / den;
            if (sp < 0 || sp > 1) continue;
            if (sp == 0) consider(t, i, i);
            else if (sp == 1) consider(t, i, (i + 1) % poly.n());
            else consider(t, i, -1);
        }
    }
    return best;
}

// at plane position t*u on the given corner's vertex, rotate through the
// corner cycle until the wedge containing u is found
bool enter_wedge(const FlatSurface& s, int& p, int& v, Placement& a, const Vec& u) {
    int cone = s.cone_index(p, v);
    size_t cycle = s.cone_points[cone].corners.size();
    for (size_t it = 0; it <= cycle; ++it) {
        const Polygon& poly = s.polygons[p];
        Vec out_dir = linear_part(a, poly.edge(v));
        Vec in_dir = linear_part(a, poly.v[(v - 1 + poly.n()) % poly.n()] - poly.v[v]);
        if (detail::in_sector(out_dir, in_dir, u)) return true;
        int prev = (v - 1 + poly.n()) % poly.n();
        a = placement_across(s, a, prev);
        auto [q, f] = s.partner(p, prev);
        p = q;
        v = f;
    }
    return false;
}

}  // namespace

}  // namespace detail

RayHit trace_ray(const FlatSurface& s, int cone, int corner, const Vec& u,
                 const Rat& cap, long max_steps) {
    if (cone < 0 || cone >= static_cast<int>(s.cone_points.size()))
        throw std::invalid_argument("bad cone point");
    const auto& corners = s.cone_points[cone].corners;
    if (corner < 0 || corner >= static_cast<int>(corners.size()))
        throw std::invalid_argument("bad corner");
    if (u == Vec()) throw std::invalid_argument("zero direction");

    auto [p, v] = corners[corner];
    Placement a;
    a.poly = p;
    a.offset = -s.polygons[p].v[v];
    {
        const Polygon& poly = s.polygons[p];
        Vec out_dir = poly.edge(v);
        Vec in_dir = poly.v[(v - 1 + poly.n()) % poly.n()] - poly.v[v];
        if (!detail::in_sector(out_dir, in_dir, u)) return {false, Rat(-1), -1};
    }

    Rat t = 0;
    for (long step = 0; step < max_steps; ++step) {
        auto hit = detail::next_hit(s, a, u, t);
        if (!hit.found) throw std::runtime_error("ray escaped its polygon");
        if (hit.t > cap) return {false, hit.t, -1};
        t = hit.t;
        if (hit.vertex >= 0) {
            int c = s.cone_index(a.poly, hit.vertex);
            if (s.cone_points[c].singular()) return {true, t, c};
            int pp = a.poly, vv = hit.vertex;
            if (!detail::enter_wedge(s, pp, vv, a, u))
                throw std::runtime_error("no wedge contains the direction");
            a.poly = pp;
        } else {
            a = detail::placement_across(s, a, hit.edge);
        }
    }
    throw std::runtime_error("trace step budget exceeded");
}

}  // namespace teichsim::flat
