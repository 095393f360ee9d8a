#include "teichsim/flat_surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teichsim::flat {

Rat cross(const Vec& a, const Vec& b) { return a.x * b.y - a.y * b.x; }
Rat dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y; }

Rat Polygon::area2() const {
    Rat s = 0;
    for (int i = 0; i < n(); ++i) s += cross(v[i], v[(i + 1) % n()]);
    return s;
}

double SaddleConnection::length() const {
    return std::sqrt(to_double(holonomy.norm2()));
}

namespace {

boost::multiprecision::cpp_int rat_floor(const Rat& x) {
    boost::multiprecision::cpp_int n = boost::multiprecision::numerator(x);
    boost::multiprecision::cpp_int d = boost::multiprecision::denominator(x);
    boost::multiprecision::cpp_int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

// do closed segments [a1,b1] and [a2,b2] share an interior point
bool segments_cross_interior(const Vec& a1, const Vec& b1, const Vec& a2,
                             const Vec& b2) {
    Vec d1 = b1 - a1, d2 = b2 - a2;
    Rat den = cross(d1, d2);
    if (den == 0) {
        if (cross(d1, a2 - a1) != 0) return false;  // parallel, distinct lines
        // collinear: overlap of parameter ranges
        Rat l2 = dot(d1, d1);
        Rat t0 = dot(a2 - a1, d1), t1 = dot(b2 - a1, d1);
        if (t0 > t1) std::swap(t0, t1);
        return t1 > 0 && t0 < l2;
    }
    Rat t = cross(a2 - a1, d2) / den;
    Rat u = cross(a2 - a1, d1) / den;
    return t > 0 && t < 1 && u > 0 && u < 1;
}

void validate_polygon(const Polygon& poly) {
    int n = poly.n();
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    for (int i = 0; i < n; ++i)
        if (poly.edge(i) == Vec())
            throw std::invalid_argument("zero-length polygon edge");
    if (poly.area2() <= 0)
        throw std::invalid_argument("polygon not counterclockwise");
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            Vec a1 = poly.v[i], b1 = poly.v[(i + 1) % n];
            Vec a2 = poly.v[j], b2 = poly.v[(j + 1) % n];
            if (adjacent) {
                if (segments_cross_interior(a1, b1, a2, b2))
                    throw std::invalid_argument("polygon not simple");
            } else {
                Vec d1 = b1 - a1, d2 = b2 - a2;
                Rat den = cross(d1, d2);
                bool touch;
                if (den == 0) {
                    touch = segments_cross_interior(a1, b1, a2, b2);
                } else {
                    Rat t = cross(a2 - a1, d2) / den;
                    Rat u = cross(a2 - a1, d1) / den;
                    touch = t >= 0 && t <= 1 && u >= 0 && u <= 1;
                }
                if (touch) throw std::invalid_argument("polygon not simple");
            }
        }
    }
}

double interior_angle(const Polygon& poly, int v) {
    int n = poly.n();
    Vec in = poly.v[v] - poly.v[(v - 1 + n) % n];
    Vec out = poly.v[(v + 1) % n] - poly.v[v];
    double turn = std::atan2(to_double(cross(in, out)), to_double(dot(in, out)));
    return M_PI - turn;
}

}  // namespace

int FlatSurface::gluing_at(int p, int e) const { return gluing_lookup[p][e]; }

std::pair<int, int> FlatSurface::partner(int p, int e) const {
    const Gluing& g = gluings[gluing_lookup[p][e]];
    if (g.p == p && g.e == e) return {g.q, g.f};
    return {g.p, g.e};
}

int FlatSurface::cone_index(int p, int v) const { return cone_lookup[p][v]; }

FlatSurface build_surface(const std::vector<Polygon>& polygons,
                          const std::vector<Gluing>& gluings,
                          const std::vector<MarkedPoint>& marked) {
    FlatSurface s;
    s.polygons = polygons;
    s.gluings = gluings;
    s.marked = marked;
    if (polygons.empty()) throw std::invalid_argument("no polygons");
    for (const auto& poly : polygons) validate_polygon(poly);

    s.gluing_lookup.resize(polygons.size());
    for (size_t p = 0; p < polygons.size(); ++p)
        s.gluing_lookup[p].assign(polygons[p].n(), -1);

    auto edge_ok = [&](int p, int e) {
        return p >= 0 && p < static_cast<int>(polygons.size()) && e >= 0 &&
               e < polygons[p].n();
    };
    for (size_t gi = 0; gi < gluings.size(); ++gi) {
        const Gluing& g = gluings[gi];
        if (!edge_ok(g.p, g.e) || !edge_ok(g.q, g.f))
            throw std::invalid_argument("bad edge reference");
        if (g.p == g.q && g.e == g.f)
            throw std::invalid_argument("edge glued to itself");
        for (auto [p, e] : {std::pair{g.p, g.e}, {g.q, g.f}}) {
            if (s.gluing_lookup[p][e] != -1)
                throw std::invalid_argument("gluing incomplete");
            s.gluing_lookup[p][e] = static_cast<int>(gi);
        }
        Vec ve = polygons[g.p].edge(g.e), vf = polygons[g.q].edge(g.f);
        Vec want = g.kind == GluingKind::Translation ? -ve : ve;
        if (vf != want) {
            if (vf.norm2() != ve.norm2())
                throw std::invalid_argument("edge length mismatch");
            throw std::invalid_argument("direction mismatch");
        }
        if (g.kind == GluingKind::Semi) s.has_semi = true;
    }
    for (size_t p = 0; p < polygons.size(); ++p)
        for (int e = 0; e < polygons[p].n(); ++e)
            if (s.gluing_lookup[p][e] == -1)
                throw std::invalid_argument("gluing incomplete");

    for (const auto& m : marked)
        if (!edge_ok(m.p, m.v)) throw std::invalid_argument("bad marked point");

    // corner cycles: from (p,v), cross the incoming edge (p, v-1)
    s.cone_lookup.resize(polygons.size());
    for (size_t p = 0; p < polygons.size(); ++p)
        s.cone_lookup[p].assign(polygons[p].n(), -1);
    for (size_t p0 = 0; p0 < polygons.size(); ++p0) {
        for (int v0 = 0; v0 < polygons[p0].n(); ++v0) {
            if (s.cone_lookup[p0][v0] != -1) continue;
            ConePoint cone;
            double angle = 0;
            int p = static_cast<int>(p0), v = v0;
            do {
                cone.corners.push_back({p, v});
                s.cone_lookup[p][v] = static_cast<int>(s.cone_points.size());
                angle += interior_angle(polygons[p], v);
                int prev = (v - 1 + polygons[p].n()) % polygons[p].n();
                auto [q, f] = s.partner(p, prev);
                p = q;
                v = f;
            } while (!(p == static_cast<int>(p0) && v == v0));
            double m = angle / M_PI;
            long k = std::lround(m);
            if (k < 1 || std::abs(m - double(k)) > 1e-9 * std::max(1.0, m))
                throw std::invalid_argument("invalid cone angle");
            cone.angle_multiple = static_cast<int>(k);
            s.cone_points.push_back(cone);
        }
    }
    for (const auto& m : marked)
        s.cone_points[s.cone_lookup[m.p][m.v]].marked = true;

    long defect = 0;
    for (const auto& c : s.cone_points) defect += c.angle_multiple - 2;
    if (defect + 4 < 0 || (defect + 4) % 4 != 0)
        throw std::invalid_argument("invalid cone angle");
    s.genus = static_cast<int>((defect + 4) / 4);

    s.area = 0;
    for (const auto& poly : polygons) s.area += poly.area2() / 2;
    if (s.area <= 0) throw std::invalid_argument("non-positive area");
    return s;
}

FlatSurface orientation_double_cover(const FlatSurface& s) {
    if (!s.has_semi) return s;
    int np = static_cast<int>(s.polygons.size());
    std::vector<Polygon> polys = s.polygons;
    for (const auto& poly : s.polygons) {
        Polygon rotated;  // z -> -z preserves orientation
        for (const auto& v : poly.v) rotated.v.push_back(-v);
        polys.push_back(rotated);
    }
    std::vector<Gluing> gl;
    for (const auto& g : s.gluings) {
        if (g.kind == GluingKind::Translation) {
            gl.push_back({g.p, g.e, g.q, g.f, GluingKind::Translation});
            gl.push_back({g.p + np, g.e, g.q + np, g.f, GluingKind::Translation});
        } else {
            gl.push_back({g.p, g.e, g.q + np, g.f, GluingKind::Translation});
            gl.push_back({g.p + np, g.e, g.q, g.f, GluingKind::Translation});
        }
    }
    std::vector<MarkedPoint> mk = s.marked;
    for (const auto& m : s.marked) mk.push_back({m.p + np, m.v});
    return build_surface(polys, gl, mk);
}

FlatSurface apply_flow_exact(const FlatSurface& s, const Rat& lambda) {
    if (lambda <= 0) throw std::invalid_argument("flow factor must be positive");
    std::vector<Polygon> polys = s.polygons;
    for (auto& poly : polys)
        for (auto& v : poly.v) v = Vec(v.x * lambda, v.y / lambda);
    return build_surface(polys, s.gluings, s.marked);
}

FlatCurve apply_flow_exact(const FlatCurve& c, const Rat& lambda) {
    if (lambda <= 0) throw std::invalid_argument("flow factor must be positive");
    FlatCurve out = c;
    for (auto& seg : out.segments) {
        seg.a = Vec(seg.a.x * lambda, seg.a.y / lambda);
        seg.b = Vec(seg.b.x * lambda, seg.b.y / lambda);
    }
    return out;
}

Holonomy apply_flow(const Holonomy& h, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite flow time");
    return {h.h * std::exp(t), h.v * std::exp(-t)};
}

FlatSurface apply_flow(const FlatSurface& s, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite flow time");
    return apply_flow_exact(s, rat_from_double(std::exp(t)));
}

FlatCurve apply_flow(const FlatCurve& c, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite flow time");
    return apply_flow_exact(c, rat_from_double(std::exp(t)));
}

std::pair<double, double> unsigned_holonomy(const FlatCurve& c) {
    double h = 0, v = 0;
    for (const auto& seg : c.segments) {
        h += std::abs(to_double(seg.b.x - seg.a.x));
        v += std::abs(to_double(seg.b.y - seg.a.y));
    }
    return {h, v};
}

double curve_length(const FlatCurve& c) {
    double l = 0;
    for (const auto& seg : c.segments)
        l += std::sqrt(to_double((seg.b - seg.a).norm2()));
    return l;
}

FlatCurve torus_line(const FlatSurface& s, long p, long q, const Vec& offset) {
    if (s.polygons.size() != 1 || s.polygons[0].n() != 4)
        throw std::invalid_argument("torus_line needs a one-parallelogram torus");
    if (p == 0 && q == 0) throw std::invalid_argument("zero curve class");
    long g = std::gcd(std::labs(p), std::labs(q));
    p /= g;
    q /= g;
    const Polygon& poly = s.polygons[0];
    Vec v0 = poly.v[0], u1 = poly.edge(0), u2 = poly.edge(1);

    // lattice coordinates: point(c) = v0 + (ox + c p) u1 + (oy + c q) u2
    std::vector<Rat> cuts{0, 1};
    for (long i = -std::labs(p) - 2; i <= std::labs(p) + 2; ++i) {
        if (p == 0) break;
        Rat c = (Rat(i) - offset.x) / p;
        if (c > 0 && c < 1) cuts.push_back(c);
    }
    for (long i = -std::labs(q) - 2; i <= std::labs(q) + 2; ++i) {
        if (q == 0) break;
        Rat c = (Rat(i) - offset.y) / q;
        if (c > 0 && c < 1) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    FlatCurve curve;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Rat mid = (cuts[i] + cuts[i + 1]) / 2;
        Rat fx = Rat(rat_floor(offset.x + mid * p));
        Rat fy = Rat(rat_floor(offset.y + mid * q));
        auto pt = [&](const Rat& c) {
            Rat lx = offset.x + c * p - fx, ly = offset.y + c * q - fy;
            return v0 + u1 * lx + u2 * ly;
        };
        curve.segments.push_back({0, pt(cuts[i]), pt(cuts[i + 1])});
    }
    return curve;
}

FlatSurface make_square_torus(bool marked) {
    Polygon sq;
    sq.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(0)), Vec(Rat(1), Rat(1)),
            Vec(Rat(0), Rat(1))};
    std::vector<Gluing> gl{{0, 0, 0, 2, GluingKind::Translation},
                           {0, 1, 0, 3, GluingKind::Translation}};
    std::vector<MarkedPoint> mk;
    if (marked) mk.push_back({0, 0});
    return build_surface({sq}, gl, mk);
}

FlatSurface make_sheared_torus(const Rat& shear, bool marked) {
    Polygon par;
    par.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(0)), Vec(Rat(1) + shear, Rat(1)),
             Vec(shear, Rat(1))};
    std::vector<Gluing> gl{{0, 0, 0, 2, GluingKind::Translation},
                           {0, 1, 0, 3, GluingKind::Translation}};
    std::vector<MarkedPoint> mk;
    if (marked) mk.push_back({0, 0});
    return build_surface({par}, gl, mk);
}

FlatSurface make_l_surface() {
    Polygon l;
    l.v = {Vec(Rat(0), Rat(0)), Vec(Rat(1), Rat(0)), Vec(Rat(2), Rat(0)),
           Vec(Rat(2), Rat(1)), Vec(Rat(1), Rat(1)), Vec(Rat(1), Rat(2)),
           Vec(Rat(0), Rat(2)), Vec(Rat(0), Rat(1))};
    std::vector<Gluing> gl{{0, 0, 0, 5, GluingKind::Translation},
                           {0, 1, 0, 3, GluingKind::Translation},
                           {0, 2, 0, 7, GluingKind::Translation},
                           {0, 4, 0, 6, GluingKind::Translation}};
    return build_surface({l}, gl, {});
}

}  // namespace teichsim::flat
