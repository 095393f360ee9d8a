#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "surface_internal.hpp"

namespace teichsim::flat {

namespace {

bool on_edge(const Vec& a, const Vec& b, const Vec& p) {
    if (cross(b - a, p - a) != 0) return false;
    Rat t = dot(p - a, b - a);
    return t >= 0 && t <= (b - a).norm2();
}

// inside or on the boundary, exact ray cast
bool in_polygon(const Polygon& poly, const Vec& p) {
    bool in = false;
    for (int i = 0; i < poly.n(); ++i) {
        const Vec& a = poly.v[i];
        const Vec& b = poly.v[(i + 1) % poly.n()];
        if (on_edge(a, b, p)) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            // x coordinate of the edge at height p.y
            Rat x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x > p.x) in = !in;
        }
    }
    return in;
}

struct QSeg {
    int poly;
    Vec a, b;
    int depth;
};

struct DegenerateCase {};

// split the segment into sub-pieces inside the polygon; push pieces that fall
// outside across the edge they exited through
std::vector<CurveSegment> chartify(const FlatSurface& s,
                                   const std::vector<CurveSegment>& segs,
                                   const Vec& shift) {
    std::deque<QSeg> q;
    for (const auto& seg : segs) {
        if (seg.poly < 0 || seg.poly >= static_cast<int>(s.polygons.size()))
            throw std::invalid_argument("bad polygon index");
        q.push_back({seg.poly, seg.a + shift, seg.b + shift, 0});
    }
    std::vector<CurveSegment> out;
    long guard = 0;
    while (!q.empty()) {
        QSeg sg = q.front();
        q.pop_front();
        if (sg.a == sg.b) continue;
        if (sg.depth > 8 || ++guard > 100000) throw DegenerateCase{};
        const Polygon& poly = s.polygons[sg.poly];
        Vec d = sg.b - sg.a;
        std::vector<Rat> ts{Rat(0), Rat(1)};
        for (int e = 0; e < poly.n(); ++e) {
            Vec p = poly.v[e], ev = poly.edge(e);
            Rat den = cross(d, ev);
            if (den == 0) continue;
            Rat t = cross(p - sg.a, ev) / den;
            Rat u = cross(p - sg.a, d) / den;
            if (t > 0 && t < 1 && u >= 0 && u <= 1) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        for (size_t j = 0; j + 1 < ts.size(); ++j) {
            Vec pa = sg.a + d * ts[j];
            Vec pb = sg.a + d * ts[j + 1];
            Vec mid = sg.a + d * ((ts[j] + ts[j + 1]) / 2);
            if (in_polygon(poly, mid)) {
                out.push_back({sg.poly, pa, pb});
                continue;
            }
            // outside: find the boundary edge at one of the cut ends
            int exit_edge = -1;
            for (const Vec* endp : {&pa, &pb}) {
                for (int e = 0; e < poly.n() && exit_edge < 0; ++e) {
                    if (on_edge(poly.v[e], poly.v[(e + 1) % poly.n()], *endp))
                        exit_edge = e;
                }
                if (exit_edge >= 0) break;
            }
            if (exit_edge < 0) throw DegenerateCase{};
            const Gluing& g = s.gluings[s.gluing_at(sg.poly, exit_edge)];
            auto [q2, f2] = s.partner(sg.poly, exit_edge);
            const Polygon& tp = s.polygons[q2];
            if (g.kind == GluingKind::Translation) {
                Vec tau = tp.v[(f2 + 1) % tp.n()] - poly.v[exit_edge];
                q.push_back({q2, pa + tau, pb + tau, sg.depth + 1});
            } else {
                Vec sigma = tp.v[(f2 + 1) % tp.n()] + poly.v[exit_edge];
                q.push_back({q2, sigma - pa, sigma - pb, sg.depth + 1});
            }
        }
    }
    return out;
}

struct CrossResult {
    long count = 0;
    std::vector<std::pair<int, Vec>> points;  // (polygon, location)
};

CrossResult cross_once(const FlatSurface& s, const std::vector<CurveSegment>& a,
                       const std::vector<CurveSegment>& b, const Vec& shift) {
    auto pa = chartify(s, a, Vec());
    auto pb = chartify(s, b, shift);
    CrossResult res;
    for (const auto& s1 : pa) {
        for (const auto& s2 : pb) {
            if (s1.poly != s2.poly) continue;
            Vec d1 = s1.b - s1.a, d2 = s2.b - s2.a;
            Rat den = cross(d1, d2);
            Vec w = s2.a - s1.a;
            if (den == 0) {
                if (cross(d1, w) == 0) {
                    // collinear: overlapping pieces are degenerate
                    Rat t0 = dot(w, d1) / d1.norm2();
                    Rat t1 = dot(w + d2, d1) / d1.norm2();
                    if (std::max(std::min(t0, t1), Rat(0)) <
                        std::min(std::max(t0, t1), Rat(1)))
                        throw DegenerateCase{};
                }
                continue;
            }
            Rat t = cross(w, d2) / den;
            Rat u = cross(w, d1) / den;
            if (t < 0 || t > 1 || u < 0 || u > 1) continue;
            if (t == 0 || t == 1 || u == 0 || u == 1) throw DegenerateCase{};
            ++res.count;
            res.points.push_back({s1.poly, s1.a + d1 * t});
        }
    }
    return res;
}

CrossResult count_crossings(const FlatSurface& s, const FlatCurve& alpha,
                            const FlatCurve& beta) {
    if (alpha.segments.empty() || beta.segments.empty())
        throw std::invalid_argument("empty curve");
    if (!alpha.closed || !beta.closed)
        throw std::invalid_argument("curves must be closed");
    for (int attempt = 0; attempt < 40; ++attempt) {
        Rat delta(1, 10000019 + 1013 * attempt);
        Vec shift = Vec(delta, delta * Rat(355 + attempt, 113));
        try {
            return cross_once(s, alpha.segments, beta.segments, shift);
        } catch (const DegenerateCase&) {
            continue;
        }
    }
    throw std::runtime_error("intersection count did not stabilize");
}

}  // namespace

long intersection_number(const FlatSurface& s, const FlatCurve& alpha,
                         const FlatCurve& beta) {
    return count_crossings(s, alpha, beta).count;
}

ThickBoundReport check_thick_intersection_bound(const FlatSurface& s, double epsilon,
                                                const FlatCurve& alpha,
                                                const FlatCurve& beta) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    double cut = epsilon * (1 - 1e-12);
    for (const auto& sc : enumerate_saddle_connections(s, epsilon))
        if (sc.length() < cut) throw std::invalid_argument("not in thick part");
    for (const auto& cyl : enumerate_cylinders(s, epsilon))
        if (std::sqrt(to_double(cyl.circumference.norm2())) < cut)
            throw std::invalid_argument("not in thick part");
    ThickBoundReport rep;
    rep.i = intersection_number(s, alpha, beta);
    rep.bound = 4.0 / (epsilon * epsilon) * curve_length(alpha) * curve_length(beta);
    rep.pass = rep.i <= rep.bound * (1 + 1e-9);
    return rep;
}

namespace {

// component of the point: cylinder index, or ~k for minimal component k
int locate_component(const FlatSurface& s, const detail::Section& sec,
                     const VerticalDecomposition& dec, int poly, const Vec& pt) {
    int best = -1;
    Rat best_y;
    for (size_t i = 0; i < sec.intervals.size(); ++i) {
        const auto& si = sec.intervals[i];
        if (si.upoly != poly) continue;
        if (!(si.x0 <= pt.x && pt.x < si.x0 + si.w)) continue;
        Rat y = si.y_at(pt.x);
        if (y > pt.y) continue;
        if (best < 0 || y > best_y) {
            best = static_cast<int>(i);
            best_y = y;
        }
    }
    if (best < 0) throw std::runtime_error("point location failed");
    int gid = sec.intervals[best].gluing;
    Rat param = pt.x - sec.intervals[best].x0;
    for (size_t c = 0; c < dec.cylinders.size(); ++c)
        for (const auto& cell : dec.cylinders[c].cells)
            if (cell.gluing == gid && cell.lo <= param && param < cell.hi)
                return static_cast<int>(c);
    for (size_t m = 0; m < dec.minimal.size(); ++m)
        for (const auto& cell : dec.minimal[m].cells)
            if (cell.gluing == gid && cell.lo <= param && param < cell.hi)
                return ~static_cast<int>(m);
    throw std::runtime_error("point location failed");
}

}  // namespace

SlopeBoundReport slope_intersection_bound(const FlatSurface& s, const FlatCurve& alpha,
                                          const FlatCurve& beta, double H, double M,
                                          double epsilon) {
    if (!(H > 0)) throw std::invalid_argument("H must be positive");
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (s.has_semi)
        throw std::invalid_argument("translation surface required");
    for (const FlatCurve* c : {&alpha, &beta}) {
        auto [h, v] = unsigned_holonomy(*c);
        if (h > 0 && v / h < M * (1 - 1e-12))
            throw std::invalid_argument("slope below threshold");
    }
    detail::Section sec = detail::build_section(s);
    auto dec = vertical_decomposition(s);

    auto res = count_crossings(s, alpha, beta);
    SlopeBoundReport rep;
    rep.i = res.count;
    for (const auto& [poly, pt] : res.points) {
        int comp = locate_component(s, sec, dec, poly, pt);
        if (comp >= 0) ++rep.i_C;
        else ++rep.i_Z;
    }
    rep.low_slope = rep.i - rep.i_C - rep.i_Z;
    rep.k9 = 2.0 / epsilon + 9.0 + 4.0 / (epsilon * epsilon);
    rep.bound = rep.k9 * curve_length(alpha) * curve_length(beta) / H;
    rep.pass = rep.i <= rep.bound * (1 + 1e-9);

    // maximal cyclic runs of alpha's segments inside each cylinder
    std::vector<int> comp_of;
    for (const auto& seg : alpha.segments) {
        Vec mid = (seg.a + seg.b) * Rat(1, 2);
        comp_of.push_back(locate_component(s, sec, dec, seg.poly, mid));
    }
    rep.sojourns.assign(dec.cylinders.size(), 0);
    int n = static_cast<int>(comp_of.size());
    for (int c = 0; c < static_cast<int>(dec.cylinders.size()); ++c) {
        long runs = 0;
        bool all = true;
        for (int j = 0; j < n; ++j) {
            bool inc = comp_of[j] == c;
            bool prev = comp_of[(j - 1 + n) % n] == c;
            if (inc && !prev) ++runs;
            if (!inc) all = false;
        }
        rep.sojourns[c] = all ? 1 : runs;
    }
    return rep;
}

}  // namespace teichsim::flat
