#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "surface_internal.hpp"

namespace teichsim::flat {

namespace detail {

Rat SInterval::y_at(const Rat& x) const { return ya + yslope * (x - x0); }

Section build_section(const FlatSurface& s) {
    if (s.has_semi)
        throw std::runtime_error("internal: section needs a translation surface");
    Section sec;
    for (size_t gi = 0; gi < s.gluings.size(); ++gi) {
        const Gluing& g = s.gluings[gi];
        Vec ve = s.polygons[g.p].edge(g.e);
        if (ve.x == 0) continue;
        int up = ve.x > 0 ? g.p : g.q;
        int ue = ve.x > 0 ? g.e : g.f;
        Vec uv = s.polygons[up].edge(ue);
        SInterval si;
        si.gluing = static_cast<int>(gi);
        si.upoly = up;
        si.uedge = ue;
        si.x0 = s.polygons[up].v[ue].x;
        si.w = uv.x;
        si.ya = s.polygons[up].v[ue].y;
        si.yslope = uv.y / uv.x;
        sec.intervals.push_back(si);
    }
    if (sec.intervals.empty())
        throw std::runtime_error("no transversal edges");

    std::map<int, int> by_gluing;
    for (size_t i = 0; i < sec.intervals.size(); ++i)
        by_gluing[sec.intervals[i].gluing] = static_cast<int>(i);

    for (const auto& si : sec.intervals) {
        const Polygon& poly = s.polygons[si.upoly];
        std::set<Rat> cuts;
        for (const auto& v : poly.v)
            if (v.x > si.x0 && v.x < si.x0 + si.w) cuts.insert(v.x - si.x0);
        std::vector<Rat> bounds{0};
        bounds.insert(bounds.end(), cuts.begin(), cuts.end());
        bounds.push_back(si.w);

        std::vector<PassPiece> pieces;
        for (size_t j = 0; j + 1 < bounds.size(); ++j) {
            Rat lo = bounds[j], hi = bounds[j + 1];
            Rat xm = si.x0 + (lo + hi) / 2;
            Rat ey = si.y_at(xm);
            int exit_edge = -1;
            Rat best_y;
            for (int e = 0; e < poly.n(); ++e) {
                if (e == si.uedge) continue;
                Vec a = poly.v[e], b = poly.v[(e + 1) % poly.n()];
                if (a.x == b.x) continue;
                Rat xl = std::min(a.x, b.x), xr = std::max(a.x, b.x);
                if (!(xl < xm && xm < xr)) continue;
                Rat y = a.y + (xm - a.x) * (b.y - a.y) / (b.x - a.x);
                if (y <= ey) continue;
                if (exit_edge < 0 || y < best_y) {
                    exit_edge = e;
                    best_y = y;
                }
            }
            if (exit_edge < 0)
                throw std::runtime_error("pass has no exit edge");
            Vec a = poly.v[exit_edge];
            Vec ev = poly.edge(exit_edge);
            Rat exit_slope = ev.y / ev.x;
            auto [q2, f2] = s.partner(si.upoly, exit_edge);
            Vec tau = s.polygons[q2].v[(f2 + 1) % s.polygons[q2].n()] - a;
            int ti = by_gluing.at(s.gluing_at(si.upoly, exit_edge));
            const SInterval& target = sec.intervals[ti];

            PassPiece pc;
            pc.lo = lo;
            pc.hi = hi;
            pc.to_interval = ti;
            pc.exit_edge = exit_edge;
            pc.shift = si.x0 + tau.x - target.x0;
            // height(s) = exit line - entry line at x = x0 + s
            Rat exit_at_x0 = a.y + (si.x0 - a.x) * exit_slope;
            pc.h0 = exit_at_x0 - si.ya;
            pc.h1 = exit_slope - si.yslope;
            pieces.push_back(pc);
        }
        sec.pieces.push_back(pieces);
    }
    return sec;
}

const PassPiece& piece_at(const Section& sec, int iv, const Rat& s) {
    for (const auto& pc : sec.pieces[iv])
        if (pc.lo <= s && s < pc.hi) return pc;
    throw std::runtime_error("section parameter out of range");
}

}  // namespace detail

namespace {

using detail::PassPiece;
using detail::Section;
using detail::SInterval;

struct SPos {
    int iv;
    Rat s;
    bool operator==(const SPos&) const = default;
};

SPos step(const Section& sec, const SPos& p, Rat* height) {
    const PassPiece& pc = detail::piece_at(sec, p.iv, p.s);
    if (height) *height = pc.h0 + pc.h1 * p.s;
    return {pc.to_interval, p.s + pc.shift};
}

// forward and backward closure of the discontinuity set, budget-capped
std::vector<std::set<Rat>> refine_breakpoints(const Section& sec, long budget) {
    int n = static_cast<int>(sec.intervals.size());
    std::vector<std::set<Rat>> pts(n);
    std::deque<std::pair<int, Rat>> work;
    auto add = [&](int iv, const Rat& x) {
        if (x < 0 || x >= sec.intervals[iv].w) return;
        if (pts[iv].insert(x).second) work.push_back({iv, x});
    };
    for (int i = 0; i < n; ++i)
        for (const auto& pc : sec.pieces[i]) add(i, pc.lo);

    // inverse pieces
    struct Inv {
        int from;
        Rat lo, hi, shift;
    };
    std::vector<std::vector<Inv>> inv(n);
    for (int i = 0; i < n; ++i)
        for (const auto& pc : sec.pieces[i])
            inv[pc.to_interval].push_back(
                {i, pc.lo + pc.shift, pc.hi + pc.shift, -pc.shift});

    long used = 0;
    while (!work.empty() && used < budget) {
        auto [iv, x] = work.front();
        work.pop_front();
        ++used;
        // forward, both one-sided limits
        for (const auto& pc : sec.pieces[iv]) {
            if (pc.lo <= x && x < pc.hi) add(pc.to_interval, x + pc.shift);
            if (pc.lo < x && x <= pc.hi) add(pc.to_interval, x + pc.shift);
        }
        for (const auto& vi : inv[iv]) {
            if (vi.lo <= x && x < vi.hi) add(vi.from, x + vi.shift);
            if (vi.lo < x && x <= vi.hi) add(vi.from, x + vi.shift);
        }
    }
    return pts;
}

struct Cell {
    int iv;
    Rat lo, hi;
    int component = -1;  // >= 0 cylinder id, -2 tentatively minimal
};

Rat cell_area(const Section& sec, const Cell& c) {
    const PassPiece& pc = detail::piece_at(sec, c.iv, c.lo);
    Rat ha = pc.h0 + pc.h1 * c.lo, hb = pc.h0 + pc.h1 * c.hi;
    return (c.hi - c.lo) * (ha + hb) / 2;
}

// by_iv holds cell ids in increasing order of lo
int find_cell(const std::vector<Cell>& cells,
              const std::vector<std::vector<int>>& by_iv, const SPos& p) {
    const auto& ids = by_iv[p.iv];
    auto it = std::upper_bound(ids.begin(), ids.end(), p.s,
                               [&](const Rat& s, int ci) { return s < cells[ci].lo; });
    if (it != ids.begin()) {
        int ci = *(it - 1);
        if (cells[ci].lo <= p.s && p.s < cells[ci].hi) return ci;
    }
    throw std::runtime_error("position outside every cell");
}

struct BoundaryWalk {
    std::vector<SPos> orbit;  // one period of section positions
};

// singular hits along the vertical leaf at the given boundary parameter,
// following the recorded pass sequence; returns (height, cone) sorted
std::vector<std::pair<Rat, int>> boundary_hits(const FlatSurface& s,
                                               const Section& sec,
                                               const std::vector<const PassPiece*>& seq,
                                               const std::vector<int>& seq_iv,
                                               Rat param) {
    std::vector<std::pair<Rat, int>> hits;
    Rat hcum = 0;
    bool prev_top_vertex = false;
    // wrap-around: run the sequence once to learn whether the final top is a
    // vertex, seeding prev_top_vertex for the first pass
    for (int round = 0; round < 2; ++round) {
        Rat p = param;
        Rat h = 0;
        bool ptv = prev_top_vertex;
        for (size_t j = 0; j < seq.size(); ++j) {
            const PassPiece& pc = *seq[j];
            const SInterval& si = sec.intervals[seq_iv[j]];
            const Polygon& poly = s.polygons[si.upoly];
            Rat x = si.x0 + p;
            Rat yin = si.y_at(x);
            Rat hpass = pc.h0 + pc.h1 * p;
            Rat yout = yin + hpass;
            bool top_vertex = false;
            for (int vtx = 0; vtx < poly.n(); ++vtx) {
                const Vec& v = poly.v[vtx];
                if (v.x != x) continue;
                bool singular = s.cone_points[s.cone_index(si.upoly, vtx)].singular();
                if (v.y == yout) {
                    top_vertex = true;
                    if (singular && round == 1) hits.push_back({h + hpass, si.upoly * 1000000 + vtx});
                } else if (v.y == yin) {
                    if (!ptv && singular && round == 1) hits.push_back({h, si.upoly * 1000000 + vtx});
                } else if (yin < v.y && v.y < yout) {
                    if (singular && round == 1) hits.push_back({h + (v.y - yin), si.upoly * 1000000 + vtx});
                }
            }
            ptv = top_vertex;
            h += hpass;
            p = p + pc.shift;
        }
        prev_top_vertex = ptv;
        hcum = h;
    }
    (void)hcum;
    // decode cone ids
    for (auto& [h, code] : hits) code = s.cone_index(code / 1000000, code % 1000000);
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<SaddleConnection> hits_to_connections(
    const std::vector<std::pair<Rat, int>>& hits, const Rat& circumference) {
    std::vector<SaddleConnection> out;
    if (hits.empty()) return out;
    for (size_t i = 0; i < hits.size(); ++i) {
        Rat h0 = hits[i].first;
        Rat h1 = i + 1 < hits.size() ? hits[i + 1].first : hits[0].first + circumference;
        int c0 = hits[i].second;
        int c1 = i + 1 < hits.size() ? hits[i + 1].second : hits[0].second;
        if (h1 > h0) out.push_back({Vec(Rat(0), h1 - h0), c0, c1});
    }
    return out;
}

iet::Suspension induce_on_cell(const Section& sec, const Cell& target, long budget);

}  // namespace

VerticalDecomposition vertical_decomposition(const FlatSurface& input, long budget) {
    const FlatSurface surf =
        input.has_semi ? orientation_double_cover(input) : input;
    Section sec = detail::build_section(surf);
    auto pts = refine_breakpoints(sec, budget);

    std::vector<Cell> cells;
    std::vector<std::vector<int>> by_iv(sec.intervals.size());
    for (size_t i = 0; i < sec.intervals.size(); ++i) {
        std::vector<Rat> bounds(pts[i].begin(), pts[i].end());
        bounds.push_back(sec.intervals[i].w);
        for (size_t j = 0; j + 1 < bounds.size(); ++j) {
            by_iv[i].push_back(static_cast<int>(cells.size()));
            cells.push_back({static_cast<int>(i), bounds[j], bounds[j + 1], -1});
        }
    }

    VerticalDecomposition dec;
    long maxsteps = static_cast<long>(cells.size()) + 8;
    std::vector<std::vector<int>> minimal_links;  // cell ids seen per minimal orbit

    for (size_t c0 = 0; c0 < cells.size(); ++c0) {
        if (cells[c0].component != -1) continue;
        SPos start{cells[c0].iv, (cells[c0].lo + cells[c0].hi) / 2};
        SPos p = start;
        Rat circ = 0;
        std::vector<int> visited;
        std::vector<const PassPiece*> seq;
        std::vector<int> seq_iv;
        bool periodic = false;
        for (long st = 0; st < maxsteps; ++st) {
            visited.push_back(find_cell(cells, by_iv, p));
            seq.push_back(&detail::piece_at(sec, p.iv, p.s));
            seq_iv.push_back(p.iv);
            Rat h;
            p = step(sec, p, &h);
            circ += h;
            if (p == start) {
                periodic = true;
                break;
            }
        }
        if (periodic) {
            VerticalCylinder cyl;
            cyl.circumference = circ;
            cyl.width = cells[c0].hi - cells[c0].lo;
            cyl.area = 0;
            int id = static_cast<int>(dec.cylinders.size());
            for (int ci : visited) {
                cells[ci].component = id;
                cyl.cells.push_back({sec.intervals[cells[ci].iv].gluing,
                                     cells[ci].lo, cells[ci].hi});
                cyl.area += cell_area(sec, cells[ci]);
            }
            if (cyl.area != circ * cyl.width)
                throw std::runtime_error("cylinder area mismatch");
            auto lh = boundary_hits(surf, sec, seq, seq_iv, cells[c0].lo);
            auto rh = boundary_hits(surf, sec, seq, seq_iv, cells[c0].hi);
            cyl.boundary_left = hits_to_connections(lh, circ);
            cyl.boundary_right = hits_to_connections(rh, circ);
            dec.cylinders.push_back(cyl);
        } else {
            for (int ci : visited) cells[ci].component = -2;
            minimal_links.push_back(visited);
        }
    }

    // group tentative minimal cells by orbit connectivity
    std::map<int, int> group;  // cell -> group id
    int ng = 0;
    for (const auto& link : minimal_links) {
        int g = -1;
        for (int ci : link)
            if (group.count(ci)) {
                g = group[ci];
                break;
            }
        if (g < 0) g = ng++;
        for (int ci : link) {
            if (group.count(ci) && group[ci] != g) {
                int old = group[ci];
                for (auto& [k, v] : group)
                    if (v == old) v = g;
            }
            group[ci] = g;
        }
    }
    std::map<int, std::vector<int>> comps;
    for (auto& [ci, g] : group) comps[g].push_back(ci);
    for (auto& [g, cs] : comps) {
        MinimalComponent mc;
        mc.area = 0;
        int widest = cs.front();
        for (int ci : cs) {
            mc.cells.push_back({sec.intervals[cells[ci].iv].gluing,
                                cells[ci].lo, cells[ci].hi});
            mc.area += cell_area(sec, cells[ci]);
            if (cells[ci].hi - cells[ci].lo > cells[widest].hi - cells[widest].lo)
                widest = ci;
        }
        mc.section = {sec.intervals[cells[widest].iv].gluing, cells[widest].lo,
                      cells[widest].hi};
        mc.suspension = induce_on_cell(sec, cells[widest], budget * 10);
        dec.minimal.push_back(mc);
    }

    dec.total_area = 0;
    for (const auto& c : cells) dec.total_area += cell_area(sec, c);
    if (dec.total_area != surf.area)
        throw std::runtime_error("decomposition area mismatch");
    return dec;
}

namespace {

iet::Suspension induce_on_cell(const Section& sec, const Cell& target, long budget) {
    struct IStrip {
        Rat olo, ohi;  // sub-interval of [target.lo, target.hi)
        int iv;
        Rat off;       // current param = o + off
        Rat h0, h1;    // accumulated height = h0 + h1 * o
        long m;
    };
    std::deque<IStrip> q;
    q.push_back({target.lo, target.hi, target.iv, Rat(0), Rat(0), Rat(0), 0});
    struct RPiece {
        Rat olo, ohi, shift, height;
    };
    std::vector<RPiece> done;
    long used = 0;
    while (!q.empty()) {
        IStrip st = q.front();
        q.pop_front();
        if (++used > budget)
            throw std::runtime_error("suspension budget exceeded");
        if (st.m >= 1 && st.iv == target.iv) {
            Rat clo = st.olo + st.off, chi = st.ohi + st.off;
            if (clo < target.hi && chi > target.lo) {
                Rat ilo = std::max(clo, target.lo), ihi = std::min(chi, target.hi);
                Rat olo2 = ilo - st.off, ohi2 = ihi - st.off;
                if (olo2 > st.olo)
                    q.push_back({st.olo, olo2, st.iv, st.off, st.h0, st.h1, st.m});
                if (ohi2 < st.ohi)
                    q.push_back({ohi2, st.ohi, st.iv, st.off, st.h0, st.h1, st.m});
                if (st.h1 != 0)
                    throw std::runtime_error("return height not constant");
                done.push_back({olo2, ohi2, st.off, st.h0});
                continue;
            }
        }
        // advance one pass, splitting at piece boundaries
        std::vector<Rat> cuts;
        Rat clo = st.olo + st.off, chi = st.ohi + st.off;
        for (const auto& pc : sec.pieces[st.iv]) {
            if (pc.lo > clo && pc.lo < chi) cuts.push_back(pc.lo - st.off);
        }
        cuts.push_back(st.olo);
        cuts.push_back(st.ohi);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (size_t j = 0; j + 1 < cuts.size(); ++j) {
            Rat lo = cuts[j], hi = cuts[j + 1];
            const PassPiece& pc = detail::piece_at(sec, st.iv, lo + st.off);
            // pass height at o: pc.h0 + pc.h1 * (o + off)
            q.push_back({lo, hi, pc.to_interval, st.off + pc.shift,
                         st.h0 + pc.h0 + pc.h1 * st.off, st.h1 + pc.h1, st.m + 1});
        }
    }
    std::sort(done.begin(), done.end(),
              [](const RPiece& a, const RPiece& b) { return a.olo < b.olo; });
    std::vector<RPiece> merged;
    for (const auto& p : done) {
        if (!merged.empty() && merged.back().ohi == p.olo &&
            merged.back().shift == p.shift && merged.back().height == p.height)
            merged.back().ohi = p.ohi;
        else
            merged.push_back(p);
    }
    done = merged;
    Rat covered = target.lo;
    std::vector<Rat> widths, heights;
    std::vector<Rat> image_lefts;
    for (const auto& p : done) {
        if (p.olo != covered) throw std::runtime_error("suspension left a gap");
        widths.push_back(p.ohi - p.olo);
        heights.push_back(p.height);
        image_lefts.push_back(p.olo + p.shift);
        covered = p.ohi;
    }
    if (covered != target.hi) throw std::runtime_error("suspension left a gap");
    std::vector<int> idx(done.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return image_lefts[a] < image_lefts[b]; });
    std::vector<int> perm(done.size());
    for (size_t r = 0; r < idx.size(); ++r) perm[idx[r]] = static_cast<int>(r) + 1;
    iet::Suspension susp;
    susp.iet = iet::build_iet(widths, perm);
    susp.heights = heights;
    return susp;
}

}  // namespace

ZipperedRectangles first_return(const FlatSurface& input, const HorizontalSection& hs,
                                long budget) {
    const FlatSurface surf =
        input.has_semi ? orientation_double_cover(input) : input;
    if (hs.poly < 0 || hs.poly >= static_cast<int>(surf.polygons.size()))
        throw std::invalid_argument("bad polygon index");
    if (hs.width <= 0) throw std::invalid_argument("section width must be positive");
    const Polygon& spoly = surf.polygons[hs.poly];
    for (int vtx = 0; vtx < spoly.n(); ++vtx) {
        const Vec& v = spoly.v[vtx];
        if (v.y == hs.base.y && v.x > hs.base.x && v.x < hs.base.x + hs.width &&
            surf.cone_points[surf.cone_index(hs.poly, vtx)].singular())
            throw std::invalid_argument("section meets a singularity");
    }

    // cylinder detection at the section midpoint
    Section sec = detail::build_section(surf);
    auto dec = vertical_decomposition(input, budget / 100 + 500);
    {
        Rat xm = hs.base.x + hs.width / 2;
        int best = -1;
        Rat best_y;
        for (size_t i = 0; i < sec.intervals.size(); ++i) {
            const SInterval& si = sec.intervals[i];
            if (si.upoly != hs.poly) continue;
            if (!(si.x0 <= xm && xm < si.x0 + si.w)) continue;
            Rat y = si.y_at(xm);
            if (y > hs.base.y) continue;
            if (best < 0 || y > best_y) {
                best = static_cast<int>(i);
                best_y = y;
            }
        }
        if (best >= 0) {
            Rat param = xm - sec.intervals[best].x0;
            int bg = sec.intervals[best].gluing;
            for (const auto& cyl : dec.cylinders) {
                for (const auto& cell : cyl.cells) {
                    if (cell.gluing != bg) continue;
                    if (cell.lo <= param && param < cell.hi) {
                        if (hs.width == cyl.width) {
                            ZipperedRectangles z;
                            z.section_length = hs.width;
                            z.widths = {hs.width};
                            z.heights = {cyl.circumference};
                            z.base_map = iet::build_iet({Rat(1)}, {1});
                            return z;
                        }
                        throw std::invalid_argument("use cylinder data directly");
                    }
                }
            }
        }
    }

    struct FStrip {
        Rat olo, ohi;  // section parameter in [0, width)
        int poly;
        Rat xoff;        // chart x = base.x + xoff + o
        Rat ey0, ey1;    // entry y = ey0 + ey1 * o
        Rat h0, h1;      // accumulated height
        long m;
    };
    std::deque<FStrip> q;
    q.push_back({Rat(0), hs.width, hs.poly, Rat(0), hs.base.y, Rat(0), Rat(0),
                 Rat(0), 0});
    struct RPiece {
        Rat olo, ohi, land, height;
    };
    std::vector<RPiece> done;
    long used = 0;
    while (!q.empty()) {
        FStrip st = q.front();
        q.pop_front();
        if (++used > budget) throw std::runtime_error("return budget exceeded");
        const Polygon& poly = surf.polygons[st.poly];

        // split at vertex x-projections
        std::vector<Rat> cuts{st.olo, st.ohi};
        for (const auto& v : poly.v) {
            Rat o = v.x - hs.base.x - st.xoff;
            if (o > st.olo && o < st.ohi) cuts.push_back(o);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        bool split_more = false;
        for (size_t j = 0; j + 1 < cuts.size() && !split_more; ++j) {
            Rat lo = cuts[j], hi = cuts[j + 1];
            Rat om = (lo + hi) / 2;
            Rat xm = hs.base.x + st.xoff + om;
            Rat eym = st.ey0 + st.ey1 * om;
            int exit_edge = -1;
            Rat best_y;
            for (int e = 0; e < poly.n(); ++e) {
                Vec a = poly.v[e], b = poly.v[(e + 1) % poly.n()];
                if (a.x == b.x) continue;
                Rat xl = std::min(a.x, b.x), xr = std::max(a.x, b.x);
                if (!(xl < xm && xm < xr)) continue;
                Rat y = a.y + (xm - a.x) * (b.y - a.y) / (b.x - a.x);
                if (y <= eym) continue;
                if (exit_edge < 0 || y < best_y) {
                    exit_edge = e;
                    best_y = y;
                }
            }
            if (exit_edge < 0) throw std::runtime_error("pass has no exit edge");
            Vec a = poly.v[exit_edge];
            Vec ev = poly.edge(exit_edge);
            Rat es = ev.y / ev.x;
            // exit y as a function of o
            Rat xy0 = a.y + (hs.base.x + st.xoff - a.x) * es;  // at o = 0
            Rat xx1 = es;
            auto exit_y = [&](const Rat& o) { return xy0 + xx1 * o; };
            auto entry_y = [&](const Rat& o) { return st.ey0 + st.ey1 * o; };

            if (st.m >= 0 && st.poly == hs.poly) {
                // does this pass cross the section? y0 in (entry, exit],
                // x within the section window
                std::vector<Rat> extra;
                auto root = [&](const Rat& c0, const Rat& c1) {
                    if (c1 == 0) return;
                    Rat r = -c0 / c1;
                    if (r > lo && r < hi) extra.push_back(r);
                };
                root(st.ey0 - hs.base.y, st.ey1);
                root(xy0 - hs.base.y, xx1);
                Rat wlo = -st.xoff, whi = hs.width - st.xoff;
                if (wlo > lo && wlo < hi) extra.push_back(wlo);
                if (whi > lo && whi < hi) extra.push_back(whi);
                if (!extra.empty()) {
                    // re-queue this sub-range split at the roots
                    extra.push_back(lo);
                    extra.push_back(hi);
                    std::sort(extra.begin(), extra.end());
                    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
                    for (size_t k2 = 0; k2 + 1 < extra.size(); ++k2)
                        q.push_back({extra[k2], extra[k2 + 1], st.poly, st.xoff,
                                     st.ey0, st.ey1, st.h0, st.h1, st.m});
                    continue;
                }
                Rat ey = entry_y(om), xy = exit_y(om);
                bool crosses = st.m >= 1 && ey <= hs.base.y && hs.base.y < xy &&
                               om + st.xoff >= 0 && om + st.xoff < hs.width;
                if (crosses) {
                    Rat hh0 = st.h0 + (hs.base.y - st.ey0);
                    Rat hh1 = st.h1 - st.ey1;
                    if (hh1 != 0)
                        throw std::runtime_error("return height not constant");
                    done.push_back({lo, hi, lo + st.xoff, hh0});
                    continue;
                }
            }
            // continue across the exit edge
            auto [q2, f2] = surf.partner(st.poly, exit_edge);
            Vec tau = surf.polygons[q2].v[(f2 + 1) % surf.polygons[q2].n()] - a;
            q.push_back({lo, hi, q2, st.xoff + tau.x, xy0 + tau.y, xx1,
                         st.h0 + (xy0 - st.ey0), st.h1 + (xx1 - st.ey1), st.m + 1});
        }
    }

    std::sort(done.begin(), done.end(),
              [](const RPiece& a, const RPiece& b) { return a.olo < b.olo; });
    std::vector<RPiece> merged;
    for (const auto& p : done) {
        if (!merged.empty() && merged.back().ohi == p.olo &&
            merged.back().land - merged.back().olo == p.land - p.olo &&
            merged.back().height == p.height)
            merged.back().ohi = p.ohi;
        else
            merged.push_back(p);
    }
    done = merged;
    ZipperedRectangles z;
    z.section_length = hs.width;
    Rat covered = 0;
    std::vector<Rat> image_lefts;
    for (const auto& p : done) {
        if (p.olo != covered) throw std::runtime_error("return left a gap");
        z.widths.push_back(p.ohi - p.olo);
        z.heights.push_back(p.height);
        image_lefts.push_back(p.land);
        covered = p.ohi;
    }
    if (covered != hs.width) throw std::runtime_error("return left a gap");
    std::vector<int> idx(done.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a2, int b2) { return image_lefts[a2] < image_lefts[b2]; });
    std::vector<int> perm(done.size());
    for (size_t r = 0; r < idx.size(); ++r) perm[idx[r]] = static_cast<int>(r) + 1;
    z.base_map = iet::build_iet(z.widths, perm);
    return z;
}

}  // namespace teichsim::flat
