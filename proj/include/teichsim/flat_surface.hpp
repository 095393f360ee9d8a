#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "teichsim/iet.hpp"
#include "teichsim/rational.hpp"

namespace teichsim::flat {

using teichsim::Rat;

struct Vec {
    Rat x, y;
    Vec() : x(0), y(0) {}
    Vec(Rat x_, Rat y_) : x(std::move(x_)), y(std::move(y_)) {}
    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y}; }
    Vec operator-() const { return {-x, -y}; }
    Vec operator*(const Rat& k) const { return {x * k, y * k}; }
    bool operator==(const Vec& o) const = default;
    Rat norm2() const { return x * x + y * y; }
};
Rat cross(const Vec& a, const Vec& b);
Rat dot(const Vec& a, const Vec& b);

struct Polygon {
    std::vector<Vec> v;  // CCW, simple
    int n() const { return static_cast<int>(v.size()); }
    Vec edge(int e) const { return v[(e + 1) % n()] - v[e]; }
    Rat area2() const;  // twice the signed area
};

enum class GluingKind { Translation, Semi };

struct Gluing {
    int p, e, q, f;
    GluingKind kind;
};

struct MarkedPoint {
    int p, v;
};

struct ConePoint {
    std::vector<std::pair<int, int>> corners;  // (polygon, vertex) cycle
    int angle_multiple = 0;                    // cone angle = this * pi
    bool marked = false;
    bool singular() const { return angle_multiple != 2 || marked; }
};

struct FlatSurface {
    std::vector<Polygon> polygons;
    std::vector<Gluing> gluings;
    std::vector<MarkedPoint> marked;
    // derived
    std::vector<ConePoint> cone_points;
    int genus = 0;
    Rat area = 0;
    bool has_semi = false;

    /// gluing index for edge (p,e)
    int gluing_at(int p, int e) const;
    /// the other edge of the gluing containing (p,e)
    std::pair<int, int> partner(int p, int e) const;
    int cone_index(int p, int v) const;

    std::vector<std::vector<int>> gluing_lookup;  // [poly][edge] -> gluing idx
    std::vector<std::vector<int>> cone_lookup;    // [poly][vertex] -> cone idx
};

/// Validates gluings, traces corner cycles into cone points, derives genus from
/// the angle-defect sum.
FlatSurface build_surface(const std::vector<Polygon>& polygons,
                          const std::vector<Gluing>& gluings,
                          const std::vector<MarkedPoint>& marked = {});

/// Orientation double cover: semi-translation gluings become translations
/// between a polygon and the rotated copy of its partner. Identity cover for
/// translation surfaces.
FlatSurface orientation_double_cover(const FlatSurface& s);

struct Holonomy {
    double h = 0, v = 0;
};

struct CurveSegment {
    int poly = 0;
    Vec a, b;  // endpoints in the polygon's chart
};

struct FlatCurve {
    std::vector<CurveSegment> segments;
    bool closed = true;
};

struct SaddleConnection {
    Vec holonomy;
    int start_cone = 0, end_cone = 0;
    double length() const;
};

struct Cylinder {
    Vec circumference;  // core-curve vector, canonical sign
    double height;      // transverse width
    Rat area;
    std::vector<SaddleConnection> boundary_left, boundary_right;
};

/// g_t: (h, v) -> (lambda h, v / lambda) with lambda = e^t, applied exactly
FlatSurface apply_flow_exact(const FlatSurface& s, const Rat& lambda);
FlatCurve apply_flow_exact(const FlatCurve& c, const Rat& lambda);
Holonomy apply_flow(const Holonomy& h, double t);
FlatSurface apply_flow(const FlatSurface& s, double t);
FlatCurve apply_flow(const FlatCurve& c, double t);

/// (sum |h_i|, sum |v_i|) over the curve's segments
std::pair<double, double> unsigned_holonomy(const FlatCurve& c);
double curve_length(const FlatCurve& c);

/// All oriented saddle connections between singular/marked points of length
/// at most L (with a 1e-9 relative slack on the cutoff).
std::vector<SaddleConnection> enumerate_saddle_connections(const FlatSurface& s,
                                                           double L);

/// Independent oracle for a once-marked torus given by a single parallelogram:
/// primitive lattice combinations of the two period vectors.
std::vector<SaddleConnection> torus_primitive_connections(const FlatSurface& s,
                                                          double L);

/// All maximal cylinders of circumference at most L, any direction.
std::vector<Cylinder> enumerate_cylinders(const FlatSurface& s, double L);

// --- vertical flow decomposition ---

struct SectionPiece {
    int gluing = 0;  // section interval = the x-extent of this non-vertical gluing
    Rat lo, hi;      // sub-interval in the interval's own [0, width) parameter
};

struct VerticalCylinder {
    Rat circumference;  // vertical core length
    Rat width;          // transverse width
    Rat area;
    std::vector<SectionPiece> cells;
    std::vector<SaddleConnection> boundary_left, boundary_right;
};

struct MinimalComponent {
    Rat area;
    std::vector<SectionPiece> cells;
    SectionPiece section;  // handle: the component's widest cell
    iet::Suspension suspension;  // first return of the vertical flow to section
};

struct VerticalDecomposition {
    std::vector<VerticalCylinder> cylinders;
    std::vector<MinimalComponent> minimal;
    Rat total_area;
};

VerticalDecomposition vertical_decomposition(const FlatSurface& s,
                                             long budget = 20000);

/// First return of the vertical flow to a horizontal section inside (or on the
/// lower boundary of) polygon `poly`, spanning x in [base.x, base.x + width) at
/// height base.y.
struct HorizontalSection {
    int poly = 0;
    Vec base;
    Rat width;
};

struct ZipperedRectangles {
    std::vector<Rat> widths, heights;
    Rat section_length;
    iet::IntervalExchange base_map;
};

ZipperedRectangles first_return(const FlatSurface& s, const HorizontalSection& sec,
                                long budget = 200000);

// --- curves and intersections ---

/// (p,q) line on a one-polygon torus, started at the given interior offset
FlatCurve torus_line(const FlatSurface& s, long p, long q,
                     const Vec& offset = Vec(Rat(1, 3), Rat(2, 7)));

long intersection_number(const FlatSurface& s, const FlatCurve& alpha,
                         const FlatCurve& beta);

struct ThickBoundReport {
    long i = 0;
    double bound = 0;
    bool pass = false;
};
ThickBoundReport check_thick_intersection_bound(const FlatSurface& s, double epsilon,
                                                const FlatCurve& alpha,
                                                const FlatCurve& beta);

struct SlopeBoundReport {
    long i = 0, i_C = 0, i_Z = 0, low_slope = 0;
    double k9 = 0;
    double bound = 0;
    bool pass = false;
    std::vector<long> sojourns;  // per cylinder of the vertical decomposition
};
SlopeBoundReport slope_intersection_bound(const FlatSurface& s, const FlatCurve& alpha,
                                          const FlatCurve& beta, double H, double M,
                                          double epsilon);

// --- ready-made surfaces ---
FlatSurface make_square_torus(bool marked = true);
/// unit-area torus whose vertical flow induces the rotation by 1 - shear
FlatSurface make_sheared_torus(const Rat& shear, bool marked = true);
/// three-square L surface: genus 2, one cone point of angle 6 pi
FlatSurface make_l_surface();

// --- exact ray tracing (exposed for tests) ---

/// chart placement A(z) = s z + offset with s = -1 when flipped
struct Placement {
    int poly = 0;
    bool flip = false;
    Vec offset;
    Vec map(const Vec& z) const { return flip ? offset - z : offset + z; }
    bool operator==(const Placement&) const = default;
};

struct RayHit {
    bool hit = false;
    Rat t;  // parameter along the direction vector
    int end_cone = 0;
};

/// Follow the geodesic from cone point `cone`, leaving through the wedge of
/// `corner` (an index into cone_points[cone].corners), in direction u, up to
/// parameter cap. Reports the first singular/marked point met, if any.
RayHit trace_ray(const FlatSurface& s, int cone, int corner, const Vec& u,
                 const Rat& cap, long max_steps = 100000);

}  // namespace teichsim::flat
