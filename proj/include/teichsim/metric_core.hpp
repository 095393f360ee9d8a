#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teichsim/rational.hpp"

namespace teichsim::metric {

/// The comparison quadruple of a framed triangle: sidelengths a = d(x,y) = d(w,y),
/// b = d(x,z), c = d(y,z) with c the longest side, and d = d(w,x) where w sits on
/// the geodesic from y to z at distance a from y.
struct TriangleFrame {
    double a = 0, b = 0, c = 0, d = 0;
    double rho = 0;  // (a+b-c)/a, defined as 0 (degenerate) when a == 0
    std::string space;
    bool degenerate = false;
    /// Exact values (a,b,c,d) for frames built with rational arithmetic (tripods).
    std::optional<std::array<Rat, 4>> exact;
    /// Concrete coordinates of x, y, z, w when the model space has them.
    std::optional<std::array<std::array<double, 2>, 4>> points;

    double defect() const { return a + b - c; }
};

/// Named bounding function f(rho) for the thin-framed-triangles test.
struct StarBound {
    std::string name;
    std::function<double(double)> f;

    static StarBound linear();           // f(t) = t
    static StarBound sqrt2t();           // f(t) = sqrt(2 t)
    static StarBound linear_k(double k); // f(t) = k t
};

struct StarBin {
    double rho_lo = 0, rho_hi = 0;
    double sup_d_over_a = 0;
    std::size_t count = 0;
};

struct StarReport {
    std::string space;
    std::string bound_name;
    std::size_t samples = 0;
    std::vector<StarBin> bins;
    std::vector<TriangleFrame> violations;
    /// For hyperbolic samples: sup of d - (a+b-c) over the sample (the additive
    /// constant of the large-scale linear bound).
    std::optional<double> sup_additive;
};

enum class Space { Euclidean, Hyperbolic, Sphere, Tripod };

std::string space_name(Space s);

using Point2 = std::array<double, 2>;

/// Distance in the model space. Euclidean points are (x,y); hyperbolic points are
/// (re,im) with im > 0; sphere points are (colatitude, longitude) on the unit sphere.
double model_distance(Space s, const Point2& p, const Point2& q);

/// Point on the geodesic from p to q at distance t from p (0 <= t <= d(p,q)).
Point2 model_geodesic_point(Space s, const Point2& p, const Point2& q, double t);

/// Builds the comparison frame for the triangle on points x, y, z. Relabels so
/// that c is the longest side and a <= b; among labelings tied on that rule the
/// one minimizing d wins.
TriangleFrame frame_triangle(const Point2& x, const Point2& y, const Point2& z, Space space);

/// Closed form for d in the Euclidean plane from sidelengths alone:
/// d^2 = a (a+b-c)(c+b-a) / c.
double euclid_d(double a, double b, double c);

/// Curvature -1 distance on the upper half-plane.
double hyp_distance(std::complex<double> z1, std::complex<double> z2);

/// Exact tripod frame from leg lengths r (to y), s (to x), t (to z):
/// a = r+s, b = s+t, c = r+t, d = 2s, with legs labeled so c is longest.
TriangleFrame tripod_frame(const Rat& r, const Rat& s, const Rat& t);

/// The spherical family certifying that (*) fails: y and z antipodal, x at
/// colatitude theta on the meridian opposite the chosen y-z geodesic.
/// Yields (a,b,c) = (theta, pi-theta, pi), rho = 0, d = 2 theta.
TriangleFrame sphere_counterexample(double theta);

/// Tests every frame against d <= a f(rho), collecting violations and per-bin
/// sups of d/a. All frames must share one space tag.
StarReport check_star(const std::vector<TriangleFrame>& frames, const StarBound& bound,
                      std::size_t bins = 20);

struct SamplerConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 10000;
    double min_side = 0;      // resample until all three sides >= min_side
    double radius = 30;       // disk radius (Euclidean) / radial cutoff (hyperbolic)
    std::size_t max_leg_num = 1000, max_leg_den = 100;  // tripod rational legs
};

std::vector<TriangleFrame> sample_frames(Space space, const SamplerConfig& cfg);

/// Empirical bounding function: per-bin sup of d/a over a random sample.
/// For hyperbolic samples, also reports sup of d - (a+b-c).
StarReport estimate_bounding_function(Space space, const SamplerConfig& cfg,
                                      std::size_t bins = 20);

}  // namespace teichsim::metric
