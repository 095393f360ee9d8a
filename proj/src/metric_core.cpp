#include "teichsim/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace teichsim::metric {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<double, 3> sphere_xyz(const Point2& p) {
    double ct = std::cos(p[0]), st = std::sin(p[0]);
    return {st * std::cos(p[1]), st * std::sin(p[1]), ct};
}

Point2 sphere_angles(const std::array<double, 3>& v) {
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    double colat = std::acos(std::clamp(v[2] / n, -1.0, 1.0));
    double lon = std::atan2(v[1], v[0]);
    return {colat, lon};
}

std::complex<double> as_complex(const Point2& p) { return {p[0], p[1]}; }

void require_finite(const Point2& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
        throw std::invalid_argument("non-finite coordinate");
}

}  // namespace

std::string space_name(Space s) {
    switch (s) {
        case Space::Euclidean: return "euclidean";
        case Space::Hyperbolic: return "hyperbolic";
        case Space::Sphere: return "sphere";
        case Space::Tripod: return "tripod";
    }
    return "?";
}

double hyp_distance(std::complex<double> z1, std::complex<double> z2) {
    if (!(z1.imag() > 0) || !(z2.imag() > 0))
        throw std::invalid_argument("not in upper half-plane");
    double q = std::norm(z1 - z2) / (2.0 * z1.imag() * z2.imag());
    return std::acosh(1.0 + q);
}

double model_distance(Space s, const Point2& p, const Point2& q) {
    require_finite(p);
    require_finite(q);
    switch (s) {
        case Space::Euclidean:
            return std::hypot(p[0] - q[0], p[1] - q[1]);
        case Space::Hyperbolic:
            return hyp_distance(as_complex(p), as_complex(q));
        case Space::Sphere: {
            auto u = sphere_xyz(p), v = sphere_xyz(q);
            double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
            return std::acos(std::clamp(dot, -1.0, 1.0));
        }
        case Space::Tripod:
            throw std::invalid_argument("tripod frames are built from leg lengths");
    }
    return 0;
}

Point2 model_geodesic_point(Space s, const Point2& p, const Point2& q, double t) {
    double len = model_distance(s, p, q);
    if (len == 0) return p;
    double u = t / len;
    switch (s) {
        case Space::Euclidean:
            return {p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])};
        case Space::Sphere: {
            if (std::sin(len) < 1e-12)
                throw std::invalid_argument("antipodal points: geodesic not unique");
            auto a = sphere_xyz(p), b = sphere_xyz(q);
            double s0 = std::sin((1 - u) * len) / std::sin(len);
            double s1 = std::sin(u * len) / std::sin(len);
            return sphere_angles({s0 * a[0] + s1 * b[0], s0 * a[1] + s1 * b[1],
                                  s0 * a[2] + s1 * b[2]});
        }
        case Space::Hyperbolic: {
            auto zp = as_complex(p), zq = as_complex(q);
            if (std::abs(zp.real() - zq.real()) < 1e-14 * (1 + std::abs(zp.real()))) {
                // vertical geodesic
                double dir = zq.imag() > zp.imag() ? 1.0 : -1.0;
                return {zp.real(), zp.imag() * std::exp(dir * t)};
            }
            // circle geodesic: map its endpoints to 0 and infinity, walk the axis
            double cc = (std::norm(zp) - std::norm(zq)) / (2.0 * (zp.real() - zq.real()));
            double R = std::abs(zp - std::complex<double>(cc, 0));
            double lo = cc - R, hi = cc + R;
            auto m = [&](std::complex<double> z) { return (z - lo) / (hi - z); };
            double s0 = m(zp).imag(), s1 = m(zq).imag();
            double dir = s1 > s0 ? 1.0 : -1.0;
            std::complex<double> w(0, s0 * std::exp(dir * t));
            std::complex<double> z = (hi * w + lo) / (w + 1.0);
            return {z.real(), z.imag()};
        }
        case Space::Tripod:
            throw std::invalid_argument("tripod frames are built from leg lengths");
    }
    return p;
}

TriangleFrame frame_triangle(const Point2& x, const Point2& y, const Point2& z, Space space) {
    require_finite(x);
    require_finite(y);
    require_finite(z);
    const std::array<Point2, 3> pts = {x, y, z};
    double d01 = model_distance(space, pts[0], pts[1]);
    double d02 = model_distance(space, pts[0], pts[2]);
    double d12 = model_distance(space, pts[1], pts[2]);
    if (d01 == 0 && d02 == 0 && d12 == 0) throw std::invalid_argument("zero triangle");

    double cmax = std::max({d01, d02, d12});
    double tol = 1e-12 * cmax;

    struct Cand {
        int xi, yi, zi;
        double a, b, c;
    };
    auto pair_dist = [&](int i, int j) {
        if ((i == 0 && j == 1) || (i == 1 && j == 0)) return d01;
        if ((i == 0 && j == 2) || (i == 2 && j == 0)) return d02;
        return d12;
    };
    std::vector<Cand> cands;
    // all labelings whose long side c = d(y,z) is (tied-)maximal
    for (int xi = 0; xi < 3; ++xi) {
        int o1 = (xi + 1) % 3, o2 = (xi + 2) % 3;
        double c = pair_dist(o1, o2);
        if (c < cmax - tol) continue;
        cands.push_back({xi, o1, o2, pair_dist(xi, o1), pair_dist(xi, o2), c});
        cands.push_back({xi, o2, o1, pair_dist(xi, o2), pair_dist(xi, o1), c});
    }
    bool side_tie = false;
    {
        int long_sides = 0;
        if (d12 >= cmax - tol) ++long_sides;
        if (d02 >= cmax - tol) ++long_sides;
        if (d01 >= cmax - tol) ++long_sides;
        side_tie = long_sides > 1;
    }

    TriangleFrame best;
    bool have = false;
    for (const auto& cand : cands) {
        Point2 w = model_geodesic_point(space, pts[cand.yi], pts[cand.zi], cand.a);
        double d = model_distance(space, w, pts[cand.xi]);
        TriangleFrame f;
        f.a = cand.a;
        f.b = cand.b;
        f.c = cand.c;
        f.d = d;
        f.space = space_name(space);
        f.degenerate = cand.a == 0;
        f.rho = cand.a > 0 ? std::clamp((cand.a + cand.b - cand.c) / cand.a, 0.0, 1.0) : 0.0;
        f.points = {pts[cand.xi], pts[cand.yi], pts[cand.zi], w};
        // Orientation rule: a <= b for a unique longest side; when sides tie for
        // longest, the labeling minimizing d wins (worst-case-conservative).
        auto key = [&](const TriangleFrame& g) {
            return side_tie ? std::array<double, 2>{g.d, g.a}
                            : std::array<double, 2>{g.a > g.b ? 1.0 : 0.0, g.d};
        };
        if (!have || key(f) < key(best)) {
            best = f;
            have = true;
        }
    }
    return best;
}

double euclid_d(double a, double b, double c) {
    double slack = 1e-12 * std::max({a, b, c, 1.0});
    if (a > c + slack || b > c + slack)
        throw std::invalid_argument("c must be the longest side");
    if (a + b < c - slack || a + c < b - slack || b + c < a - slack)
        throw std::invalid_argument("triangle inequality violated");
    if (c == 0) return 0;
    double val = a * std::max(0.0, a + b - c) * std::max(0.0, c + b - a) / c;
    return std::sqrt(std::max(0.0, val));
}

TriangleFrame tripod_frame(const Rat& r, const Rat& s, const Rat& t) {
    if (r < 0 || s < 0 || t < 0) throw std::invalid_argument("negative tripod leg");
    if (r + s + t == 0) throw std::invalid_argument("zero triangle");
    if (s > r || s > t)
        throw std::invalid_argument("legs must be labeled so c = r + t is longest");
    Rat a = r + s, b = s + t, c = r + t, d = 2 * s;
    TriangleFrame f;
    f.a = to_double(a);
    f.b = to_double(b);
    f.c = to_double(c);
    f.d = to_double(d);
    f.space = "tripod";
    f.degenerate = (a == 0);
    f.rho = a > 0 ? to_double(Rat(d / a)) : 0.0;
    f.exact = {a, b, c, d};
    return f;
}

TriangleFrame sphere_counterexample(double theta) {
    if (!(theta > 0) || theta > kPi / 2 + 1e-15)
        throw std::invalid_argument("theta must lie in (0, pi/2]");
    TriangleFrame f;
    f.a = theta;
    f.b = kPi - theta;
    f.c = kPi;
    f.d = 2 * theta;
    f.rho = 0;
    f.space = "sphere";
    // x on the meridian opposite the chosen y-z geodesic; w mirrors it at the
    // same colatitude on the geodesic itself.
    f.points = {Point2{theta, kPi}, Point2{0, 0}, Point2{kPi, 0}, Point2{theta, 0}};
    return f;
}

StarReport check_star(const std::vector<TriangleFrame>& frames, const StarBound& bound,
                      std::size_t bins) {
    StarReport rep;
    rep.bound_name = bound.name;
    rep.bins.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        rep.bins[i].rho_lo = double(i) / bins;
        rep.bins[i].rho_hi = double(i + 1) / bins;
    }
    for (const auto& f : frames) {
        if (rep.space.empty())
            rep.space = f.space;
        else if (rep.space != f.space)
            throw std::invalid_argument("mixed space tags");
        ++rep.samples;
        if (f.a <= 0) continue;
        std::size_t bi = std::min<std::size_t>(std::size_t(f.rho * bins), bins - 1);
        rep.bins[bi].count++;
        rep.bins[bi].sup_d_over_a = std::max(rep.bins[bi].sup_d_over_a, f.d / f.a);
        if (f.d > f.a * bound.f(f.rho) + 1e-9 * std::max(1.0, f.a))
            rep.violations.push_back(f);
    }
    return rep;
}

StarBound StarBound::linear() {
    return {"linear", [](double t) { return t; }};
}
StarBound StarBound::sqrt2t() {
    return {"sqrt2t", [](double t) { return std::sqrt(2 * t); }};
}
StarBound StarBound::linear_k(double k) {
    return {"linear_k", [k](double t) { return k * t; }};
}

namespace {

Point2 sample_point(Space space, std::mt19937_64& rng, const SamplerConfig& cfg) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (space) {
        case Space::Euclidean: {
            double r = cfg.radius * std::sqrt(unit(rng));
            double th = 2 * kPi * unit(rng);
            return {r * std::cos(th), r * std::sin(th)};
        }
        case Space::Hyperbolic: {
            // uniform radial coordinate about i, mapped through the disk model
            double r = cfg.radius * unit(rng);
            double th = 2 * kPi * unit(rng);
            std::complex<double> w = std::polar(std::tanh(r / 2), th);
            std::complex<double> z = std::complex<double>(0, 1) * (1.0 + w) / (1.0 - w);
            return {z.real(), z.imag()};
        }
        case Space::Sphere: {
            double u = 2 * unit(rng) - 1;
            double phi = 2 * kPi * unit(rng);
            return {std::acos(std::clamp(u, -1.0, 1.0)), phi};
        }
        case Space::Tripod:
            throw std::invalid_argument("tripod sampling is handled separately");
    }
    return {0, 0};
}

TriangleFrame sample_tripod(std::mt19937_64& rng, const SamplerConfig& cfg) {
    std::uniform_int_distribution<long> num(1, long(cfg.max_leg_num));
    std::uniform_int_distribution<long> den(1, long(cfg.max_leg_den));
    std::array<Rat, 3> legs;
    for (auto& leg : legs) leg = Rat(num(rng), den(rng));
    std::sort(legs.begin(), legs.end());
    if (std::uniform_int_distribution<int>(0, 1)(rng)) std::swap(legs[1], legs[2]);
    return tripod_frame(legs[1], legs[0], legs[2]);
}

}  // namespace

std::vector<TriangleFrame> sample_frames(Space space, const SamplerConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<TriangleFrame> out;
    out.reserve(cfg.samples);
    std::size_t guard = 0;
    while (out.size() < cfg.samples) {
        if (++guard > 1000 * cfg.samples + 1000)
            throw std::runtime_error("sampler rejection rate too high");
        if (space == Space::Tripod) {
            out.push_back(sample_tripod(rng, cfg));
            continue;
        }
        Point2 p = sample_point(space, rng, cfg);
        Point2 q = sample_point(space, rng, cfg);
        Point2 r = sample_point(space, rng, cfg);
        double dpq = model_distance(space, p, q);
        double dpr = model_distance(space, p, r);
        double dqr = model_distance(space, q, r);
        if (std::min({dpq, dpr, dqr}) < cfg.min_side) continue;
        if (space == Space::Sphere && std::max({dpq, dpr, dqr}) > kPi - 1e-6) continue;
        out.push_back(frame_triangle(p, q, r, space));
    }
    return out;
}

StarReport estimate_bounding_function(Space space, const SamplerConfig& cfg, std::size_t bins) {
    if (cfg.samples == 0) throw std::invalid_argument("empty sample");
    auto frames = sample_frames(space, cfg);
    StarBound none{"empirical", [](double) { return std::numeric_limits<double>::infinity(); }};
    StarReport rep = check_star(frames, none, bins);
    if (space == Space::Hyperbolic) {
        double sup = 0;
        for (const auto& f : frames) sup = std::max(sup, f.d - f.defect());
        rep.sup_additive = sup;
    }
    return rep;
}

}  // namespace teichsim::metric
