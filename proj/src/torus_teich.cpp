#include "teichsim/torus_teich.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace teichsim::torus {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double ext_raw(const Tau& tau, double p, double q) {
    double re = p + q * tau.real();
    double im = q * tau.imag();
    return (re * re + im * im) / tau.imag();
}

Tau mobius(const std::array<double, 4>& m, const Tau& z) {
    return (m[0] * z + m[1]) / (m[2] * z + m[3]);
}

std::array<double, 4> compose(const std::array<double, 4>& m,
                              const std::array<double, 4>& n) {
    return {m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3]};
}

// primitive classes with flat length < R at tau, canonical sign
std::vector<CurveClass> short_curves(const Tau& tau, double R) {
    std::vector<CurveClass> out;
    double y = tau.imag(), x = tau.real();
    double sy = std::sqrt(y);
    if (1.0 / sy < R) out.push_back(CurveClass(1, 0));
    long qmax = static_cast<long>(std::floor(R / sy));
    for (long q = 1; q <= qmax; ++q) {
        double ctr = -q * x, half = R * sy;
        long plo = static_cast<long>(std::ceil(ctr - half)) - 1;
        long phi = static_cast<long>(std::floor(ctr + half)) + 1;
        for (long p = plo; p <= phi; ++p) {
            if (std::gcd(std::labs(p), q) != 1) continue;
            if (std::sqrt(ext_raw(tau, double(p), double(q))) < R)
                out.push_back(CurveClass(p, q));
        }
    }
    return out;
}
}  // namespace

void require_upper(const Tau& tau) {
    if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()) || tau.imag() <= 0)
        throw std::invalid_argument("not in upper half-plane");
}

CurveClass::CurveClass(long p_, long q_) {
    if (p_ == 0 && q_ == 0) throw std::invalid_argument("zero curve class");
    long g = std::gcd(std::labs(p_), std::labs(q_));
    p = p_ / g;
    q = q_ / g;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
}

MappingClass::MappingClass(long a_, long b_, long c_, long d_)
    : a(a_), b(b_), c(c_), d(d_) {
    if (a * d - b * c != 1) throw std::invalid_argument("determinant must be 1");
}

MappingClass MappingClass::operator*(const MappingClass& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

MappingClass MappingClass::inverse() const { return {d, -b, -c, a}; }

double ext_length(const Tau& tau, const CurveClass& curve) {
    require_upper(tau);
    return ext_raw(tau, double(curve.p), double(curve.q));
}

double flat_length(const Tau& tau, const CurveClass& curve) {
    return std::sqrt(ext_length(tau, curve));
}

double teich_distance(const Tau& t1, const Tau& t2) {
    require_upper(t1);
    require_upper(t2);
    double n = std::norm(t1 - t2);
    return 0.5 * std::acosh(1 + n / (2 * t1.imag() * t2.imag()));
}

KerckhoffResult kerckhoff_distance(const Tau& t1, const Tau& t2, long bound) {
    require_upper(t1);
    require_upper(t2);
    if (bound < 1) throw std::invalid_argument("bound must be positive");
    KerckhoffResult res;
    double best = 0;
    for (long q = 0; q <= bound; ++q) {
        for (long p = -bound; p <= bound; ++p) {
            if (p == 0 && q == 0) continue;
            if (q == 0 && p < 0) continue;
            if (std::gcd(std::labs(p), q) != 1) continue;
            double r = ext_raw(t2, double(p), double(q)) / ext_raw(t1, double(p), double(q));
            if (r > best) {
                best = r;
                res.argmax = CurveClass(p, q);
            }
        }
    }
    res.distance = 0.5 * std::log(best);
    res.near_boundary =
        std::labs(res.argmax.p) >= bound || std::labs(res.argmax.q) >= bound;
    return res;
}

double systole(const Tau& tau) {
    require_upper(tau);
    Tau t = tau;
    for (int it = 0; it < 4096; ++it) {
        t -= std::round(t.real());
        if (std::norm(t) < 1 - 1e-15)
            t = -1.0 / t;
        else
            break;
    }
    return std::min(1.0, std::abs(t)) / std::sqrt(t.imag());
}

bool in_thick(const Tau& tau, double epsilon) { return systole(tau) >= epsilon; }

Tau apply_mapping_class(const MappingClass& m, const Tau& tau) {
    require_upper(tau);
    return (double(m.a) * tau + double(m.b)) / (double(m.c) * tau + double(m.d));
}

TeichGeodesic TeichGeodesic::toward(const Tau& basepoint, double xi) {
    require_upper(basepoint);
    TeichGeodesic g;
    g.base_ = basepoint;
    g.xi_ = xi;
    if (std::isinf(xi)) {
        double s = std::sqrt(basepoint.imag());
        g.n_ = {1 / s, -basepoint.real() / s, 0, s};
    } else {
        if (!std::isfinite(xi)) throw std::invalid_argument("bad boundary point");
        std::array<double, 4> m1{0, -1, 1, -xi};  // z -> -1/(z - xi)
        Tau w0 = mobius(m1, basepoint);
        double s = std::sqrt(w0.imag());
        g.n_ = compose({1 / s, -w0.real() / s, 0, s}, m1);
    }
    return g;
}

TeichGeodesic TeichGeodesic::through(const Tau& t1, const Tau& t2) {
    require_upper(t1);
    require_upper(t2);
    double scale = std::max({1.0, std::abs(t1), std::abs(t2)});
    if (std::abs(t1 - t2) < 1e-14 * scale)
        throw std::invalid_argument("coincident endpoints");
    double x1 = t1.real(), x2 = t2.real();
    double xi;
    if (std::abs(x1 - x2) < 1e-13 * scale) {
        xi = t2.imag() > t1.imag() ? kInf : x1;
    } else {
        double cc = (std::norm(t2) - std::norm(t1)) / (2 * (x2 - x1));
        double r = std::abs(t1 - cc);
        xi = x2 > x1 ? cc + r : cc - r;
    }
    return toward(t1, xi);
}

Tau TeichGeodesic::point(double t) const {
    Tau w(0, std::exp(2 * t));
    return (n_[3] * w - n_[1]) / (-n_[2] * w + n_[0]);
}

std::array<double, 2> TeichGeodesic::adapted_holonomy(const CurveClass& curve) const {
    double p = curve.p, q = curve.q;
    // h expands under forward flow, v contracts; h^2 + v^2 = ext at the basepoint
    double h = q * n_[3] - p * n_[2];
    double v = p * n_[0] - q * n_[1];
    return {h, v};
}

CurveFamilyReport curve_families(const TeichGeodesic& side, double c, double R,
                                 double epsilon) {
    if (!(R > 0) || !(c >= 0)) throw std::invalid_argument("bad family parameters");
    CurveFamilyReport rep;
    rep.R = R;
    Tau t0 = side.basepoint();
    Tau tc = side.point(c);
    if (!in_thick(t0, epsilon) || !in_thick(tc, epsilon))
        throw std::invalid_argument("not in thick part");
    double ec = std::exp(c);
    for (const auto& g : short_curves(t0, R)) {
        auto [h, v] = side.adapted_holonomy(g);
        double slope = std::abs(v) / std::abs(h);
        if (slope < R) rep.C1.push_back({g, std::hypot(h, v), slope, 0});
    }
    for (const auto& g : short_curves(tc, R)) {
        auto [h, v] = side.adapted_holonomy(g);
        double h2 = ec * h, v2 = v / ec;
        if (std::abs(h2) / std::abs(v2) < R)
            rep.C2.push_back({g, std::hypot(h2, v2), std::abs(v2) / std::abs(h2), 0});
    }
    if (rep.C1.empty() || rep.C2.empty()) throw std::invalid_argument("empty family");
    return rep;
}

AdeltaReport adeltabound_replay(const Tau& x, const Tau& y, const Tau& z, double R,
                                double epsilon, double min_side) {
    std::array<Tau, 3> pts{x, y, z};
    double d01 = teich_distance(pts[0], pts[1]);
    double d02 = teich_distance(pts[0], pts[2]);
    double d12 = teich_distance(pts[1], pts[2]);
    if (d01 + d02 + d12 < 1e-14) throw std::invalid_argument("zero triangle");

    // apex is the point opposite the longest side
    int apex = 0;
    double longest = d12;
    if (d02 > longest) {
        longest = d02;
        apex = 1;
    }
    if (d01 > longest) {
        longest = d01;
        apex = 2;
    }
    Tau px = pts[apex], py = pts[(apex + 1) % 3], pz = pts[(apex + 2) % 3];
    if (teich_distance(px, py) > teich_distance(px, pz)) std::swap(py, pz);

    AdeltaReport rep;
    rep.a = teich_distance(px, py);
    rep.b = teich_distance(px, pz);
    rep.c = teich_distance(py, pz);
    rep.rho = rep.a > 1e-15 ? (rep.a + rep.b - rep.c) / rep.a : 0;
    if (std::min({rep.a, rep.b, rep.c}) < min_side)
        throw std::invalid_argument("side below min_side");

    auto side = TeichGeodesic::through(py, pz);
    Tau w = side.point(rep.a);
    rep.d = teich_distance(w, px);
    rep.x = px;
    rep.y = py;
    rep.z = pz;
    rep.w = w;
    for (const Tau& t : {px, py, pz, w})
        if (!in_thick(t, epsilon)) throw std::invalid_argument("not in thick part");

    rep.families = curve_families(side, rep.c, R, epsilon);

    double ea_rho = std::exp(rep.a * rep.rho);
    double k5 = 1;
    bool have_chi = rep.d > 1e-9;
    TeichGeodesic chi = have_chi ? TeichGeodesic::through(w, px)
                                 : TeichGeodesic::toward(w, kInf);
    double ed = std::exp(rep.d);
    double minv = kInf, maxv = -kInf, minh = kInf, maxh = -kInf;
    for (auto* fam : {&rep.families.C1, &rep.families.C2}) {
        for (auto& e : *fam) {
            double ratio = ext_length(w, e.curve) / ext_length(px, e.curve);
            e.ext_ratio = ratio;
            k5 = std::max({k5, ratio / ea_rho, 1 / (ratio * ea_rho)});
            if (!have_chi) continue;
            auto [h, v] = chi.adapted_holonomy(e.curve);
            double rv = (std::abs(v) / std::abs(h)) / ed;
            double rh = (std::abs(h) / std::abs(v)) / ed;
            if (std::isfinite(rv)) {
                minv = std::min(minv, rv);
                maxv = std::max(maxv, rv);
            }
            if (std::isfinite(rh)) {
                minh = std::min(minh, rh);
                maxh = std::max(maxh, rh);
            }
        }
    }
    rep.k5_empirical = k5;
    if (have_chi && maxv >= 0) {
        rep.slope_ratio_min_v = minv;
        rep.slope_ratio_max_v = maxv;
        rep.slope_ratio_min_h = minh;
        rep.slope_ratio_max_h = maxh;
    }
    return rep;
}

}  // namespace teichsim::torus
