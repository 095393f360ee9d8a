#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace teichsim::torus {

/// Point of genus-1 Teichmueller space: the marked flat torus C/(Z + tau Z),
/// unit-area normalized for all length computations.
using Tau = std::complex<double>;

void require_upper(const Tau& tau);

/// Homotopy class of the (p,q) line, gcd(p,q) = 1, canonical sign
/// (q > 0, or q = 0 and p > 0).
struct CurveClass {
    long p = 1, q = 0;

    CurveClass() = default;
    CurveClass(long p_, long q_);  // canonicalizes; throws on (0,0)
    bool operator==(const CurveClass&) const = default;
};

/// Element of the genus-1 mapping class group: an integer matrix of determinant 1.
struct MappingClass {
    long a = 1, b = 0, c = 0, d = 1;

    MappingClass() = default;
    MappingClass(long a_, long b_, long c_, long d_);

    MappingClass operator*(const MappingClass& o) const;
    MappingClass inverse() const;
    static MappingClass S() { return {0, -1, 1, 0}; }
    static MappingClass T() { return {1, 1, 0, 1}; }
    bool operator==(const MappingClass&) const = default;
};

/// Extremal length of the (p,q) class at tau: |p + q tau|^2 / Im tau.
double ext_length(const Tau& tau, const CurveClass& curve);

/// Flat geodesic length on the unit-area torus (= sqrt of extremal length).
double flat_length(const Tau& tau, const CurveClass& curve);

/// Teichmueller distance, closed form: (1/2) arccosh(1 + |t1-t2|^2/(2 Im t1 Im t2)).
double teich_distance(const Tau& t1, const Tau& t2);

struct KerckhoffResult {
    double distance = 0;
    CurveClass argmax;
    bool near_boundary = false;  // argmax has |p| or |q| > bound/2
};

/// Distance via Kerckhoff's extremal-length ratio formula, the sup scanned over
/// primitive classes with |p|, |q| <= bound.
KerckhoffResult kerckhoff_distance(const Tau& t1, const Tau& t2, long bound);

/// Shortest flat length of any essential curve (unit area).
double systole(const Tau& tau);
bool in_thick(const Tau& tau, double epsilon);

Tau apply_mapping_class(const MappingClass& m, const Tau& tau);

/// Unit-speed Teichmueller geodesic. Stored as the real Moebius map sending the
/// basepoint to i and the forward endpoint to infinity, so that
/// point(t) = N^{-1}(i e^{2t}).
class TeichGeodesic {
  public:
    /// Ray from basepoint toward the boundary point xi (use infinity() for the
    /// vertical ray).
    static TeichGeodesic toward(const Tau& basepoint, double xi);
    /// Geodesic from t1 through t2 (forward direction from t1 to t2).
    static TeichGeodesic through(const Tau& t1, const Tau& t2);

    Tau point(double t) const;
    Tau basepoint() const { return base_; }
    double forward_endpoint() const { return xi_; }  // may be +infinity

    /// Adapted flat coordinates of a curve class: (h, v) with
    /// length(gamma(t)) = sqrt(e^{2t} h^2 + e^{-2t} v^2); h expands forward.
    std::array<double, 2> adapted_holonomy(const CurveClass& curve) const;

  private:
    Tau base_;
    double xi_ = 0;
    std::array<double, 4> n_{1, 0, 0, 1};  // alpha, beta, gamma, delta; det 1
};

struct FamilyEntry {
    CurveClass curve;
    double length = 0;       // flat length in the adapted structure
    double slope = 0;        // |v|/|h| in the adapted structure
    double ext_ratio = 0;    // filled by adeltabound_replay
};

/// The two moderate-curve families along a geodesic side of length c:
/// C1 at the basepoint (length < R, |v|/|h| < R), C2 in the time-c flowed
/// structure (length < R there, |h|/|v| < R there).
struct CurveFamilyReport {
    double R = 0;
    std::vector<FamilyEntry> C1, C2;
};

CurveFamilyReport curve_families(const TeichGeodesic& side, double c, double R,
                                 double epsilon = 0.05);

struct AdeltaReport {
    double a = 0, b = 0, c = 0, d = 0, rho = 0;
    Tau x, y, z, w;
    CurveFamilyReport families;
    double k5_empirical = 1;       // smallest k5 with all ratios in (k5^-1 e^-a rho, k5 e^a rho)
    double slope_ratio_min_v = 0;  // min/max over C1 u C2 of (|v|/|h|)/e^d at (w, chi)
    double slope_ratio_max_v = 0;
    double slope_ratio_min_h = 0;  // same for the transposed convention |h|/|v|
    double slope_ratio_max_h = 0;
};

/// Empirical replay of the extremal-length distortion bound on a thick triangle:
/// frames the triangle, computes ext_w/ext_x over C1 u C2, and reports the
/// measured constants. Throws if any comparison point leaves K(epsilon).
AdeltaReport adeltabound_replay(const Tau& x, const Tau& y, const Tau& z, double R,
                                double epsilon, double min_side = 0);

}  // namespace teichsim::torus
