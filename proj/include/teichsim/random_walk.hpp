#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teichsim/metric_core.hpp"
#include "teichsim/torus_teich.hpp"

namespace teichsim::walk {

using torus::MappingClass;
using torus::Tau;
using torus::TeichGeodesic;

struct WalkConfig {
    std::vector<MappingClass> generators;
    std::vector<double> probabilities;
    Tau basepoint{0.0, 1.0};
    double epsilon = 0.05;
    long steps = 1000;
    std::uint64_t seed = 0;
};

void validate_config(const WalkConfig& config);

/// True when some pair among products of generators up to length 4 consists of
/// hyperbolic elements with distinct fixed-point pairs.
bool non_elementary(const std::vector<MappingClass>& generators);

/// One realized walk. points holds y_0 = basepoint, y_n = w_0 w_1 ... w_{n-1} y
/// (first chosen step applied last). For long walks the double-precision points
/// degenerate toward the real axis; ops that need deep geometry recompute it
/// from the generator word in extended precision.
struct SamplePath {
    std::vector<int> omega;
    std::vector<Tau> points;
    std::vector<MappingClass> generators;
    Tau basepoint{0.0, 1.0};
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::uint64_t path_seed = 0;

    long steps() const { return static_cast<long>(omega.size()); }
    bool synthetic() const { return generators.empty(); }
};

SamplePath sample_path(const WalkConfig& config, std::uint64_t path_index = 0);

/// Path given directly by its points (no generator word); distances fall back
/// to double-precision geometry.
SamplePath make_synthetic_path(const std::vector<Tau>& points);

struct CocycleTable {
    std::vector<double> a;  // a[n] = d(y, y_n)
    SamplePath path;

    long n_max() const { return static_cast<long>(a.size()) - 1; }
    /// d(y_m, y_n), m <= n. Generator paths evaluate the window product
    /// w_m ... w_{n-1} in normalized extended precision; synthetic tables
    /// without points use the stationary convention a[n - m].
    double pair_distance(long m, long n) const;
};

CocycleTable cocycle(const SamplePath& path);

/// Table from bare a-values; pair distances follow a(n - m).
CocycleTable make_synthetic_table(const std::vector<double>& a);

struct DriftEstimate {
    double A_hat = 0;
    double half1 = 0, half2 = 0;
    long n_used = 0;
    int n_paths = 0;
    bool near_zero = false;  // A_hat indistinguishable from ln(n)/n decay
};

DriftEstimate estimate_drift(const WalkConfig& config, int n_paths, long steps);

struct RecordEntry {
    long n = 0;  // record time
    long N = 0;  // minimal N with a(n) - d(y_k, y_n) >= (A - delta) k for N <= k <= n
};

/// All record times n <= n_max of the table, with their minimal N.
std::vector<RecordEntry> detect_records(const CocycleTable& table, double A,
                                        double delta);

/// Record test for a single time n; nullopt when n is not a record.
std::optional<RecordEntry> record_at(const CocycleTable& table, double A,
                                     double delta, long n);

struct LimitEstimate {
    double xi = 0;  // may be +-infinity
    double diagnostic = 0;
    bool converged = false;
    std::string note;
};

LimitEstimate limit_point(const SamplePath& path);

struct ThinFramePair {
    long n = 0, m = 0;
    double defect = 0;       // a(n) + d(y_n, y_m) - a(m)
    double defect_ratio = 0; // defect / a(n)
    double proximity = -1;   // d(y_n, w) with w on [y, y_m] at distance a(n); -1 if no frame
    bool has_frame = false;
    metric::TriangleFrame frame;
};

/// Record pairs n < m with defect <= (2 delta / (A - delta)) a(n). Pairs whose
/// points survive in double precision also carry the packaged TriangleFrame.
std::vector<ThinFramePair> thin_frame_pairs(const SamplePath& path,
                                            const CocycleTable& table, double A,
                                            double delta,
                                            std::size_t max_pairs = 400);

struct TrackingResult {
    std::vector<long> indices;       // sampled n (stride apart)
    std::vector<double> s;           // (1/n) d(y_n, gamma(A n)) * chi_K(p_n)
    std::vector<double> s_unmasked;  // same without the chi_K factor
    std::vector<int> chi;            // chi_K(p_n) with p_n = gamma(a(n))
};

/// Sublinear tracking statistic along the geodesic from the basepoint toward the path's
/// limit. Generator paths are evaluated in exact/log arithmetic; synthetic
/// paths use double geometry. stride subsamples the (expensive) exact pipeline.
TrackingResult tracking_statistic(const SamplePath& path,
                                  const TeichGeodesic& geodesic, double A,
                                  double epsilon, long stride = 1);

/// splitmix64 step; the per-path RNG is this counter-based stream.
std::uint64_t mix64(std::uint64_t x);

}  // namespace teichsim::walk
