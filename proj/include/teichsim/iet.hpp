#pragma once

#include <optional>
#include <vector>

#include "teichsim/rational.hpp"

namespace teichsim::iet {

using teichsim::Rat;

/// Interval exchange on [0,1): subinterval i (domain order) is moved, rigidly,
/// to position perm[i] in the image order. Lengths are normalized to sum 1;
/// the pre-normalization total is kept in original_total.
struct IntervalExchange {
    std::vector<Rat> lengths;
    std::vector<int> perm;  // 0-based image positions
    Rat original_total = 1;

    int size() const { return static_cast<int>(lengths.size()); }
    Rat domain_left(int i) const;
    Rat image_left(int i) const;
    int interval_of(const Rat& x) const;  // throws outside [0,1)
    Rat apply(const Rat& x) const;
    /// interior domain breakpoints, in increasing order
    std::vector<Rat> discontinuities() const;
};

/// permutation given 1-based as in written notation, e.g. {2,1} for a rotation
IntervalExchange build_iet(const std::vector<Rat>& lengths,
                           const std::vector<int>& permutation);
IntervalExchange rotation(const Rat& alpha);

/// (sqrt(5)-1)/2 as an exact rational proxy F(n)/F(n+1); the default index gives
/// about 58 correct digits, far beyond any orbit depth used here.
Rat golden_ratio(int fib_index = 140);

struct OrbitResult {
    std::vector<Rat> points;                // n+1 entries including the start
    std::vector<int> discontinuity_hits;    // steps whose point is a breakpoint
    bool periodic = false;
    long period = 0;  // first return to the start, when periodic
};
OrbitResult orbit(const IntervalExchange& t, const Rat& x, long n);

enum class KeaneStatus { MinimalUpToDepth, Periodic, Inconclusive };
struct KeaneResult {
    KeaneStatus status = KeaneStatus::Inconclusive;
    long period = 0;
};
/// Keane's condition checked by running every discontinuity orbit to the given
/// depth. A closed discontinuity orbit reports Periodic with its period; a hit
/// on a different discontinuity reports Inconclusive.
KeaneResult keane_check(const IntervalExchange& t, long depth = 10000);

/// Zippered-rectangle data over the full section [0,1): one rectangle of the
/// given height above each subinterval.
struct Suspension {
    IntervalExchange iet;
    std::vector<Rat> heights;
    Rat area() const;
};

/// First-return system of an interval exchange on the subsection [0,l).
struct InducedReturn {
    Rat l;
    std::vector<Rat> widths;        // partition of [0,l), domain order
    std::vector<Rat> translations;  // induced map is x -> x + translations[i]
    std::vector<long> return_times;
    std::vector<Rat> flow_heights;  // filled when suspension heights are given
    IntervalExchange normalized;    // the induced exchange rescaled to [0,1)

    Rat apply(const Rat& x) const;
    Rat min_width() const;
};
InducedReturn induce(const IntervalExchange& t, const Rat& l,
                     const std::vector<Rat>* heights = nullptr,
                     long max_steps = 2000000);

struct TallSectionCertificate {
    double H = 0;
    Rat l0, l1, l2;
    long K = 0;
    double verified_min_height = 0;  // measured by flow simulation, capped at H
};

/// Shrinks the section until every rectangle of the first-return suspension is
/// at least H tall: K = ceil(H/h(1)); l0 below the first K orbit points of 0;
/// then twice below the minimal induced width. The certificate's height is
/// re-measured by direct flow simulation over sampled base points.
TallSectionCertificate tall_section(const Suspension& s, double H,
                                    long keane_depth = 10000,
                                    int verify_samples = 1000);

}  // namespace teichsim::iet
