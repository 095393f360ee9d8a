#pragma once

#include "teichsim/flat_surface.hpp"

namespace teichsim::flat::detail {

/// placement of the partner polygon so that the two charts agree on the
/// shared edge
Placement placement_across(const FlatSurface& s, const Placement& a, int e);

/// is direction u inside the CCW sector [a, b), angles in (0, 2 pi)
bool in_sector(const Vec& a, const Vec& b, const Vec& u);

Vec linear_part(const Placement& a, const Vec& v);

/// squared distance from the origin to the placed polygon
Rat placed_min_dist2(const FlatSurface& s, const Placement& a);

// --- vertical section across all non-vertical gluings ---

/// one non-vertical gluing, parametrized by x in the chart of the polygon
/// whose interior lies above the edge
struct SInterval {
    int gluing = 0;
    int upoly = 0, uedge = 0;
    Rat x0, w;          // chart x range [x0, x0 + w)
    Rat ya, yslope;     // edge line y = ya + yslope * (x - x0)
    Rat y_at(const Rat& x) const;
};

/// one strip of a pass through the upper polygon: constant exit edge,
/// affine height
struct PassPiece {
    Rat lo, hi;          // in the source interval's [0, w) parameter
    int to_interval = 0;
    Rat shift;           // arrival parameter = s + shift
    Rat h0, h1;          // pass height = h0 + h1 * s
    int exit_edge = 0;
};

struct Section {
    std::vector<SInterval> intervals;
    std::vector<std::vector<PassPiece>> pieces;
};

Section build_section(const FlatSurface& s);
const PassPiece& piece_at(const Section& sec, int iv, const Rat& s);

}  // namespace teichsim::flat::detail
