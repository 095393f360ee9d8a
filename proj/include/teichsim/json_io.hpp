#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "teichsim/flat_surface.hpp"
#include "teichsim/iet.hpp"
#include "teichsim/metric_core.hpp"
#include "teichsim/random_walk.hpp"

namespace teichsim::io {

using nlohmann::json;

json load_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Rationals travel as "n/d" strings, plain integers, or doubles (exact dyadic).
Rat rat_from_json(const json& j);
json rat_to_json(const Rat& r);

/// {polygons: [[[x,y],...]], gluings: [[p,e,q,f,"translation"|"semi"],...],
///  marked: [[p,vertex],...]}
flat::FlatSurface surface_from_json(const json& j);
json surface_to_json(const flat::FlatSurface& s);

json saddles_to_json(const std::vector<flat::SaddleConnection>& conns);
json cylinders_to_json(const std::vector<flat::Cylinder>& cyls);
json decomposition_to_json(const flat::VerticalDecomposition& dec);

/// {lengths: [...], permutation: [1-based image order]}
iet::IntervalExchange iet_from_json(const json& j);
json iet_to_json(const iet::IntervalExchange& t);
json certificate_to_json(const iet::TallSectionCertificate& cert);

json star_report_to_json(const metric::StarReport& report);

struct WalkRunConfig {
    walk::WalkConfig config;
    int paths = 1;
    long stride = 0;  // 0: pick automatically
};

/// {generators: [[a,b,c,d],...], probs, basepoint: {re, im}, epsilon, steps,
///  paths, seed, stride?}
WalkRunConfig walk_run_from_json(const json& j);
json walk_run_to_json(const WalkRunConfig& cfg);

/// Embedded provenance block. Timing is deliberately constant so identical
/// command + config + seed produce byte-identical reports.
json run_manifest(const std::string& command, const json& config,
                  std::uint64_t seed, const std::vector<std::string>& outputs);

std::string stable_digest(const std::string& text);

}  // namespace teichsim::io
