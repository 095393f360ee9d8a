#include <fstream>
#include <sstream>
#include <stdexcept>

#include "teichsim/json_io.hpp"

namespace teichsim::io {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

Rat rat_from_json(const json& j) {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(BigInt(j.get<long long>()));
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    throw std::invalid_argument("expected a rational value");
}

json rat_to_json(const Rat& r) {
    if (denominator(r) == 1 && abs_rat(r) < Rat(1) * 1000000000)
        return json(numerator(r).convert_to<long long>());
    return json(rat_to_string(r));
}

flat::FlatSurface surface_from_json(const json& j) {
    std::vector<flat::Polygon> polys;
    for (const auto& pj : j.at("polygons")) {
        flat::Polygon poly;
        for (const auto& vj : pj)
            poly.v.push_back({rat_from_json(vj.at(0)), rat_from_json(vj.at(1))});
        polys.push_back(std::move(poly));
    }
    std::vector<flat::Gluing> gluings;
    for (const auto& gj : j.at("gluings")) {
        flat::Gluing g;
        g.p = gj.at(0).get<int>();
        g.e = gj.at(1).get<int>();
        g.q = gj.at(2).get<int>();
        g.f = gj.at(3).get<int>();
        std::string kind = gj.size() > 4 ? gj.at(4).get<std::string>() : "translation";
        if (kind == "translation")
            g.kind = flat::GluingKind::Translation;
        else if (kind == "semi")
            g.kind = flat::GluingKind::Semi;
        else
            throw std::invalid_argument("unknown gluing kind: " + kind);
        gluings.push_back(g);
    }
    std::vector<flat::MarkedPoint> marked;
    if (j.contains("marked"))
        for (const auto& mj : j.at("marked"))
            marked.push_back({mj.at(0).get<int>(), mj.at(1).get<int>()});
    return flat::build_surface(polys, gluings, marked);
}

json surface_to_json(const flat::FlatSurface& s) {
    json polys = json::array();
    for (const auto& poly : s.polygons) {
        json pj = json::array();
        for (const auto& v : poly.v)
            pj.push_back({rat_to_json(v.x), rat_to_json(v.y)});
        polys.push_back(pj);
    }
    json gluings = json::array();
    for (const auto& g : s.gluings)
        gluings.push_back({g.p, g.e, g.q, g.f,
                           g.kind == flat::GluingKind::Semi ? "semi" : "translation"});
    json marked = json::array();
    for (const auto& m : s.marked) marked.push_back({m.p, m.v});
    return {{"polygons", polys},
            {"gluings", gluings},
            {"marked", marked},
            {"genus", s.genus},
            {"area", rat_to_json(s.area)}};
}

json saddles_to_json(const std::vector<flat::SaddleConnection>& conns) {
    json out = json::array();
    for (const auto& c : conns)
        out.push_back({{"h", rat_to_json(c.holonomy.x)},
                       {"v", rat_to_json(c.holonomy.y)},
                       {"length", c.length()},
                       {"endpoints", {c.start_cone, c.end_cone}}});
    return out;
}

json cylinders_to_json(const std::vector<flat::Cylinder>& cyls) {
    json out = json::array();
    for (const auto& c : cyls)
        out.push_back({{"h", rat_to_json(c.circumference.x)},
                       {"v", rat_to_json(c.circumference.y)},
                       {"height", c.height},
                       {"area", rat_to_json(c.area)},
                       {"boundary_left", saddles_to_json(c.boundary_left)},
                       {"boundary_right", saddles_to_json(c.boundary_right)}});
    return out;
}

json decomposition_to_json(const flat::VerticalDecomposition& dec) {
    json cyls = json::array();
    for (const auto& c : dec.cylinders)
        cyls.push_back({{"circumference", rat_to_json(c.circumference)},
                        {"width", rat_to_json(c.width)},
                        {"area", rat_to_json(c.area)},
                        {"boundary_left", saddles_to_json(c.boundary_left)},
                        {"boundary_right", saddles_to_json(c.boundary_right)}});
    json mins = json::array();
    for (const auto& m : dec.minimal) {
        json heights = json::array(), lengths = json::array();
        for (const auto& h : m.suspension.heights) heights.push_back(rat_to_json(h));
        for (const auto& l : m.suspension.iet.lengths) lengths.push_back(rat_to_json(l));
        mins.push_back({{"area", rat_to_json(m.area)},
                        {"cells", m.cells.size()},
                        {"suspension_lengths", lengths},
                        {"suspension_heights", heights}});
    }
    return {{"cylinders", cyls},
            {"minimal", mins},
            {"total_area", rat_to_json(dec.total_area)}};
}

iet::IntervalExchange iet_from_json(const json& j) {
    std::vector<Rat> lengths;
    for (const auto& lj : j.at("lengths")) lengths.push_back(rat_from_json(lj));
    std::vector<int> perm;
    for (const auto& pj : j.at("permutation")) perm.push_back(pj.get<int>());
    return iet::build_iet(lengths, perm);
}

json iet_to_json(const iet::IntervalExchange& t) {
    json lengths = json::array();
    for (const auto& l : t.lengths) lengths.push_back(rat_to_json(l));
    json perm = json::array();
    for (int p : t.perm) perm.push_back(p + 1);  // written 1-based
    return {{"lengths", lengths}, {"permutation", perm}};
}

json certificate_to_json(const iet::TallSectionCertificate& cert) {
    return {{"H", cert.H},
            {"l0", rat_to_json(cert.l0)},
            {"l1", rat_to_json(cert.l1)},
            {"l2", rat_to_json(cert.l2)},
            {"K", cert.K},
            {"verified_min_height", cert.verified_min_height}};
}

namespace {

json frame_to_json(const metric::TriangleFrame& f) {
    json out = {{"a", f.a}, {"b", f.b},     {"c", f.c},
                {"d", f.d}, {"rho", f.rho}, {"space", f.space},
                {"degenerate", f.degenerate}};
    if (f.points) {
        json pts = json::array();
        for (const auto& p : *f.points) pts.push_back({p[0], p[1]});
        out["points"] = pts;
    }
    return out;
}

}  // namespace

json star_report_to_json(const metric::StarReport& report) {
    json bins = json::array();
    for (const auto& b : report.bins)
        bins.push_back({{"rho_lo", b.rho_lo},
                        {"rho_hi", b.rho_hi},
                        {"sup_d_over_a", b.sup_d_over_a},
                        {"count", b.count}});
    json violations = json::array();
    for (const auto& f : report.violations) violations.push_back(frame_to_json(f));
    json out = {{"space", report.space},
                {"bound", report.bound_name},
                {"samples", report.samples},
                {"bins", bins},
                {"violations", violations}};
    if (report.sup_additive) out["sup_additive"] = *report.sup_additive;
    return out;
}

WalkRunConfig walk_run_from_json(const json& j) {
    WalkRunConfig run;
    for (const auto& gj : j.at("generators"))
        run.config.generators.push_back(
            torus::MappingClass(gj.at(0).get<long>(), gj.at(1).get<long>(),
                                gj.at(2).get<long>(), gj.at(3).get<long>()));
    for (const auto& pj : j.at("probs"))
        run.config.probabilities.push_back(pj.get<double>());
    const auto& bj = j.at("basepoint");
    run.config.basepoint = walk::Tau(bj.at("re").get<double>(),
                                     bj.at("im").get<double>());
    run.config.epsilon = j.at("epsilon").get<double>();
    run.config.steps = j.at("steps").get<long>();
    if (j.contains("seed")) run.config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paths")) run.paths = j.at("paths").get<int>();
    if (j.contains("stride")) run.stride = j.at("stride").get<long>();
    walk::validate_config(run.config);
    if (run.paths < 1) throw std::invalid_argument("paths must be positive");
    return run;
}

json walk_run_to_json(const WalkRunConfig& run) {
    json gens = json::array();
    for (const auto& g : run.config.generators)
        gens.push_back({g.a, g.b, g.c, g.d});
    return {{"generators", gens},
            {"probs", run.config.probabilities},
            {"basepoint",
             {{"re", run.config.basepoint.real()},
              {"im", run.config.basepoint.imag()}}},
            {"epsilon", run.config.epsilon},
            {"steps", run.config.steps},
            {"paths", run.paths},
            {"seed", run.config.seed},
            {"stride", run.stride}};
}

std::string stable_digest(const std::string& text) {
    // FNV-1a, hex
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

json run_manifest(const std::string& command, const json& config,
                  std::uint64_t seed, const std::vector<std::string>& outputs) {
    return {{"command", command},
            {"config_digest", stable_digest(config.dump())},
            {"seed", seed},
            {"version", "teichsim 1.0"},
            {"timing", nullptr},
            {"outputs", outputs}};
}

}  // namespace teichsim::io
