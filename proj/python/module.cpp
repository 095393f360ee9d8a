#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teichsim/flat_surface.hpp"
#include "teichsim/iet.hpp"
#include "teichsim/metric_core.hpp"
#include "teichsim/random_walk.hpp"
#include "teichsim/torus_teich.hpp"

namespace py = pybind11;
using namespace teichsim;

namespace {

Rat to_rat(const py::handle& h) {
    if (py::isinstance<py::str>(h)) return rat_from_string(h.cast<std::string>());
    if (py::isinstance<py::int_>(h)) return Rat(BigInt(h.cast<long long>()));
    return rat_from_double(h.cast<double>());
}

std::vector<Rat> to_rats(const py::sequence& seq) {
    std::vector<Rat> out;
    for (const auto& h : seq) out.push_back(to_rat(h));
    return out;
}

iet::IntervalExchange iet_from_py(const py::sequence& lengths,
                                  const std::vector<int>& perm) {
    return iet::build_iet(to_rats(lengths), perm);
}

}  // namespace

PYBIND11_MODULE(_teichsim, m) {
    m.doc() = "geometry of framed triangles, flat surfaces and torus walks";

    // ---- metric ----
    py::enum_<metric::Space>(m, "Space")
        .value("euclidean", metric::Space::Euclidean)
        .value("hyperbolic", metric::Space::Hyperbolic)
        .value("sphere", metric::Space::Sphere)
        .value("tripod", metric::Space::Tripod);

    py::class_<metric::TriangleFrame>(m, "TriangleFrame")
        .def_readonly("a", &metric::TriangleFrame::a)
        .def_readonly("b", &metric::TriangleFrame::b)
        .def_readonly("c", &metric::TriangleFrame::c)
        .def_readonly("d", &metric::TriangleFrame::d)
        .def_readonly("rho", &metric::TriangleFrame::rho)
        .def_readonly("space", &metric::TriangleFrame::space)
        .def_readonly("degenerate", &metric::TriangleFrame::degenerate)
        .def("defect", &metric::TriangleFrame::defect);

    m.def("frame_triangle", &metric::frame_triangle, py::arg("x"), py::arg("y"),
          py::arg("z"), py::arg("space"));
    m.def("model_distance", &metric::model_distance);
    m.def("euclid_d", &metric::euclid_d);
    m.def("sphere_counterexample", &metric::sphere_counterexample);
    m.def(
        "sample_frames",
        [](metric::Space space, std::uint64_t seed, std::size_t samples,
           double min_side) {
            metric::SamplerConfig cfg;
            cfg.seed = seed;
            cfg.samples = samples;
            cfg.min_side = min_side;
            return metric::sample_frames(space, cfg);
        },
        py::arg("space"), py::arg("seed") = 0, py::arg("samples") = 10000,
        py::arg("min_side") = 0.0);

    // ---- torus ----
    py::class_<torus::MappingClass>(m, "MappingClass")
        .def(py::init<long, long, long, long>())
        .def_readonly("a", &torus::MappingClass::a)
        .def_readonly("b", &torus::MappingClass::b)
        .def_readonly("c", &torus::MappingClass::c)
        .def_readonly("d", &torus::MappingClass::d)
        .def("__mul__", &torus::MappingClass::operator*)
        .def("inverse", &torus::MappingClass::inverse)
        .def_static("S", &torus::MappingClass::S)
        .def_static("T", &torus::MappingClass::T);

    m.def("teich_distance", &torus::teich_distance);
    m.def("systole", &torus::systole);
    m.def("in_thick", &torus::in_thick);
    m.def("apply_mapping_class", &torus::apply_mapping_class);
    m.def(
        "kerckhoff_distance",
        [](const torus::Tau& t1, const torus::Tau& t2, long bound) {
            auto r = torus::kerckhoff_distance(t1, t2, bound);
            return py::make_tuple(r.distance, r.argmax.p, r.argmax.q);
        },
        py::arg("t1"), py::arg("t2"), py::arg("bound") = 50);
    m.def(
        "ext_length",
        [](const torus::Tau& tau, long p, long q) {
            return torus::ext_length(tau, torus::CurveClass(p, q));
        },
        py::arg("tau"), py::arg("p"), py::arg("q"));

    // ---- iet ----
    py::class_<iet::TallSectionCertificate>(m, "TallSectionCertificate")
        .def_readonly("H", &iet::TallSectionCertificate::H)
        .def_readonly("K", &iet::TallSectionCertificate::K)
        .def_readonly("verified_min_height",
                      &iet::TallSectionCertificate::verified_min_height)
        .def_property_readonly("l0", [](const iet::TallSectionCertificate& c) {
            return rat_to_string(c.l0);
        });

    m.def("golden_ratio", []() { return rat_to_string(iet::golden_ratio()); });
    m.def(
        "keane_check",
        [](const py::sequence& lengths, const std::vector<int>& perm, long depth) {
            auto r = iet::keane_check(iet_from_py(lengths, perm), depth);
            switch (r.status) {
                case iet::KeaneStatus::MinimalUpToDepth: return std::string("minimal");
                case iet::KeaneStatus::Periodic: return std::string("periodic");
                default: return std::string("inconclusive");
            }
        },
        py::arg("lengths"), py::arg("permutation"), py::arg("depth") = 10000);
    m.def(
        "tall_section",
        [](const py::sequence& lengths, const std::vector<int>& perm, double H) {
            iet::Suspension s;
            s.iet = iet_from_py(lengths, perm);
            s.heights.assign(s.iet.size(), Rat(1));
            return iet::tall_section(s, H);
        },
        py::arg("lengths"), py::arg("permutation"), py::arg("H"));
    m.def(
        "iet_orbit",
        [](const py::sequence& lengths, const std::vector<int>& perm,
           const py::handle& x, long n) {
            auto t = iet_from_py(lengths, perm);
            auto r = iet::orbit(t, to_rat(x), n);
            std::vector<std::string> points;
            for (const auto& p : r.points) points.push_back(rat_to_string(p));
            return py::make_tuple(points, r.periodic, r.period);
        },
        py::arg("lengths"), py::arg("permutation"), py::arg("x"), py::arg("n"));

    // ---- flat surfaces ----
    m.def(
        "square_torus_saddle_count",
        [](double L) {
            auto s = flat::make_square_torus();
            return flat::enumerate_saddle_connections(s, L).size();
        },
        py::arg("L"));
    m.def(
        "square_torus_intersection",
        [](long p, long q, long pp, long qq) {
            auto s = flat::make_square_torus();
            auto alpha = flat::torus_line(s, p, q);
            auto beta = flat::torus_line(s, pp, qq, flat::Vec(Rat(5, 13), Rat(3, 8)));
            return flat::intersection_number(s, alpha, beta);
        },
        py::arg("p"), py::arg("q"), py::arg("p2"), py::arg("q2"));

    // ---- random walk ----
    py::class_<walk::WalkConfig>(m, "WalkConfig")
        .def(py::init<>())
        .def_readwrite("generators", &walk::WalkConfig::generators)
        .def_readwrite("probabilities", &walk::WalkConfig::probabilities)
        .def_readwrite("basepoint", &walk::WalkConfig::basepoint)
        .def_readwrite("epsilon", &walk::WalkConfig::epsilon)
        .def_readwrite("steps", &walk::WalkConfig::steps)
        .def_readwrite("seed", &walk::WalkConfig::seed);

    py::class_<walk::DriftEstimate>(m, "DriftEstimate")
        .def_readonly("A_hat", &walk::DriftEstimate::A_hat)
        .def_readonly("half1", &walk::DriftEstimate::half1)
        .def_readonly("half2", &walk::DriftEstimate::half2)
        .def_readonly("near_zero", &walk::DriftEstimate::near_zero);

    m.def("non_elementary", &walk::non_elementary);
    m.def("estimate_drift", &walk::estimate_drift, py::arg("config"),
          py::arg("n_paths"), py::arg("steps"));
    m.def(
        "cocycle",
        [](const walk::WalkConfig& config, std::uint64_t path_index) {
            return walk::cocycle(walk::sample_path(config, path_index)).a;
        },
        py::arg("config"), py::arg("path_index") = 0);
    m.def(
        "detect_records",
        [](const std::vector<double>& a, double A, double delta) {
            auto records = walk::detect_records(walk::make_synthetic_table(a), A, delta);
            std::vector<std::pair<long, long>> out;
            for (const auto& r : records) out.emplace_back(r.n, r.N);
            return out;
        },
        py::arg("a"), py::arg("A"), py::arg("delta"));
}
