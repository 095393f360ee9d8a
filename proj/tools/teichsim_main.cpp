#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "teichsim/json_io.hpp"

using namespace teichsim;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    bool progress = false;
};

void emit(const GlobalOpts& g, const json& report) {
    std::string text = report.dump(2) + "\n";
    if (g.out.empty())
        std::cout << text;
    else
        io::write_text(g.out, text);
}

void progress_line(const GlobalOpts& g, const std::string& msg) {
    if (g.progress) std::cerr << msg << "\n";
}

std::vector<Rat> parse_rat_list(const std::string& s) {
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(rat_from_string(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

// "i", "2i", "1+2i", "-0.5-0.3i", "2"
std::complex<double> parse_complex(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    double re = 0, im = 0;
    size_t split = std::string::npos;
    for (size_t k = 1; k < s.size(); ++k) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
            split = k;
    }
    auto parse_part = [](std::string part, bool imaginary) {
        if (imaginary) {
            if (part.empty() || part.back() != 'i')
                throw std::invalid_argument("bad imaginary part");
            part.pop_back();
            if (part.empty() || part == "+") part = "1";
            if (part == "-") part = "-1";
        }
        return std::stod(part);
    };
    if (!s.empty() && s.back() == 'i') {
        if (split == std::string::npos) {
            im = parse_part(s, true);
        } else {
            re = std::stod(s.substr(0, split));
            im = parse_part(s.substr(split), true);
        }
    } else {
        re = std::stod(s);
    }
    return {re, im};
}

std::string format_complex(const std::complex<double>& z) {
    std::ostringstream out;
    out << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return out.str();
}

// ---- triangles ----

int cmd_triangles(const GlobalOpts& g, const std::string& space,
                  const std::string& bound_name, double k, std::size_t samples,
                  double min_side, const std::string& family,
                  const std::string& csv_path) {
    metric::StarBound bound;
    if (bound_name == "linear")
        bound = metric::StarBound::linear();
    else if (bound_name == "sqrt2t")
        bound = metric::StarBound::sqrt2t();
    else if (bound_name == "linear_k")
        bound = metric::StarBound::linear_k(k);
    else
        throw CLI::ValidationError("--bound", "unknown bound " + bound_name);

    metric::StarReport report;
    json config = {{"space", space}, {"bound", bound_name}, {"samples", samples}};
    if (!family.empty()) {
        if (family != "theta")
            throw CLI::ValidationError("--family", "unknown family " + family);
        std::vector<metric::TriangleFrame> frames;
        for (int step = 1; step <= 50; ++step)
            frames.push_back(metric::sphere_counterexample(0.03 * step));
        report = metric::check_star(frames, bound);
        config["family"] = family;
    } else {
        metric::Space sp;
        if (space == "euclidean")
            sp = metric::Space::Euclidean;
        else if (space == "hyperbolic")
            sp = metric::Space::Hyperbolic;
        else if (space == "sphere")
            sp = metric::Space::Sphere;
        else if (space == "tripod")
            sp = metric::Space::Tripod;
        else
            throw CLI::ValidationError("--space", "unknown space " + space);
        metric::SamplerConfig cfg;
        cfg.seed = g.seed;
        cfg.samples = samples;
        cfg.min_side = min_side;
        auto frames = metric::sample_frames(sp, cfg);
        report = metric::check_star(frames, bound);
    }
    json out = io::star_report_to_json(report);
    out["manifest"] = io::run_manifest("triangles", config, g.seed,
                                       g.out.empty() ? std::vector<std::string>{}
                                                     : std::vector<std::string>{g.out});
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "rho_lo,rho_hi,sup_d_over_a,count\n";
        for (const auto& b : report.bins)
            csv << b.rho_lo << "," << b.rho_hi << "," << b.sup_d_over_a << ","
                << b.count << "\n";
        io::write_text(csv_path, csv.str());
    }
    emit(g, out);
    return 0;
}

// ---- surface ----

int cmd_surface(const GlobalOpts& g, const std::string& file, bool saddles,
                bool cylinders, bool decompose, double length,
                const std::vector<std::string>& intersect, bool oracle) {
    json config = io::load_json(file);
    flat::FlatSurface s = io::surface_from_json(config);
    json out = {{"surface", {{"genus", s.genus}, {"area", io::rat_to_json(s.area)}}}};
    if (saddles) {
        auto conns = flat::enumerate_saddle_connections(s, length);
        out["saddles"] = io::saddles_to_json(conns);
        out["saddle_count"] = conns.size();
        if (oracle)
            out["oracle_count"] = flat::torus_primitive_connections(s, length).size();
    }
    if (cylinders) {
        auto cyls = flat::enumerate_cylinders(s, length);
        out["cylinders"] = io::cylinders_to_json(cyls);
        out["cylinder_count"] = cyls.size();
    }
    if (decompose) out["decomposition"] = io::decomposition_to_json(flat::vertical_decomposition(s));
    if (!intersect.empty()) {
        if (intersect.size() != 2)
            throw CLI::ValidationError("--intersect", "needs two p,q classes");
        auto pq1 = parse_int_list(intersect[0]);
        auto pq2 = parse_int_list(intersect[1]);
        if (pq1.size() != 2 || pq2.size() != 2)
            throw CLI::ValidationError("--intersect", "classes are p,q");
        auto alpha = flat::torus_line(s, pq1[0], pq1[1]);
        auto beta = flat::torus_line(s, pq2[0], pq2[1]);
        out["intersection"] = flat::intersection_number(s, alpha, beta);
    }
    out["manifest"] = io::run_manifest("surface", config, g.seed, {});
    emit(g, out);
    return 0;
}

// ---- iet ----

iet::IntervalExchange iet_from_flags(const std::string& lengths,
                                     const std::string& perm,
                                     const std::string& config_path) {
    if (!config_path.empty()) return io::iet_from_json(io::load_json(config_path));
    if (lengths == "golden") return iet::rotation(iet::golden_ratio());
    auto ls = parse_rat_list(lengths);
    std::vector<int> p;
    if (!perm.empty()) {
        p = parse_int_list(perm);
    } else {
        for (int i = static_cast<int>(ls.size()); i >= 1; --i) p.push_back(i);
    }
    return iet::build_iet(ls, p);
}

int cmd_iet_tall(const GlobalOpts& g, const std::string& lengths,
                 const std::string& perm, const std::string& config_path,
                 double H, long depth, const std::string& heights) {
    auto t = iet_from_flags(lengths, perm, config_path);
    iet::Suspension sus;
    sus.iet = t;
    if (heights.empty())
        sus.heights.assign(t.lengths.size(), Rat(1));
    else
        sus.heights = parse_rat_list(heights);
    auto cert = iet::tall_section(sus, H, depth);
    json out = {{"iet", io::iet_to_json(t)},
                {"certificate", io::certificate_to_json(cert)}};
    out["manifest"] = io::run_manifest("iet tall", io::iet_to_json(t), g.seed, {});
    emit(g, out);
    return 0;
}

int cmd_iet_keane(const GlobalOpts& g, const std::string& lengths,
                  const std::string& perm, const std::string& config_path,
                  long depth) {
    auto t = iet_from_flags(lengths, perm, config_path);
    auto res = iet::keane_check(t, depth);
    std::string status = res.status == iet::KeaneStatus::MinimalUpToDepth
                             ? "minimal-up-to-depth"
                             : res.status == iet::KeaneStatus::Periodic
                                   ? "periodic"
                                   : "inconclusive";
    json out = {{"iet", io::iet_to_json(t)},
                {"status", status},
                {"period", res.period},
                {"depth", depth}};
    out["manifest"] = io::run_manifest("iet keane", io::iet_to_json(t), g.seed, {});
    emit(g, out);
    return 0;
}

// ---- torus ----

int cmd_torus_dist(const GlobalOpts& g, const std::string& tau1,
                   const std::string& tau2, long bound, bool use_kerckhoff) {
    auto t1 = parse_complex(tau1), t2 = parse_complex(tau2);
    json out = {{"tau1", format_complex(t1)}, {"tau2", format_complex(t2)}};
    if (use_kerckhoff) {
        auto res = torus::kerckhoff_distance(t1, t2, bound);
        out["bound"] = bound;
        out["distance"] = res.distance;
        out["argmax_pq"] = {res.argmax.p, res.argmax.q};
        out["near_boundary"] = res.near_boundary;
        out["closed_form"] = torus::teich_distance(t1, t2);
    } else {
        out["distance"] = torus::teich_distance(t1, t2);
    }
    json config = {{"tau1", tau1}, {"tau2", tau2}};
    out["manifest"] = io::run_manifest("torus dist", config, g.seed, {});
    emit(g, out);
    return 0;
}

// ---- walk ----

struct PathResult {
    double rate = 0;
    std::string csv;
    int rows = 0, record_rows = 0;
    bool late_record = false;
    std::vector<double> s_early, s_late;
};

int cmd_walk_run(const GlobalOpts& g, const std::string& config_path) {
    json config = io::load_json(config_path);
    io::WalkRunConfig run = io::walk_run_from_json(config);
    if (g.seed_set) run.config.seed = g.seed;
    long steps = run.config.steps;
    long stride = run.stride > 0 ? run.stride : std::max<long>(1, steps / 200);

    std::vector<walk::SamplePath> paths(run.paths);
    std::vector<walk::CocycleTable> tables(run.paths);
    std::vector<PathResult> results(run.paths);

    auto phase1 = [&](int p) {
        paths[p] = walk::sample_path(run.config, p);
        tables[p] = walk::cocycle(paths[p]);
        results[p].rate = tables[p].a[steps] / static_cast<double>(steps);
    };
    auto parallel_for = [&](auto&& body) {
        int nthreads = std::max(1, g.threads);
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        for (int t = 0; t < nthreads; ++t)
            workers.emplace_back([&]() {
                for (int p = next++; p < run.paths; p = next++) body(p);
            });
        for (auto& w : workers) w.join();
    };
    parallel_for(phase1);
    progress_line(g, "paths sampled");

    double A_hat = 0, half1 = 0, half2 = 0;
    int half = run.paths / 2;
    for (int p = 0; p < run.paths; ++p) {
        A_hat += results[p].rate;
        (p < half ? half1 : half2) += results[p].rate;
    }
    A_hat /= run.paths;
    if (half > 0) half1 /= half;
    if (run.paths - half > 0) half2 /= run.paths - half;
    double delta = A_hat / 2;
    long record_limit = std::min<long>(steps, 4000);

    auto phase2 = [&](int p) {
        PathResult& res = results[p];
        const auto& table = tables[p];
        walk::TrackingResult track;
        bool tracked = false;
        if (A_hat > 0) {
            auto limit = walk::limit_point(paths[p]);
            if (std::isfinite(limit.xi)) {
                auto geo = torus::TeichGeodesic::toward(run.config.basepoint, limit.xi);
                try {
                    track = walk::tracking_statistic(paths[p], geo, A_hat,
                                                     run.config.epsilon, stride);
                    tracked = true;
                } catch (const std::invalid_argument&) {
                }
            }
        }
        std::ostringstream csv;
        csv << "n,a_n,s_n,chi_K,record_flag\n";
        size_t ti = 0;
        for (long n = stride; n <= steps; n += stride) {
            while (ti < track.indices.size() && track.indices[ti] < n) ++ti;
            bool has_s = tracked && ti < track.indices.size() &&
                         track.indices[ti] == n;
            int flag = 0;
            if (A_hat > 0 && n <= record_limit &&
                walk::record_at(table, A_hat, delta, n))
                flag = 1;
            csv << n << "," << table.a[n] << ",";
            if (has_s)
                csv << track.s[ti] << "," << track.chi[ti];
            else
                csv << ",";
            csv << "," << flag << "\n";
            ++res.rows;
            res.record_rows += flag;
            if (has_s) {
                if (n >= 100 && n <= 200) res.s_early.push_back(track.s[ti]);
                if (n >= steps / 2) res.s_late.push_back(track.s[ti]);
            }
        }
        if (A_hat > 0) {
            for (long n = std::min(record_limit, steps); n > 1000; --n)
                if (walk::record_at(table, A_hat, delta, n)) {
                    res.late_record = true;
                    break;
                }
        }
        res.csv = csv.str();
    };
    parallel_for(phase2);
    progress_line(g, "statistics computed");

    std::vector<double> early, late;
    long rows = 0, record_rows = 0;
    int late_paths = 0;
    for (const auto& res : results) {
        early.insert(early.end(), res.s_early.begin(), res.s_early.end());
        late.insert(late.end(), res.s_late.begin(), res.s_late.end());
        rows += res.rows;
        record_rows += res.record_rows;
        late_paths += res.late_record ? 1 : 0;
    }
    auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<std::string> outputs;
    if (!g.out.empty()) {
        for (int p = 0; p < run.paths; ++p) {
            std::string name = g.out + "/path_" + std::to_string(p) + ".csv";
            io::write_text(name, results[p].csv);
            outputs.push_back(name);
        }
    }
    double med_early = median(early), med_late = median(late);
    json summary = {
        {"A_hat", A_hat},
        {"half_split", A_hat > 0 ? std::abs(half1 - half2) / A_hat : 0.0},
        {"record_density", rows > 0 ? static_cast<double>(record_rows) / rows : 0.0},
        {"paths_with_late_record", static_cast<double>(late_paths) / run.paths},
        {"tracking_medians",
         {{"early", med_early},
          {"late", med_late},
          {"ratio", med_early > 0 ? med_late / med_early : 0.0}}},
        {"paths", run.paths},
        {"steps", steps},
        {"stride", stride}};
    summary["manifest"] =
        io::run_manifest("walk run", io::walk_run_to_json(run), run.config.seed,
                         outputs);
    if (!g.out.empty()) {
        io::write_text(g.out + "/summary.json", summary.dump(2) + "\n");
        std::cout << summary.dump(2) << "\n";
    } else {
        emit(g, summary);
    }
    return 0;
}

int cmd_walk_drift(const GlobalOpts& g, const std::string& config_path,
                   int paths_override, long steps_override) {
    json config = io::load_json(config_path);
    io::WalkRunConfig run = io::walk_run_from_json(config);
    if (g.seed_set) run.config.seed = g.seed;
    int n_paths = paths_override > 0 ? paths_override : std::max(2, run.paths);
    long steps = steps_override > 0 ? steps_override : run.config.steps;
    auto est = walk::estimate_drift(run.config, n_paths, steps);
    json out = {{"A_hat", est.A_hat},
                {"half1", est.half1},
                {"half2", est.half2},
                {"n_paths", est.n_paths},
                {"steps", est.n_used},
                {"near_zero", est.near_zero},
                {"non_elementary", walk::non_elementary(run.config.generators)}};
    out["manifest"] = io::run_manifest("walk drift", io::walk_run_to_json(run),
                                       run.config.seed, {});
    emit(g, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flat-surface and Teichmueller geometry experiments"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--out", g.out, "Output file (or directory for walk run)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Master RNG seed");
    app.add_option("--threads", g.threads, "Worker threads for batch runs");
    app.add_flag("--progress", g.progress, "Progress lines on stderr");

    auto* tri = app.add_subcommand("triangles", "Triangle comparison sampling");
    std::string space = "euclidean", bound = "linear", family, csv;
    double kval = 1.0, min_side = 0;
    std::size_t samples = 10000;
    tri->add_option("--space", space, "euclidean|hyperbolic|sphere|tripod");
    tri->add_option("--bound", bound, "linear|sqrt2t|linear_k");
    tri->add_option("--k", kval, "Slope for linear_k");
    tri->add_option("--samples", samples);
    tri->add_option("--min-side", min_side);
    tri->add_option("--family", family, "theta: the spherical failure family");
    tri->add_option("--csv", csv, "Also write the bin table as CSV");

    auto* surf = app.add_subcommand("surface", "Flat-surface computations");
    std::string surf_file;
    bool saddles = false, cylinders = false, decompose = false, oracle = false;
    double length = 1.0;
    std::vector<std::string> intersect;
    surf->add_option("file", surf_file, "Surface JSON file")->required();
    surf->add_flag("--saddles", saddles, "Enumerate saddle connections");
    surf->add_flag("--cylinders", cylinders, "Enumerate cylinders");
    surf->add_flag("--decompose", decompose, "Vertical flow decomposition");
    surf->add_flag("--oracle", oracle, "Add the torus lattice oracle count");
    surf->add_option("--length", length, "Length bound");
    surf->add_option("--intersect", intersect, "Two p,q classes")->expected(0, 2);

    auto* ietc = app.add_subcommand("iet", "Interval exchange computations");
    ietc->require_subcommand(1);
    std::string lengths = "golden", perm, iet_config, heights;
    double H = 10;
    long depth = 10000;
    auto* tall = ietc->add_subcommand("tall", "Tall-rectangle section certificate");
    tall->add_option("--lengths", lengths, "golden or comma-separated rationals");
    tall->add_option("--perm", perm, "1-based image order, comma-separated");
    tall->add_option("--config", iet_config, "IET JSON file");
    tall->add_option("--heights", heights, "Suspension heights");
    tall->add_option("--H", H, "Required rectangle height");
    tall->add_option("--depth", depth, "Keane check depth");
    auto* keane = ietc->add_subcommand("keane", "Keane minimality check");
    keane->add_option("--lengths", lengths);
    keane->add_option("--perm", perm);
    keane->add_option("--config", iet_config);
    keane->add_option("--depth", depth);

    auto* tor = app.add_subcommand("torus", "Genus-1 Teichmueller computations");
    tor->require_subcommand(1);
    std::string tau1 = "i", tau2 = "2i";
    long kbound = 50;
    auto* dist = tor->add_subcommand("dist", "Closed-form distance");
    dist->add_option("--tau1", tau1);
    dist->add_option("--tau2", tau2);
    auto* kerck = tor->add_subcommand("kerckhoff", "Kerckhoff extremal-ratio scan");
    kerck->add_option("--tau1", tau1);
    kerck->add_option("--tau2", tau2);
    kerck->add_option("--bound", kbound, "Curve-class scan bound");

    auto* wlk = app.add_subcommand("walk", "Random walk experiments");
    wlk->require_subcommand(1);
    std::string walk_config;
    int wpaths = 0;
    long wsteps = 0;
    auto* wrun = wlk->add_subcommand("run", "Full tracking study over sampled walks");
    wrun->add_option("--config", walk_config, "Walk JSON config")->required();
    auto* wdrift = wlk->add_subcommand("drift", "Drift estimate only");
    wdrift->add_option("--config", walk_config, "Walk JSON config")->required();
    wdrift->add_option("--paths", wpaths, "Override path count");
    wdrift->add_option("--steps", wsteps, "Override step count");

    // global flags may appear after the subcommand
    for (auto* sub : {tri, surf, ietc, tall, keane, tor, dist, kerck, wlk, wrun, wdrift})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (*tri)
            return cmd_triangles(g, space, bound, kval, samples, min_side, family, csv);
        if (*surf)
            return cmd_surface(g, surf_file, saddles, cylinders, decompose, length,
                               intersect, oracle);
        if (*tall) return cmd_iet_tall(g, lengths, perm, iet_config, H, depth, heights);
        if (*keane) return cmd_iet_keane(g, lengths, perm, iet_config, depth);
        if (*dist) return cmd_torus_dist(g, tau1, tau2, kbound, false);
        if (*kerck) return cmd_torus_dist(g, tau1, tau2, kbound, true);
        if (*wrun) return cmd_walk_run(g, walk_config);
        if (*wdrift) return cmd_walk_drift(g, walk_config, wpaths, wsteps);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
