#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "teichsim/random_walk.hpp"
#include "teichsim/rational.hpp"

namespace teichsim::walk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

using CInt = boost::multiprecision::cpp_int;
using LD = long double;
using CLD = std::complex<long double>;

// ---- splitmix64 counter-based stream ----

std::uint64_t mix64_impl(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct Rng {
    std::uint64_t state = 0;
    std::uint64_t next() { return mix64_impl(state++); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// ---- normalized matrix products with a tracked log scale ----

// Entries are kept O(1); lg holds the log of the factored-out scalar, so the
// true product is e^{lg} * {a,b,c,d}. det of the true product is 1.
struct NormMat {
    LD a = 1, b = 0, c = 0, d = 1;
    double lg = 0;

    void renorm() {
        LD m = std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
        if (m > 1e6L || m < 1e-6L) {
            a /= m;
            b /= m;
            c /= m;
            d /= m;
            lg += static_cast<double>(std::log(m));
        }
    }
    void rmul(const MappingClass& g) {
        LD ga = g.a, gb = g.b, gc = g.c, gd = g.d;
        LD na = a * ga + b * gc, nb = a * gb + b * gd;
        LD nc = c * ga + d * gc, nd = c * gb + d * gd;
        a = na;
        b = nb;
        c = nc;
        d = nd;
        renorm();
    }
    void lmul(const MappingClass& g) {
        LD ga = g.a, gb = g.b, gc = g.c, gd = g.d;
        LD na = ga * a + gb * c, nb = ga * b + gb * d;
        LD nc = gc * a + gd * c, nd = gc * b + gd * d;
        a = na;
        b = nb;
        c = nc;
        d = nd;
        renorm();
    }
};

double lse(double x, double y) {
    if (x == -kInf) return y;
    if (y == -kInf) return x;
    double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::abs(x - y)));
}

// log |e^x - e^y|; -inf when equal
double log_diff(double x, double y) {
    if (x == y) return -kInf;
    double m = std::max(x, y);
    double d = -std::abs(x - y);
    return m + std::log1p(-std::exp(d));
}

// Teichmueller distance from L = log(cosh(d_hyp) - 1), stable at both ends.
double teich_from_log_excess(double L) {
    if (L == -kInf) return 0;
    if (L < -40) return 0.5 * std::sqrt(2.0 * std::exp(L));
    if (L > 40) return 0.5 * (L + kLn2);
    return 0.5 * std::acosh(1.0 + std::exp(L));
}

// d(z, e^{lg} M z) in the Teichmueller metric.
double dist_to_image(const NormMat& m, const CLD& z) {
    CLD num = m.a * z + CLD(m.b);
    CLD den = m.c * z + CLD(m.d);
    CLD w = z * den - num;
    LD n2 = std::norm(w);
    double y = static_cast<double>(z.imag());
    if (n2 == 0) return 0;
    double L = 2 * m.lg + static_cast<double>(std::log(n2)) -
               std::log(2 * y * y);
    return teich_from_log_excess(L);
}

std::uint64_t path_seed_for(std::uint64_t master, std::uint64_t index) {
    return mix64_impl(master ^ mix64_impl(index + 0x632BE59BD9B4E019ull));
}

// ---- exact prefix products (integer 2x2) ----

double log_cppint(const CInt& x) {
    if (x == 0) return -kInf;
    CInt ax = abs(x);
    unsigned bits = boost::multiprecision::msb(ax);
    if (bits <= 512) return std::log(ax.convert_to<double>());
    unsigned k = bits - 512;
    CInt top = ax >> k;
    return std::log(top.convert_to<double>()) + k * kLn2;
}

struct ExactPrefix {
    CInt a = 1, b = 0, c = 0, d = 1;

    void rmul(const MappingClass& g) {
        CInt na = a * g.a + b * g.c, nb = a * g.b + b * g.d;
        CInt nc = c * g.a + d * g.c, nd = c * g.b + d * g.d;
        a = std::move(na);
        b = std::move(nb);
        c = std::move(nc);
        d = std::move(nd);
    }
};

}  // namespace

std::uint64_t mix64(std::uint64_t x) { return mix64_impl(x); }

void validate_config(const WalkConfig& config) {
    if (config.generators.empty())
        throw std::invalid_argument("no generators");
    if (config.generators.size() != config.probabilities.size())
        throw std::invalid_argument("probabilities do not match generators");
    double sum = 0;
    for (double p : config.probabilities) {
        if (p < 0) throw std::invalid_argument("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("probabilities must sum to 1");
    if (config.steps < 1) throw std::invalid_argument("steps must be positive");
    if (!(config.epsilon > 0))
        throw std::invalid_argument("epsilon must be positive");
    torus::require_upper(config.basepoint);
    if (!torus::in_thick(config.basepoint, config.epsilon))
        throw std::invalid_argument("basepoint outside the thick part");
}

bool non_elementary(const std::vector<MappingClass>& generators) {
    std::vector<MappingClass> alphabet;
    for (const auto& g : generators) {
        alphabet.push_back(g);
        alphabet.push_back(g.inverse());
    }
    // fixed points of a hyperbolic element on the boundary line
    auto fixed = [](const MappingClass& m) -> std::array<double, 2> {
        double tr = static_cast<double>(m.a) + m.d;
        double disc = std::sqrt(tr * tr - 4.0);
        if (m.c != 0)
            return {(m.a - m.d + disc) / (2.0 * m.c),
                    (m.a - m.d - disc) / (2.0 * m.c)};
        return {kInf, static_cast<double>(m.b) / (m.d - m.a)};
    };
    auto close = [](double x, double y) {
        if (std::isinf(x) || std::isinf(y)) return std::isinf(x) && std::isinf(y);
        return std::abs(x - y) <= 1e-9 * (1 + std::abs(x) + std::abs(y));
    };

    std::vector<MappingClass> words{MappingClass()};
    std::vector<MappingClass> hyperbolic;
    for (int len = 1; len <= 4; ++len) {
        std::vector<MappingClass> next;
        for (const auto& w : words)
            for (const auto& g : alphabet) next.push_back(w * g);
        words = std::move(next);
        for (const auto& w : words)
            if (std::labs(w.a + w.d) > 2) hyperbolic.push_back(w);
        for (size_t i = 0; i < hyperbolic.size(); ++i) {
            auto fi = fixed(hyperbolic[i]);
            for (size_t j = i + 1; j < hyperbolic.size(); ++j) {
                auto fj = fixed(hyperbolic[j]);
                bool shared = false;
                for (double x : fi)
                    for (double y : fj)
                        if (close(x, y)) shared = true;
                if (!shared) return true;
            }
        }
        if (words.size() > 5000) break;
    }
    return false;
}

SamplePath sample_path(const WalkConfig& config, std::uint64_t path_index) {
    validate_config(config);
    SamplePath path;
    path.generators = config.generators;
    path.basepoint = config.basepoint;
    path.master_seed = config.seed;
    path.path_index = path_index;
    path.path_seed = path_seed_for(config.seed, path_index);

    std::vector<double> cum(config.probabilities.size());
    std::partial_sum(config.probabilities.begin(), config.probabilities.end(),
                     cum.begin());
    cum.back() = 1.0;

    Rng rng{path.path_seed};
    CLD z(config.basepoint.real(), config.basepoint.imag());
    double logy = std::log(config.basepoint.imag());
    NormMat prefix;
    path.omega.reserve(config.steps);
    path.points.reserve(config.steps + 1);
    path.points.push_back(config.basepoint);
    for (long n = 0; n < config.steps; ++n) {
        double u = rng.uniform();
        int pick = static_cast<int>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        path.omega.push_back(pick);
        prefix.rmul(config.generators[pick]);
        CLD num = prefix.a * z + CLD(prefix.b);
        CLD den = prefix.c * z + CLD(prefix.d);
        double re = static_cast<double>((num / den).real());
        // Im through the determinant: avoids the catastrophic subtraction
        double im = std::exp(-2 * prefix.lg + logy -
                             static_cast<double>(std::log(std::norm(den))));
        path.points.push_back(Tau(re, im));
    }
    return path;
}

SamplePath make_synthetic_path(const std::vector<Tau>& points) {
    if (points.empty()) throw std::invalid_argument("empty path");
    for (const auto& p : points) torus::require_upper(p);
    SamplePath path;
    path.points = points;
    path.basepoint = points.front();
    path.omega.assign(points.size() - 1, 0);
    return path;
}

CocycleTable cocycle(const SamplePath& path) {
    CocycleTable table;
    table.path = path;
    table.a.resize(path.points.size());
    table.a[0] = 0;
    if (path.synthetic()) {
        for (size_t n = 1; n < path.points.size(); ++n)
            table.a[n] = torus::teich_distance(path.basepoint, path.points[n]);
        return table;
    }
    NormMat prefix;
    CLD z(path.basepoint.real(), path.basepoint.imag());
    for (size_t n = 1; n < path.points.size(); ++n) {
        prefix.rmul(path.generators[path.omega[n - 1]]);
        table.a[n] = dist_to_image(prefix, z);
    }
    return table;
}

CocycleTable make_synthetic_table(const std::vector<double>& a) {
    if (a.empty() || a[0] != 0)
        throw std::invalid_argument("table must start with a(0) = 0");
    CocycleTable table;
    table.a = a;
    return table;
}

double CocycleTable::pair_distance(long m, long n) const {
    if (m > n) std::swap(m, n);
    if (m < 0 || n >= static_cast<long>(a.size()))
        throw std::out_of_range("pair index outside table");
    if (m == n) return 0;
    if (!path.points.empty() && path.synthetic())
        return torus::teich_distance(path.points[m], path.points[n]);
    if (path.points.empty()) return a[n - m];  // stationary synthetic table
    NormMat window;
    for (long k = m; k < n; ++k) window.rmul(path.generators[path.omega[k]]);
    CLD z(path.basepoint.real(), path.basepoint.imag());
    return dist_to_image(window, z);
}

DriftEstimate estimate_drift(const WalkConfig& config, int n_paths, long steps) {
    validate_config(config);
    if (n_paths < 2) throw std::invalid_argument("need at least two paths");
    if (steps < 1) throw std::invalid_argument("steps must be positive");

    std::vector<double> cum(config.probabilities.size());
    std::partial_sum(config.probabilities.begin(), config.probabilities.end(),
                     cum.begin());
    cum.back() = 1.0;
    CLD z(config.basepoint.real(), config.basepoint.imag());

    std::vector<double> rates(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        Rng rng{path_seed_for(config.seed, static_cast<std::uint64_t>(p))};
        NormMat prefix;
        for (long n = 0; n < steps; ++n) {
            double u = rng.uniform();
            int pick = static_cast<int>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            prefix.rmul(config.generators[pick]);
        }
        rates[p] = dist_to_image(prefix, z) / static_cast<double>(steps);
    }
    DriftEstimate est;
    est.n_paths = n_paths;
    est.n_used = steps;
    int half = n_paths / 2;
    for (int p = 0; p < n_paths; ++p) {
        est.A_hat += rates[p];
        (p < half ? est.half1 : est.half2) += rates[p];
    }
    est.A_hat /= n_paths;
    est.half1 /= half;
    est.half2 /= n_paths - half;
    est.near_zero = est.A_hat < 5.0 * std::log(steps + 2.0) / steps;
    return est;
}

namespace {

// scan k = n down to 1; the first violation of
//   a(n) - d(y_k, y_n) >= (A - delta) k
// stops the suffix, so the minimal N is one past it
std::optional<RecordEntry> record_scan(const CocycleTable& table, double rate,
                                       long n) {
    const SamplePath& path = table.path;
    bool by_points = !path.points.empty() && path.synthetic();
    bool by_word = !path.points.empty() && !path.synthetic();
    CLD z(path.basepoint.real(), path.basepoint.imag());
    long N = 1;
    NormMat window;  // product omega_k ... omega_{n-1}, grown leftward
    for (long k = n; k >= 1; --k) {
        double d;
        if (k == n) {
            d = 0;
        } else if (by_word) {
            window.lmul(path.generators[path.omega[k]]);
            d = dist_to_image(window, z);
        } else if (by_points) {
            d = torus::teich_distance(path.points[k], path.points[n]);
        } else {
            d = table.a[n - k];
        }
        if (!(table.a[n] - d >= rate * static_cast<double>(k))) {
            if (k == n) return std::nullopt;
            N = k + 1;
            break;
        }
    }
    return RecordEntry{n, N};
}

void check_record_args(const CocycleTable& table, double A, double delta,
                       long n) {
    if (!(A > 0)) throw std::invalid_argument("drift must be positive");
    if (!(delta > 0) || delta >= A)
        throw std::invalid_argument("delta must lie in (0, drift)");
    if (n < 0 || n > table.n_max())
        throw std::out_of_range("record index outside table");
}

}  // namespace

std::optional<RecordEntry> record_at(const CocycleTable& table, double A,
                                     double delta, long n) {
    check_record_args(table, A, delta, n);
    if (n == 0) return std::nullopt;
    return record_scan(table, A - delta, n);
}

std::vector<RecordEntry> detect_records(const CocycleTable& table, double A,
                                        double delta) {
    check_record_args(table, A, delta, 0);
    std::vector<RecordEntry> out;
    for (long n = 1; n <= table.n_max(); ++n)
        if (auto r = record_scan(table, A - delta, n)) out.push_back(*r);
    return out;
}

LimitEstimate limit_point(const SamplePath& path) {
    LimitEstimate est;
    long N = path.steps();
    if (N < 2) {
        est.note = "path too short";
        return est;
    }
    double a_end;
    if (path.synthetic()) {
        a_end = torus::teich_distance(path.basepoint, path.points.back());
    } else {
        NormMat prefix;
        for (long k = 0; k < N; ++k) prefix.rmul(path.generators[path.omega[k]]);
        a_end = dist_to_image(prefix, CLD(path.basepoint.real(),
                                          path.basepoint.imag()));
    }
    double x_full = path.points.back().real();
    double x_half = path.points[N / 2].real();
    bool divergent = std::abs(x_full) > 1e8 ||
                     (std::abs(x_full) > 10 &&
                      std::abs(x_full) > 1.5 * std::abs(x_half) + 1);
    if (divergent) {
        est.xi = std::copysign(kInf, x_full);
        est.diagnostic = std::abs(1.0 / x_full - 1.0 / x_half);
    } else {
        est.xi = x_full;
        est.diagnostic = std::abs(x_full - x_half);
    }
    bool drifting = a_end / N >= 5.0 * std::log(N + 2.0) / N;
    if (!drifting) est.note = "no convergence detected";
    est.converged = drifting && est.diagnostic < 1e-3;
    return est;
}

std::vector<ThinFramePair> thin_frame_pairs(const SamplePath& path,
                                            const CocycleTable& table, double A,
                                            double delta,
                                            std::size_t max_pairs) {
    auto records = detect_records(table, A, delta);
    std::vector<ThinFramePair> out;
    if (records.size() < 2) return out;
    double factor = 2 * delta / (A - delta);

    std::size_t tested = 0, cap_tested = std::max<std::size_t>(5000, 10 * max_pairs);
    for (size_t i = 0; i < records.size() && out.size() < max_pairs; ++i) {
        for (size_t j = i + 1; j < records.size() && out.size() < max_pairs; ++j) {
            if (++tested > cap_tested) return out;
            long n = records[i].n, m = records[j].n;
            double an = table.a[n], am = table.a[m];
            double dnm = table.pair_distance(n, m);
            double defect = an + dnm - am;
            if (!(defect <= factor * an)) continue;
            ThinFramePair pair;
            pair.n = n;
            pair.m = m;
            pair.defect = defect;
            pair.defect_ratio = an > 0 ? defect / an : 0;
            // frame only while the double-precision points still resolve it
            bool framable = !path.points.empty() &&
                            m < static_cast<long>(path.points.size()) &&
                            an > 0 && an <= 14 && am <= 250 &&
                            am >= std::max(an, dnm) - 1e-9 &&
                            path.points[m].imag() > 0 &&
                            path.points[n].imag() > 0;
            if (framable) {
                Tau y = path.basepoint, yn = path.points[n], ym = path.points[m];
                auto side = TeichGeodesic::through(y, ym);
                Tau w = side.point(an);
                metric::TriangleFrame frame;
                frame.a = an;
                frame.b = dnm;
                frame.c = am;
                frame.d = torus::teich_distance(w, yn);
                frame.rho = (an + dnm - am) / an;
                frame.space = "teichmuller";
                frame.points = {{{yn.real(), yn.imag()},
                                 {y.real(), y.imag()},
                                 {ym.real(), ym.imag()},
                                 {w.real(), w.imag()}}};
                pair.frame = frame;
                pair.proximity = frame.d;
                pair.has_frame = true;
            }
            out.push_back(std::move(pair));
        }
    }
    return out;
}

namespace {

// ---- exact log-domain pipeline for the tracking statistic ----
//
// The walk degenerates toward the boundary exponentially fast, so the chart
// that sends the basepoint to i and the terminal direction to infinity is
// computed in exact integer arithmetic; only final magnitudes leave as logs.

struct ExactChart {
    CInt P, Q;          // terminal x = P/Q
    CInt X0, Y0, S;     // basepoint (X0 + i Y0)/S
    CInt Delta;         // det of the integer basepoint conjugation
    CInt D0, U02;       // D0 = X0 Q - S P, U02 = D0^2 + Y0^2 Q^2
    double lnQ = 0, lnS = 0, lnY0 = 0, lnDelta = 0, lnU02 = 0, lnc2 = 0;

    // systole candidate table: log h^2, log v^2 per curve class
    std::vector<double> lnh2, lnv2;

    void finish() {
        lnQ = log_cppint(Q);
        lnS = log_cppint(S);
        lnY0 = log_cppint(Y0);
        lnDelta = log_cppint(Delta);
        D0 = X0 * Q - S * P;
        U02 = D0 * D0 + Y0 * Y0 * Q * Q;
        lnU02 = log_cppint(U02);
        lnc2 = lnS + lnY0 + 2 * lnQ - lnU02;
    }

    void add_candidate_exact(const CInt& pc, const CInt& qc) {
        // h = -sqrt(c2) (qc Xi + pc); v = (qc - c1 (pc + qc Xi)) / sqrt(c2)
        CInt hin = qc * P + pc * Q;  // (qc Xi + pc) Q
        double lh = log_cppint(hin) - lnQ;
        lnh2.push_back(lnc2 + 2 * lh);
        // c1 = -S Q D0 / U02, so the v inner term is
        //   qc + S D0 (pc Q + qc P) / (Q U02) ... cleared: (qc Q U02 + S D0 hin)/(Q U02)
        CInt vnum = qc * Q * U02 + S * D0 * hin;
        double lv = log_cppint(vnum) - lnQ - lnU02;
        lnv2.push_back(-lnc2 + 2 * lv);
    }

    void add_candidate_tail(double lnr, double lnqk) {
        // deep continued-fraction convergents: |qc Xi + pc| = r_k / Q and the
        // c1 correction to the v term is exponentially negligible
        lnh2.push_back(lnc2 + 2 * (lnr - lnQ));
        lnv2.push_back(-lnc2 + 2 * lnqk);
    }

    void build_candidates() {
        // small classes
        for (long pc = -3; pc <= 3; ++pc)
            for (long qc = 0; qc <= 3; ++qc) {
                if (qc == 0 && pc != 1) continue;
                if (std::gcd(std::labs(pc), qc) != 1) continue;
                add_candidate_exact(CInt(pc), CInt(qc));
            }
        // convergents of -Xi = -P/Q (the vertical classes in the chart)
        CInt num = -P, den = Q;
        CInt a0q;
        if (num >= 0)
            a0q = num / den;
        else
            a0q = -CInt((-num + den - 1) / den);  // floor
        CInt r = num - a0q * den;
        CInt pk_1 = 1, qk_1 = 0;  // p_{-1}, q_{-1}
        CInt pk = a0q, qk = 1;
        CInt rem_prev = den, rem = r;
        int k = 0;
        while (rem != 0) {
            if (k < 60)
                add_candidate_exact(pk, qk);
            else
                add_candidate_tail(log_cppint(rem), log_cppint(qk));
            CInt ak = rem_prev / rem;
            CInt rem_next = rem_prev - ak * rem;
            CInt pn = ak * pk + pk_1, qn = ak * qk + qk_1;
            pk_1 = pk;
            qk_1 = qk;
            pk = std::move(pn);
            qk = std::move(qn);
            rem_prev = rem;
            rem = std::move(rem_next);
            ++k;
        }
        // terminal convergent is -Xi itself: h = 0 exactly
        lnh2.push_back(-kInf);
        lnv2.push_back(-lnc2 + 2 * log_cppint(qk));
    }

    // log systole^2 of the surface at parameter r on the chart geodesic
    double log_sys2(double r) const {
        double best = kInf;
        for (size_t k = 0; k < lnh2.size(); ++k)
            best = std::min(best, lse(2 * r + lnh2[k], -2 * r + lnv2[k]));
        return best;
    }
};

void basepoint_integers(const Tau& base, CInt* X0, CInt* Y0, CInt* S) {
    Rat xr = rat_from_double(base.real());
    Rat yr = rat_from_double(base.imag());
    CInt dx = denominator(xr), dy = denominator(yr);
    CInt g = gcd(dx, dy);
    CInt s = dx / g * dy;
    *S = s;
    *X0 = numerator(xr) * (s / dx);
    *Y0 = numerator(yr) * (s / dy);
}

TrackingResult tracking_exact(const SamplePath& path,
                              const TeichGeodesic& geodesic, double A,
                              double epsilon, long stride) {
    long N = path.steps();
    CInt X0, Y0, S;
    basepoint_integers(path.basepoint, &X0, &Y0, &S);

    // conjugate so the walk is an integer matrix acting on i:
    // M (X0 + i Y0)/S = (M B)(i) with B = [[Y0, X0], [0, S]]
    ExactPrefix full;
    for (long k = 0; k < N; ++k) full.rmul(path.generators[path.omega[k]]);
    CInt Ap = full.a * Y0, Bp = full.a * X0 + full.b * S;
    CInt Cp = full.c * Y0, Dp = full.c * X0 + full.d * S;

    ExactChart chart;
    chart.X0 = X0;
    chart.Y0 = Y0;
    chart.S = S;
    chart.Delta = Y0 * S;
    chart.P = Ap * Cp + Bp * Dp;
    chart.Q = Cp * Cp + Dp * Dp;
    chart.finish();
    chart.build_candidates();

    double xi_chart = std::exp(log_cppint(chart.P) - chart.lnQ);
    if (chart.P < 0) xi_chart = -xi_chart;
    double xi_geo = geodesic.forward_endpoint();
    if (std::isinf(xi_geo) ||
        std::abs(xi_geo - xi_chart) > 1e-2 * (1 + std::abs(xi_geo)))
        throw std::invalid_argument("geodesic does not match the path limit");

    double lnDelta = chart.lnDelta;
    double lnEps = std::log(epsilon);

    TrackingResult result;
    ExactPrefix prefix;
    long next = stride;
    for (long n = 1; n <= N; ++n) {
        prefix.rmul(path.generators[path.omega[n - 1]]);
        if (n != next && n != N) continue;
        next += stride;

        CInt ap = prefix.a * Y0, bp = prefix.a * X0 + prefix.b * S;
        CInt cp = prefix.c * Y0, dp = prefix.c * X0 + prefix.d * S;
        CInt p = ap * cp + bp * dp;
        CInt q = cp * cp + dp * dp;
        double lnq = log_cppint(q);

        // a(n) = d(basepoint, y_n), exact numerator
        CInt an_num = (p * S - q * X0) * (p * S - q * X0) +
                      (chart.Delta * S - q * Y0) * (chart.Delta * S - q * Y0);
        double La = log_cppint(an_num) -
                    (kLn2 + chart.lnY0 + lnDelta + lnq + chart.lnS);
        double r_n = teich_from_log_excess(La);

        // chart coordinates of y_n: w = (Re w, Im w) with
        //   D = p Q - q P, |U|^2 = D^2 + Delta^2 Q^2
        //   Im w = Delta q U02 / (S Y0 |U|^2)
        //   Re w = (S D0 |U|^2 - q D U02) / (S Y0 Q |U|^2)
        CInt D = p * chart.Q - q * chart.P;
        CInt U2 = D * D + chart.Delta * chart.Delta * chart.Q * chart.Q;
        CInt Rnum = chart.S * chart.D0 * U2 - q * D * chart.U02;
        double lnU2 = log_cppint(U2);
        double lnImW = lnDelta + lnq + chart.lnU02 -
                       (chart.lnS + chart.lnY0 + lnU2);
        double lnReW = log_cppint(Rnum) -
                       (chart.lnS + chart.lnY0 + chart.lnQ + lnU2);

        // distance in the chart to the geodesic point i e^{2 A n}
        double t2 = 2 * A * static_cast<double>(n);
        double L = lse(2 * lnReW, 2 * log_diff(lnImW, t2)) - kLn2 - lnImW - t2;
        double d_track = teich_from_log_excess(L);

        int chi = 0.5 * chart.log_sys2(r_n) >= lnEps ? 1 : 0;
        result.indices.push_back(n);
        result.s_unmasked.push_back(d_track / static_cast<double>(n));
        result.s.push_back(chi * d_track / static_cast<double>(n));
        result.chi.push_back(chi);
        if (n == N) break;
    }
    return result;
}

TrackingResult tracking_double(const SamplePath& path,
                               const TeichGeodesic& geodesic, double A,
                               double epsilon, long stride) {
    TrackingResult result;
    long N = path.steps();
    for (long n = stride; n <= N; n += stride) {
        double r_n = torus::teich_distance(path.basepoint, path.points[n]);
        Tau p_n = geodesic.point(r_n);
        int chi = torus::in_thick(p_n, epsilon) ? 1 : 0;
        double d_track =
            torus::teich_distance(path.points[n], geodesic.point(A * n));
        result.indices.push_back(n);
        result.s_unmasked.push_back(d_track / n);
        result.s.push_back(chi * d_track / n);
        result.chi.push_back(chi);
    }
    return result;
}

}  // namespace

TrackingResult tracking_statistic(const SamplePath& path,
                                  const TeichGeodesic& geodesic, double A,
                                  double epsilon, long stride) {
    if (!(A > 0)) throw std::invalid_argument("drift must be positive");
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    if (path.steps() < 1) throw std::invalid_argument("empty path");
    if (path.synthetic()) return tracking_double(path, geodesic, A, epsilon, stride);
    return tracking_exact(path, geodesic, A, epsilon, stride);
}

}  // namespace teichsim::walk
