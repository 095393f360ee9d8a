#include "teichsim/iet.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace teichsim::iet {

Rat IntervalExchange::domain_left(int i) const {
    Rat s = 0;
    for (int j = 0; j < i; ++j) s += lengths[j];
    return s;
}

Rat IntervalExchange::image_left(int i) const {
    Rat s = 0;
    for (int j = 0; j < size(); ++j)
        if (perm[j] < perm[i]) s += lengths[j];
    return s;
}

int IntervalExchange::interval_of(const Rat& x) const {
    if (x < 0 || x >= 1) throw std::invalid_argument("point outside [0,1)");
    Rat left = 0;
    for (int i = 0; i < size(); ++i) {
        if (x < left + lengths[i]) return i;
        left += lengths[i];
    }
    return size() - 1;  // unreachable for x < 1
}

Rat IntervalExchange::apply(const Rat& x) const {
    int i = interval_of(x);
    return x - domain_left(i) + image_left(i);
}

std::vector<Rat> IntervalExchange::discontinuities() const {
    std::vector<Rat> out;
    Rat left = 0;
    for (int i = 0; i + 1 < size(); ++i) {
        left += lengths[i];
        out.push_back(left);
    }
    return out;
}

IntervalExchange build_iet(const std::vector<Rat>& lengths,
                           const std::vector<int>& permutation) {
    if (lengths.empty()) throw std::invalid_argument("no intervals");
    if (permutation.size() != lengths.size())
        throw std::invalid_argument("invalid permutation");
    int k = static_cast<int>(lengths.size());
    std::vector<bool> seen(k, false);
    IntervalExchange t;
    for (int p : permutation) {
        if (p < 1 || p > k || seen[p - 1])
            throw std::invalid_argument("invalid permutation");
        seen[p - 1] = true;
        t.perm.push_back(p - 1);
    }
    Rat total = 0;
    for (const Rat& l : lengths) {
        if (l <= 0) throw std::invalid_argument("non-positive length");
        total += l;
    }
    t.original_total = total;
    for (const Rat& l : lengths) t.lengths.push_back(l / total);
    return t;
}

IntervalExchange rotation(const Rat& alpha) {
    if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("rotation needs 0 < alpha < 1");
    return build_iet({1 - alpha, alpha}, {2, 1});
}

Rat golden_ratio(int fib_index) {
    if (fib_index < 2) throw std::invalid_argument("index too small");
    boost::multiprecision::cpp_int a = 1, b = 1;
    for (int i = 2; i <= fib_index + 1; ++i) {
        boost::multiprecision::cpp_int c = a + b;
        a = b;
        b = c;
    }
    return Rat(a, b);  // F(n)/F(n+1) -> (sqrt(5)-1)/2
}

OrbitResult orbit(const IntervalExchange& t, const Rat& x, long n) {
    if (n < 0) throw std::invalid_argument("negative step count");
    auto disc = t.discontinuities();
    OrbitResult res;
    res.points.push_back(x);
    Rat y = x;
    for (long i = 1; i <= n; ++i) {
        y = t.apply(y);
        res.points.push_back(y);
        if (std::find(disc.begin(), disc.end(), y) != disc.end())
            res.discontinuity_hits.push_back(static_cast<int>(i));
        if (!res.periodic && y == x) {
            res.periodic = true;
            res.period = i;
        }
    }
    return res;
}

KeaneResult keane_check(const IntervalExchange& t, long depth) {
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    auto disc = t.discontinuities();
    KeaneResult res;
    for (const Rat& d : disc) {
        Rat y = d;
        for (long i = 1; i <= depth; ++i) {
            y = t.apply(y);
            if (y == d) {
                res.status = KeaneStatus::Periodic;
                res.period = i;
                return res;
            }
            if (std::find(disc.begin(), disc.end(), y) != disc.end()) {
                res.status = KeaneStatus::Inconclusive;
                return res;
            }
        }
    }
    res.status = KeaneStatus::MinimalUpToDepth;
    return res;
}

Rat Suspension::area() const {
    if (heights.size() != iet.lengths.size())
        throw std::invalid_argument("height count mismatch");
    Rat a = 0;
    for (size_t i = 0; i < heights.size(); ++i) {
        if (heights[i] <= 0) throw std::invalid_argument("non-positive height");
        a += iet.lengths[i] * heights[i];
    }
    return a;
}

Rat InducedReturn::apply(const Rat& x) const {
    Rat left = 0;
    for (size_t i = 0; i < widths.size(); ++i) {
        if (x < left + widths[i]) return x + translations[i];
        left += widths[i];
    }
    throw std::invalid_argument("point outside subsection");
}

Rat InducedReturn::min_width() const {
    return *std::min_element(widths.begin(), widths.end());
}

InducedReturn induce(const IntervalExchange& t, const Rat& l,
                     const std::vector<Rat>* heights, long max_steps) {
    if (l <= 0 || l > 1) throw std::invalid_argument("subsection length outside (0,1]");
    auto disc = t.discontinuities();

    struct Strip {
        Rat olo, ohi, clo, chi;  // original piece of [0,l) and its current image
        long m;
    };
    std::deque<Strip> q;
    q.push_back({0, l, 0, l, 0});
    struct Piece {
        Rat olo, ohi, shift;
        long m;
    };
    std::vector<Piece> done;
    long budget = max_steps;
    while (!q.empty()) {
        Strip s = q.front();
        q.pop_front();
        if (--budget < 0) throw std::runtime_error("induction budget exceeded");
        if (s.m >= 1 && s.clo < l) {
            if (s.chi <= l) {
                done.push_back({s.olo, s.ohi, s.clo - s.olo, s.m});
                continue;
            }
            Rat cut = s.olo + (l - s.clo);
            done.push_back({s.olo, cut, s.clo - s.olo, s.m});
            s = {cut, s.ohi, l, s.chi, s.m};
        }
        // advance one step, splitting at the exchange's breakpoints
        std::vector<Rat> cuts{s.clo};
        for (const Rat& d : disc)
            if (s.clo < d && d < s.chi) cuts.push_back(d);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(s.chi);
        for (size_t j = 0; j + 1 < cuts.size(); ++j) {
            Rat plo = cuts[j], phi = cuts[j + 1];
            Rat nlo = t.apply(plo);
            q.push_back({s.olo + (plo - s.clo), s.olo + (phi - s.clo), nlo,
                         nlo + (phi - plo), s.m + 1});
        }
    }

    std::sort(done.begin(), done.end(),
              [](const Piece& a, const Piece& b) { return a.olo < b.olo; });
    InducedReturn res;
    res.l = l;
    Rat covered = 0;
    for (const auto& p : done) {
        if (p.olo != covered) throw std::runtime_error("induction left a gap");
        res.widths.push_back(p.ohi - p.olo);
        res.translations.push_back(p.shift);
        res.return_times.push_back(p.m);
        covered = p.ohi;
    }
    if (covered != l) throw std::runtime_error("induction left a gap");

    // image order gives the induced permutation
    std::vector<int> idx(done.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return done[a].olo + done[a].shift < done[b].olo + done[b].shift;
    });
    std::vector<int> perm(done.size());
    for (size_t r = 0; r < idx.size(); ++r) perm[idx[r]] = static_cast<int>(r) + 1;
    res.normalized = build_iet(res.widths, perm);

    if (heights) {
        for (size_t i = 0; i < done.size(); ++i) {
            Rat mid = (done[i].olo + done[i].ohi) / 2;
            Rat h = 0;
            for (long j = 0; j < done[i].m; ++j) {
                h += (*heights)[t.interval_of(mid)];
                mid = t.apply(mid);
            }
            res.flow_heights.push_back(h);
        }
    }
    return res;
}

TallSectionCertificate tall_section(const Suspension& s, double H, long keane_depth,
                                    int verify_samples) {
    if (H <= 0) throw std::invalid_argument("height must be positive");
    Rat area = s.area();  // validates heights
    (void)area;
    auto keane = keane_check(s.iet, keane_depth);
    if (keane.status == KeaneStatus::Periodic)
        throw std::invalid_argument("not minimal");

    Rat h1 = *std::min_element(s.heights.begin(), s.heights.end());
    Rat hr = rat_from_double(H);
    Rat kq = hr / h1;
    long K = static_cast<long>(boost::multiprecision::numerator(kq) /
                               boost::multiprecision::denominator(kq));
    if (Rat(K) < kq) ++K;
    if (K < 1) K = 1;

    Rat y = 0, mn = 1;
    for (long i = 1; i <= K; ++i) {
        y = s.iet.apply(y);
        if (y == 0) throw std::invalid_argument("not minimal");
        mn = std::min(mn, y);
    }
    TallSectionCertificate cert;
    cert.H = H;
    cert.K = K;
    cert.l0 = mn * Rat(9, 10);
    cert.l1 = induce(s.iet, cert.l0).min_width() * Rat(9, 10);
    cert.l2 = induce(s.iet, cert.l1).min_width() * Rat(9, 10);

    // independent verification: flow up from sampled base points of [0, l2),
    // stopping once the accumulated height clears H (no return, no singularity
    // hit before that certifies the rectangle)
    double vmin = std::numeric_limits<double>::infinity();
    auto disc = s.iet.discontinuities();
    for (int j = 0; j < verify_samples; ++j) {
        Rat x = cert.l2 * Rat(2 * j + 1, 2 * static_cast<long>(verify_samples));
        Rat h = 0;
        Rat z = x;
        for (long step = 0;; ++step) {
            if (step > 10000000) throw std::runtime_error("verification budget exceeded");
            h += s.heights[s.iet.interval_of(z)];
            if (h >= hr) {
                vmin = std::min(vmin, H);
                break;
            }
            z = s.iet.apply(z);
            bool singular = std::find(disc.begin(), disc.end(), z) != disc.end();
            if (z < cert.l2 || singular) {
                vmin = std::min(vmin, to_double(h));
                break;
            }
        }
    }
    cert.verified_min_height = vmin;
    return cert;
}

}  // namespace teichsim::iet
