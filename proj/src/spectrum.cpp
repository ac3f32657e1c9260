#include "sfib/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sfib/errors.hpp"
#include "sfib/parallel.hpp"
#include "sfib/transfer.hpp"

namespace sfib {

std::string to_string(BandSetKind kind) {
    switch (kind) {
        case BandSetKind::SigmaK:
            return "sigma";
        case BandSetKind::CoverK:
            return "cover";
        case BandSetKind::Window:
            return "window";
    }
    return "unknown";
}

namespace {

BandSetKind kind_from_string(const std::string& s) {
    if (s == "sigma") return BandSetKind::SigmaK;
    if (s == "cover") return BandSetKind::CoverK;
    if (s == "window") return BandSetKind::Window;
    throw std::invalid_argument("unknown band set kind: " + s);
}

// First band whose upper edge is >= energy.
std::vector<Band>::const_iterator first_reaching(const std::vector<Band>& bands, double energy) {
    return std::lower_bound(bands.begin(), bands.end(), energy,
                            [](const Band& b, double e) { return b.hi < e; });
}

}  // namespace

bool BandSet::contains(double energy, double slack) const {
    auto it = first_reaching(bands, energy - slack);
    return it != bands.end() && it->lo - slack <= energy;
}

double BandSet::distance(double energy) const {
    if (bands.empty()) return std::numeric_limits<double>::infinity();
    auto it = first_reaching(bands, energy);
    double best = std::numeric_limits<double>::infinity();
    if (it != bands.end()) best = std::max(0.0, it->lo - energy);
    if (it != bands.begin()) best = std::min(best, energy - std::prev(it)->hi);
    return best;
}

double BandSet::smallest_width() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& b : bands) w = std::min(w, b.length());
    return w;
}

double default_band_tolerance(int k) { return k <= 14 ? 1e-10 : 1e-8; }

int generation_for_period(int ell, std::uint64_t min_period) {
    if (ell < 1) throw std::invalid_argument("generation_for_period: ell must be >= 1");
    int k = 0;
    while (fibonacci(k) * static_cast<std::uint64_t>(ell) < min_period) ++k;
    return k;
}

std::pair<double, double> search_window(const ModelParams& params) {
    return {-3.0, params.lambda + 3.0};
}

namespace detail {

EdgeCounter::EdgeCounter(int k, const ModelParams& params)
    : k_(k), params_(params), potential_(sieve(params, renormalization_word(k))) {}

int EdgeCounter::count(double energy) const {
    // Eigenvalues below `energy` of the period with its last site removed
    // (Dirichlet problem): exactly one lies in the closure of every gap.
    const int p = period();
    int dirichlet = 0;
    if (p > 1) {
        constexpr double pivmin = std::numeric_limits<double>::min();
        double d = potential_[0] - energy;
        if (std::abs(d) < pivmin) d = -pivmin;
        dirichlet += d < 0.0;
        for (int i = 1; i < p - 1; ++i) {
            d = potential_[static_cast<std::size_t>(i)] - energy - 1.0 / d;
            if (std::abs(d) < pivmin) d = -pivmin;
            dirichlet += d < 0.0;
        }
    }
    const auto xs = half_traces_log(energy, params_, std::max(k_, 1));
    const SignedLog xk = xs[static_cast<std::size_t>(k_ + 1)];
    if (xk.sign == 0 || xk.log_abs <= 0.0) {
        // inside band number dirichlet + 1
        return 2 * dirichlet + 1;
    }
    // In gap g (g bands below), sign(x_k) = (-1)^(p - g) and g is dirichlet or dirichlet + 1.
    const int parity = xk.sign > 0 ? p % 2 : (p + 1) % 2;
    const int gap = (dirichlet % 2 == parity) ? dirichlet : dirichlet + 1;
    return 2 * gap;
}

}  // namespace detail

namespace {

using Bracket = std::pair<double, double>;

void isolate(const detail::EdgeCounter& counter, double a, double b, int ca, int cb, double tol,
             std::vector<Bracket>& brackets) {
    if (ca >= cb) return;
    const double mid = a + 0.5 * (b - a);
    if (b - a <= tol || !(mid > a && mid < b)) {
        for (int m = ca + 1; m <= cb; ++m) brackets[static_cast<std::size_t>(m)] = {a, b};
        return;
    }
    const int cm = std::clamp(counter.count(mid), ca, cb);
    isolate(counter, a, mid, ca, cm, tol, brackets);
    isolate(counter, mid, b, cm, cb, tol, brackets);
}

// Smallest |x_k| - 1 inside a gap that is accepted as a real sign change.
// Near a closed gap (double root of x_k -+ 1) rounding alone can lift |x_k|
// above 1 by a few ulps over a short stretch.
constexpr double kGapExcess = 1e-9;

bool gap_certified(double lo, double hi, int k, const ModelParams& params) {
    const double threshold = std::log1p(kGapExcess);
    for (double t : {0.25, 0.5, 0.75}) {
        const double e = lo + t * (hi - lo);
        const auto xs = half_traces_log(e, params, std::max(k, 1));
        if (xs[static_cast<std::size_t>(k + 1)].log_abs > threshold) return true;
    }
    return false;
}

// Passes when ||x_k(E)| - 1| <= |x_k'(E)| tol + 1e-12.
bool edge_certified(double energy, int k, const ModelParams& params, double tol) {
    const auto jet = half_trace_derivatives(energy, params, std::max(k, 1), 1e150);
    if (jet.run.last_k() < k) return false;
    const double x = jet.run.x(k);
    const double dx = jet.dx(k);
    return std::abs(std::abs(x) - 1.0) <= std::abs(dx) * tol + 1e-12;
}

// Certifies the outer point of an edge bracket, tightening the bracket by
// count bisection when the first check fails. `lower` selects the left end.
double certify_edge(const detail::EdgeCounter& counter, Bracket br, int edge_index, bool lower,
                    int k, const ModelParams& params, double tol) {
    double a = br.first;
    double b = br.second;
    double e = lower ? a : b;
    if (edge_certified(e, k, params, tol)) return e;
    for (int it = 0; it < 80; ++it) {
        const double mid = a + 0.5 * (b - a);
        if (!(mid > a && mid < b)) break;
        if (counter.count(mid) >= edge_index)
            b = mid;
        else
            a = mid;
        e = lower ? a : b;
        if (edge_certified(e, k, params, tol)) return e;
    }
    throw UnresolvedEdge(a, b,
                         "sigma_k_bands: edge " + std::to_string(edge_index) + " of Sigma_" +
                             std::to_string(k) + " not certified in [" + format_real(a) + ", " +
                             format_real(b) + "]");
}

void check_generation(int k, const ModelParams& params, double tol) {
    validate(params);
    if (k < 0) throw std::invalid_argument("sigma_k_bands: k must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("sigma_k_bands: tol must be > 0");
    const std::uint64_t period = fibonacci(k) * static_cast<std::uint64_t>(params.ell);
    if (period > kMaxPeriod) {
        throw ResourceLimit("sigma_k_bands: period " + std::to_string(period) +
                            " exceeds the limit " + std::to_string(kMaxPeriod));
    }
}

// Bands of Sigma_k meeting [lo, hi]. Bands cut by the window end at lo or hi;
// those ends are not certified.
std::vector<Band> bands_between(const detail::EdgeCounter& counter, int k,
                                const ModelParams& params, double lo, double hi, double tol,
                                int workers, bool whole) {
    const int total = 2 * counter.period();

    // Fixed chunking keeps the work decomposition independent of `workers`.
    constexpr int kChunks = 64;
    std::vector<double> cuts(kChunks + 1);
    for (int i = 0; i <= kChunks; ++i) cuts[i] = lo + (hi - lo) * i / kChunks;
    cuts[kChunks] = hi;
    std::vector<int> counts(kChunks + 1);
    parallel_for(cuts.size(), workers, [&](std::size_t i) { counts[i] = counter.count(cuts[i]); });
    if (whole && (counts.front() != 0 || counts.back() != total)) {
        throw UnresolvedEdge(lo, hi,
                             "sigma_k_bands: edge count over the search window is " +
                                 std::to_string(counts.back() - counts.front()) + ", expected " +
                                 std::to_string(total));
    }
    for (int i = 1; i <= kChunks; ++i) counts[i] = std::max(counts[i], counts[i - 1]);
    const int first = counts.front();
    const int last = counts.back();

    std::vector<Bracket> brackets(static_cast<std::size_t>(total) + 2);
    parallel_for(kChunks, workers, [&](std::size_t i) {
        isolate(counter, cuts[i], cuts[i + 1], counts[i], counts[i + 1], tol, brackets);
    });
    // Edges outside the window: a band cut by the window ends there.
    const auto edge_bracket = [&](int m) -> Bracket {
        if (m <= first) return {lo, lo};
        if (m > last) return {hi, hi};
        return brackets[static_cast<std::size_t>(m)];
    };

    struct Raw {
        Band band;
        int lo_edge;
        int hi_edge;
    };
    std::vector<Raw> merged;
    const int j_first = first / 2 + 1;
    const int j_last = (last + 1) / 2;
    for (int j = j_first; j <= j_last; ++j) {
        const Bracket lo_br = edge_bracket(2 * j - 1);
        const Bracket hi_br = edge_bracket(2 * j);
        Band band{lo_br.first, hi_br.second, 0, false};
        if (!merged.empty() && (band.lo - merged.back().band.hi < tol ||
                                !gap_certified(merged.back().band.hi, band.lo, k, params))) {
            auto& prev = merged.back();
            prev.band.hi = std::max(prev.band.hi, band.hi);
            prev.band.merged_gaps += 1;
            prev.hi_edge = 2 * j;
        } else {
            merged.push_back({band, 2 * j - 1, 2 * j});
        }
    }

    std::vector<Band> certified(merged.size());
    parallel_for(merged.size(), workers, [&](std::size_t i) {
        const auto& r = merged[i];
        Band b = r.band;
        if (r.lo_edge > first) {
            b.lo = certify_edge(counter, edge_bracket(r.lo_edge), r.lo_edge, true, k, params, tol);
        }
        if (r.hi_edge <= last) {
            b.hi = certify_edge(counter, edge_bracket(r.hi_edge), r.hi_edge, false, k, params, tol);
        }
        b.degenerate = b.hi == b.lo;
        certified[i] = b;
    });
    return certified;
}

}  // namespace

BandSet sigma_k_bands(int k, const ModelParams& params, double tol, int workers) {
    check_generation(k, params, tol);
    const detail::EdgeCounter counter(k, params);
    const auto [lo, hi] = search_window(params);
    BandSet out;
    out.generation = k;
    out.params = params;
    out.kind = BandSetKind::SigmaK;
    out.tol = tol;
    out.bands = bands_between(counter, k, params, lo, hi, tol, workers, true);
    return out;
}

BandSet sigma_k_bands(int k, const ModelParams& params, double lo, double hi, double tol,
                      int workers) {
    check_generation(k, params, tol);
    if (!(lo < hi)) throw std::invalid_argument("sigma_k_bands: window needs lo < hi");
    const detail::EdgeCounter counter(k, params);
    BandSet out;
    out.generation = k;
    out.params = params;
    out.kind = BandSetKind::Window;
    out.tol = tol;
    out.bands = bands_between(counter, k, params, lo, hi, tol, workers, false);
    return out;
}

BandSet unite(const BandSet& a, const BandSet& b, double tol) {
    std::vector<Band> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.bands.begin(), a.bands.end());
    all.insert(all.end(), b.bands.begin(), b.bands.end());
    std::sort(all.begin(), all.end(), [](const Band& x, const Band& y) {
        return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
    });
    BandSet out;
    out.params = a.params;
    out.generation = std::min(a.generation, b.generation);
    out.kind = BandSetKind::CoverK;
    out.tol = tol;
    for (const auto& band : all) {
        if (!out.bands.empty() && band.lo - out.bands.back().hi < tol) {
            auto& last = out.bands.back();
            if (band.lo > last.hi) last.merged_gaps += 1;
            last.merged_gaps += band.merged_gaps;
            last.hi = std::max(last.hi, band.hi);
            last.degenerate = last.hi == last.lo;
        } else {
            out.bands.push_back(band);
        }
    }
    return out;
}

BandSet cover(int k, const ModelParams& params, double tol, int workers) {
    const BandSet a = sigma_k_bands(k, params, tol, workers);
    const BandSet b = sigma_k_bands(k + 1, params, tol, workers);
    BandSet out = unite(a, b, tol);
    out.generation = k;
    return out;
}

BandSet cover(int k, const ModelParams& params, double lo, double hi, double tol, int workers) {
    const BandSet a = sigma_k_bands(k, params, lo, hi, tol, workers);
    const BandSet b = sigma_k_bands(k + 1, params, lo, hi, tol, workers);
    BandSet out = unite(a, b, tol);
    out.generation = k;
    out.kind = BandSetKind::Window;
    return out;
}

BandSet restrict_to(const BandSet& bs, double lo, double hi) {
    BandSet out = bs;
    out.kind = BandSetKind::Window;
    out.bands.clear();
    for (const auto& b : bs.bands) {
        const double l = std::max(b.lo, lo);
        const double h = std::min(b.hi, hi);
        if (l > h) continue;
        Band c = b;
        c.lo = l;
        c.hi = h;
        c.degenerate = l == h;
        out.bands.push_back(c);
    }
    return out;
}

bool is_subset(const BandSet& inner, const BandSet& outer, double slack) {
    std::vector<Band> grown;
    for (const auto& b : outer.bands) {
        const double l = b.lo - slack;
        const double h = b.hi + slack;
        if (!grown.empty() && l <= grown.back().hi)
            grown.back().hi = std::max(grown.back().hi, h);
        else
            grown.push_back({l, h, 0, false});
    }
    for (const auto& b : inner.bands) {
        auto it = first_reaching(grown, b.lo);
        if (it == grown.end() || it->lo > b.lo || it->hi < b.hi) return false;
    }
    return true;
}

double lebesgue_measure(const BandSet& bs) {
    double total = 0.0;
    for (const auto& b : bs.bands) total += b.length();
    return total;
}

std::string to_string(const MembershipVerdict& v) {
    return v.inside() ? "InCoverUpTo(" + std::to_string(v.step) + ")"
                      : "OutsideCertified(" + std::to_string(v.step) + ")";
}

MembershipVerdict membership(double energy, const ModelParams& params, int k_max) {
    const auto c = classify_orbit(energy, params, k_max);
    if (c.escaped()) return {MembershipVerdict::Kind::OutsideCertified, c.step};
    return {MembershipVerdict::Kind::InCoverUpTo, k_max};
}

namespace {

// 2cos(pi p / q) for 0 < p < q, reduced exactly so that p/q = 1/3, 1/2, 2/3
// come out exact.
double two_cos_pi(int p, int q) {
    double sign = 1.0;
    if (2 * p > q) {
        p = q - p;
        sign = -1.0;
    }
    if (2 * p == q) return 0.0;
    if (3 * p == q) return sign;
    if (4 * p > q) {
        return sign * 2.0 * std::sin(std::numbers::pi * (q - 2 * p) / (2.0 * q));
    }
    return sign * 2.0 * std::cos(std::numbers::pi * p / q);
}

bool in_sigma_01(double e, const ModelParams& params) {
    return std::abs(x0_closed(e, params)) <= 1.0 && std::abs(x1_closed(e, params)) <= 1.0;
}

}  // namespace

double special_energy(int j, const ModelParams& params) {
    validate(params);
    if (j <= 0 || j >= params.ell) {
        throw std::invalid_argument("special_energy: need 0 < j < ell");
    }
    const double e = two_cos_pi(j, params.ell);
    if (in_sigma_01(e, params)) return e;
    for (double dir :
         {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}) {
        const double n = std::nextafter(e, dir);
        if (in_sigma_01(n, params)) return n;
    }
    return e;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const BandSet& bs) {
    std::ostringstream os;
    os << "lo,hi\n";
    for (const auto& b : bs.bands) os << format_real(b.lo) << ',' << format_real(b.hi) << '\n';
    return os.str();
}

std::string to_json(const BandSet& bs) {
    std::ostringstream os;
    os << "{\"params\": {\"lambda\": " << format_real(bs.params.lambda)
       << ", \"ell\": " << bs.params.ell << "}, \"k\": " << bs.generation << ", \"kind\": \""
       << to_string(bs.kind) << "\", \"tol\": " << format_real(bs.tol) << ", \"bands\": [";
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        if (i) os << ", ";
        os << '[' << format_real(bs.bands[i].lo) << ", " << format_real(bs.bands[i].hi) << ']';
    }
    os << "]}";
    return os.str();
}

BandSet band_set_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BandSet bs;
    bs.params.lambda = j.at("params").at("lambda").get<double>();
    bs.params.ell = j.at("params").at("ell").get<int>();
    bs.generation = j.at("k").get<int>();
    bs.kind = kind_from_string(j.at("kind").get<std::string>());
    bs.tol = j.at("tol").get<double>();
    for (const auto& pair : j.at("bands")) {
        Band b{pair.at(0).get<double>(), pair.at(1).get<double>(), 0, false};
        if (b.hi < b.lo) throw std::invalid_argument("band with hi < lo");
        b.degenerate = b.hi == b.lo;
        bs.bands.push_back(b);
    }
    return bs;
}

}  // namespace sfib
