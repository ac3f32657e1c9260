#include "sfib/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sfib/transfer.hpp"

namespace sfib {

long long box_count(const BandSet& bs, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("box_count: eps must be > 0");
    long long total = 0;
    bool any = false;
    long long last = 0;  // highest cell counted so far
    for (const auto& b : bs.bands) {
        auto first = static_cast<long long>(std::floor(b.lo / eps));
        auto end = static_cast<long long>(std::floor(b.hi / eps));
        // a right edge sitting exactly on a grid line touches that cell in a
        // single point only
        if (b.hi > b.lo && static_cast<double>(end) * eps == b.hi) end -= 1;
        end = std::max(end, first);
        if (any) first = std::max(first, last + 1);
        if (first <= end) {
            total += end - first + 1;
            last = end;
            any = true;
        }
    }
    return total;
}

DimensionEstimate box_dimension(const BandSet& bs, double eps_min, double eps_max, int n_scales) {
    if (bs.empty()) throw std::invalid_argument("box_dimension: empty band set");
    if (!(eps_min > 0.0) || !(eps_min < eps_max)) {
        throw std::invalid_argument("box_dimension: need 0 < eps_min < eps_max");
    }
    if (n_scales < 5) throw std::invalid_argument("box_dimension: n_scales must be >= 5");

    DimensionEstimate d;
    const double step = std::log(eps_max / eps_min) / (n_scales - 1);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = 0; i < n_scales; ++i) {
        const double eps = i + 1 == n_scales ? eps_max : eps_min * std::exp(step * i);
        const long long n = box_count(bs, eps);
        d.eps_values.push_back(eps);
        d.counts.push_back(n);
        if (n > 0) {
            xs.push_back(-std::log(eps));
            ys.push_back(std::log(static_cast<double>(n)));
        }
    }
    if (xs.size() < 3) throw std::invalid_argument("box_dimension: fewer than 3 usable scales");

    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    d.slope = sxy / sxx;
    d.intercept = my - d.slope * mx;
    d.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    d.below_resolution = eps_min < 3.0 * bs.smallest_width();
    return d;
}

DimensionEstimate local_dimension(const BandSet& cover_set, double center, double half_width,
                                  const EpsRange& eps) {
    if (!(half_width > 0.0)) throw std::invalid_argument("local_dimension: half_width must be > 0");
    const double lo = center - half_width;
    const double hi = center + half_width;
    const BandSet window = restrict_to(cover_set, lo, hi);
    if (window.empty()) {
        throw std::invalid_argument("local_dimension: window [" + format_real(lo) + ", " +
                                    format_real(hi) + "] misses the cover");
    }
    DimensionEstimate d = box_dimension(window, eps.eps_min, eps.eps_max, eps.n_scales);
    d.window = std::make_pair(lo, hi);
    // pieces cut by the window ends say nothing about the cover's resolution
    double narrowest = std::numeric_limits<double>::infinity();
    for (const auto& b : window.bands) {
        if (b.lo > lo && b.hi < hi) narrowest = std::min(narrowest, b.length());
    }
    d.below_resolution = eps.eps_min < 3.0 * narrowest;
    return d;
}

DimensionEstimate local_dimension(const ModelParams& params, double center, double half_width,
                                  int k, double tol, const EpsRange& eps, int workers) {
    if (!(half_width > 0.0)) throw std::invalid_argument("local_dimension: half_width must be > 0");
    const BandSet c = cover(k, params, center - half_width, center + half_width, tol, workers);
    return local_dimension(c, center, half_width, eps);
}

ResolvedEstimate resolved_local_dimension(const ModelParams& params, double center,
                                          double half_width, int k_min, const EpsRange& eps,
                                          int workers, int k_max) {
    ResolvedEstimate r;
    for (int k = k_min;; ++k) {
        r.estimate =
            local_dimension(params, center, half_width, k, default_band_tolerance(k), eps, workers);
        r.generation = k;
        if (!r.estimate.below_resolution || k >= k_max) break;
        const std::uint64_t next = fibonacci(k + 2) * static_cast<std::uint64_t>(params.ell);
        if (next > kMaxPeriod) break;
    }
    return r;
}

double f_model(double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("f_model: V must be >= 0");
    static const double kSilver = std::log(1.0 + std::sqrt(2.0));
    if (v <= 1.0 + std::sqrt(2.0)) return 1.0;
    return std::clamp(kSilver / std::log(v), 0.0, 1.0);
}

double predicted_local_dimension(double energy, const ModelParams& params) {
    return f_model(fvi_energy(energy, params));
}

std::string to_json(const DimensionEstimate& d) {
    std::ostringstream os;
    os << "{\"slope\": " << format_real(d.slope) << ", \"intercept\": " << format_real(d.intercept)
       << ", \"r_squared\": " << format_real(d.r_squared)
       << ", \"below_resolution\": " << (d.below_resolution ? "true" : "false") << ", \"window\": ";
    if (d.window) {
        os << '[' << format_real(d.window->first) << ", " << format_real(d.window->second) << ']';
    } else {
        os << "null";
    }
    os << ", \"scales\": [";
    for (std::size_t i = 0; i < d.eps_values.size(); ++i) {
        if (i) os << ", ";
        os << "{\"eps\": " << format_real(d.eps_values[i]) << ", \"count\": " << d.counts[i] << '}';
    }
    os << "]}";
    return os.str();
}

}  // namespace sfib
