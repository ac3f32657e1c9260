#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfib/spectrum.hpp"

namespace sfib {

/// Box-counting regression of log N(eps) against log(1/eps).
struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> eps_values;  // ascending
    std::vector<long long> counts;   // N(eps) for each eps
    std::optional<std::pair<double, double>> window;
    // eps_min fell below three times the narrowest band: the finite cover
    // dominates the smallest scales and the slope drifts toward 1.
    bool below_resolution = false;
};

/// Number of grid cells [m eps, (m+1) eps) meeting the band union.
long long box_count(const BandSet& bs, double eps);

/// Least-squares slope over n_scales geometrically spaced eps in
/// [eps_min, eps_max]. Throws std::invalid_argument for bad ranges, an empty
/// set, or fewer than three usable scales.
DimensionEstimate box_dimension(const BandSet& bs, double eps_min, double eps_max, int n_scales);

struct EpsRange {
    double eps_min = 1e-6;
    double eps_max = 1e-2;
    int n_scales = 9;
};

/// Box dimension of cover(k) restricted to [center - half_width, center + half_width].
DimensionEstimate local_dimension(const ModelParams& params, double center, double half_width,
                                  int k, double tol, const EpsRange& eps, int workers = 1);

/// Same, on an already computed cover.
DimensionEstimate local_dimension(const BandSet& cover_set, double center, double half_width,
                                  const EpsRange& eps);

struct ResolvedEstimate {
    DimensionEstimate estimate;
    int generation = 0;
};

/// local_dimension at the first generation k in [k_min, k_max] whose cover
/// resolves eps.eps_min inside the window, with the default tolerance for each
/// k. Stops at k_max or the period limit and returns the last (still flagged)
/// estimate.
ResolvedEstimate resolved_local_dimension(const ModelParams& params, double center,
                                          double half_width, int k_min, const EpsRange& eps,
                                          int workers, int k_max);

/// Asymptotic surrogate for half the dimension of the trace map's
/// non-wandering set on the FVI level V: log(1 + sqrt 2) / log V where that
/// is below 1, and 1 for smaller V. Exact only as V -> infinity.
double f_model(double v);

/// f_model(fvi_energy(E)).
double predicted_local_dimension(double energy, const ModelParams& params);

std::string to_json(const DimensionEstimate& d);

}  // namespace sfib
