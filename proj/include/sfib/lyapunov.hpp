#pragma once

#include <string>
#include <vector>

#include "sfib/model.hpp"

namespace sfib {

enum class LyapunovMethod { MatrixNorm, TraceGrowth };

std::string to_string(LyapunovMethod m);

/// Per-site Lyapunov exponent estimate (log growth per lattice site of the
/// sieved operator, i.e. normalized by ell * F_k).
struct LyapunovEstimate {
    double energy = 0.0;
    double value = 0.0;
    int k_used = 0;
    LyapunovMethod method = LyapunovMethod::MatrixNorm;
};

/// log|tr M_k| / (ell F_k), following escaped orbits in log space up to k.
double lyapunov_trace_growth(double energy, const ModelParams& params, int k);

/// log ||M_k|| / (ell F_k) via the renormalization recursion with every
/// product rescaled to unit sup-norm.
double lyapunov_matrix_norm(double energy, const ModelParams& params, int k);

/// log ||A_E^n|| / n for the site-ordered product over the first n sites of
/// the sieved fixed point, rescaled every 32 factors.
double cocycle_growth(double energy, const ModelParams& params, std::uint64_t n_sites);

/// TraceGrowth when the orbit escapes within k_max, MatrixNorm otherwise.
LyapunovEstimate lyapunov_exponent(double energy, const ModelParams& params, int k_max);

struct UhVerdict {
    double energy = 0.0;
    bool uh_like = false;
    LyapunovEstimate estimate;
};

/// UH-like when escape is certified within k_max and the exponent exceeds
/// `threshold`.
std::vector<UhVerdict> uh_scan(const ModelParams& params, const std::vector<double>& grid,
                               int k_max, double threshold, int workers = 1);

/// Columns energy, exponent, k_used, method.
std::string to_csv(const std::vector<LyapunovEstimate>& rows);

}  // namespace sfib
