#include "sfib/lyapunov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sfib/parallel.hpp"
#include "sfib/spectrum.hpp"
#include "sfib/tracemap.hpp"
#include "sfib/transfer.hpp"

namespace sfib {

std::string to_string(LyapunovMethod m) {
    return m == LyapunovMethod::MatrixNorm ? "MatrixNorm" : "TraceGrowth";
}

namespace {

double sites(const ModelParams& params, int k) {
    return static_cast<double>(params.ell) * static_cast<double>(fibonacci(k));
}

struct Scaled {
    Mat2<double> m;
    double log_scale = 0.0;  // represented matrix is exp(log_scale) * m
};

Scaled rescaled(const Mat2<double>& m, double log_scale) {
    const double s = m.cwiseAbs().maxCoeff();
    if (s == 0.0) return {m, log_scale};
    return {m / s, log_scale + std::log(s)};
}

}  // namespace

double lyapunov_trace_growth(double energy, const ModelParams& params, int k) {
    const auto xs = half_traces_log(energy, params, std::max(k, 1));
    const SignedLog xk = xs[static_cast<std::size_t>(k + 1)];
    if (xk.sign == 0) return 0.0;
    return (std::log(2.0) + xk.log_abs) / sites(params, k);
}

double lyapunov_matrix_norm(double energy, const ModelParams& params, int k) {
    const auto init = initial_matrices(energy, params);
    Scaled older = rescaled(init.m_minus1, 0.0);
    Scaled old = rescaled(init.m0, 0.0);
    for (int i = 1; i <= k; ++i) {
        Scaled next = rescaled(older.m * old.m, older.log_scale + old.log_scale);
        older = old;
        old = next;
    }
    const double norm = old.m.operatorNorm();
    return (old.log_scale + std::log(norm)) / sites(params, k);
}

double cocycle_growth(double energy, const ModelParams& params, std::uint64_t n_sites) {
    if (n_sites == 0) throw std::invalid_argument("cocycle_growth: n_sites must be > 0");
    int generation = 0;
    while (fibonacci(generation + 1) * static_cast<std::uint64_t>(params.ell) < n_sites)
        ++generation;
    const std::vector<double> potential = sieve(params, substitution_word(generation));
    Mat2<double> acc = Mat2<double>::Identity();
    double log_scale = 0.0;
    for (std::uint64_t n = 0; n < n_sites; ++n) {
        acc = (y_matrix(energy - potential[n]) * acc).eval();
        if ((n + 1) % 32 == 0) {
            const double s = acc.cwiseAbs().maxCoeff();
            acc /= s;
            log_scale += std::log(s);
        }
    }
    return (log_scale + std::log(acc.operatorNorm())) / static_cast<double>(n_sites);
}

LyapunovEstimate lyapunov_exponent(double energy, const ModelParams& params, int k_max) {
    validate(params);
    if (k_max < 5) throw std::invalid_argument("lyapunov_exponent: k_max must be >= 5");
    LyapunovEstimate est;
    est.energy = energy;
    est.k_used = k_max;
    if (classify_orbit(energy, params, k_max).escaped()) {
        est.method = LyapunovMethod::TraceGrowth;
        est.value = lyapunov_trace_growth(energy, params, k_max);
    } else {
        est.method = LyapunovMethod::MatrixNorm;
        est.value = lyapunov_matrix_norm(energy, params, k_max);
    }
    return est;
}

std::vector<UhVerdict> uh_scan(const ModelParams& params, const std::vector<double>& grid,
                               int k_max, double threshold, int workers) {
    if (!(threshold > 0.0)) throw std::invalid_argument("uh_scan: threshold must be > 0");
    std::vector<UhVerdict> out(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        UhVerdict v;
        v.energy = grid[i];
        v.estimate = lyapunov_exponent(grid[i], params, k_max);
        v.uh_like =
            v.estimate.method == LyapunovMethod::TraceGrowth && v.estimate.value > threshold;
        out[i] = v;
    });
    return out;
}

std::string to_csv(const std::vector<LyapunovEstimate>& rows) {
    std::ostringstream os;
    os << "energy,exponent,k_used,method\n";
    for (const auto& r : rows) {
        os << format_real(r.energy) << ',' << format_real(r.value) << ',' << r.k_used << ','
           << to_string(r.method) << '\n';
    }
    return os.str();
}

}  // namespace sfib
