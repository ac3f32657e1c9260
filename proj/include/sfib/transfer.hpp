#pragma once

// Transfer matrices of the sieved Fibonacci operator, the M_k renormalization
// and its half-traces x_k = tr(M_k) / 2.
//
// Everything here is templated on the scalar type; double is the working
// precision, long double is used by a few tests as a higher-precision check.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sfib/errors.hpp"
#include "sfib/model.hpp"

namespace sfib {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

/// Magnitude at which the half-trace recursion stops once escape is known.
inline constexpr double kDefaultEscapeCap = 1e8;

/// One-step transfer matrix [s -1; 1 0].
template <typename Scalar>
Mat2<Scalar> y_matrix(Scalar s) {
    Mat2<Scalar> m;
    m << s, Scalar(-1), Scalar(1), Scalar(0);
    return m;
}

template <typename Scalar>
struct InitialMatrices {
    Mat2<Scalar> m_minus1;  // [1 -lambda; 0 1]
    Mat2<Scalar> m0;        // Y(E)^ell
    Mat2<Scalar> m1;        // M_{-1} M_0 = Y(E - lambda) Y(E)^(ell-1)
};

template <typename Scalar>
InitialMatrices<Scalar> initial_matrices(Scalar energy, const ModelParams& params) {
    InitialMatrices<Scalar> out;
    out.m_minus1 << Scalar(1), Scalar(-params.lambda), Scalar(0), Scalar(1);
    out.m0.setIdentity();
    const Mat2<Scalar> y = y_matrix(energy);
    for (int i = 0; i < params.ell; ++i) out.m0 = (y * out.m0).eval();
    out.m1 = out.m_minus1 * out.m0;
    return out;
}

namespace detail {

// T_ell(E/2) and U_{ell-1}(E/2), i.e. (xi^l + xi^-l)/2 and
// (xi^l - xi^-l)/(xi - xi^-1) with E = xi + 1/xi.
template <typename Scalar>
struct Chebyshev {
    Scalar first;   // T_ell(E/2)
    Scalar second;  // U_{ell-1}(E/2)
};

// Half-width (in E/2) of the band around E = +-2 evaluated by Taylor series.
template <typename Scalar>
constexpr Scalar kEdgeGuard = Scalar(0.5e-8);

template <typename Scalar>
Chebyshev<Scalar> chebyshev(Scalar energy, int ell) {
    using std::abs;
    using std::acosh;
    using std::cosh;
    using std::sinh;
    const Scalar x = energy / Scalar(2);
    const Scalar ax = abs(x);
    const Scalar l = Scalar(ell);
    const Scalar delta = ax - Scalar(1);
    Chebyshev<Scalar> c;
    if (abs(delta) < kEdgeGuard<Scalar>) {
        const Scalar l2 = l * l;
        c.first = Scalar(1) + l2 * delta + (l2 * l2 - l2) / Scalar(6) * delta * delta;
        c.second = l * (Scalar(1) + (l2 - Scalar(1)) / Scalar(3) * delta +
                        (l2 - Scalar(1)) * (l2 - Scalar(4)) / Scalar(30) * delta * delta);
    } else if (ax < Scalar(1)) {
        // three-term recurrence: stable inside the band and exact where E/2 is
        Scalar t_prev = 1, t = ax;  // T_0, T_1
        Scalar u_prev = 0, u = 1;   // U_{-1}, U_0
        for (int n = 1; n < ell; ++n) {
            const Scalar t_next = Scalar(2) * ax * t - t_prev;
            const Scalar u_next = Scalar(2) * ax * u - u_prev;
            t_prev = t;
            t = t_next;
            u_prev = u;
            u = u_next;
        }
        c.first = std::clamp(t, Scalar(-1), Scalar(1));  // |T_l| <= 1 on the band
        c.second = u;
    } else {
        const Scalar t = acosh(ax);
        c.first = cosh(l * t);
        c.second = sinh(l * t) / sinh(t);
    }
    if (x < Scalar(0)) {
        // T_l(-x) = (-1)^l T_l(x), U_{l-1}(-x) = (-1)^(l-1) U_{l-1}(x)
        if (ell % 2 == 1)
            c.first = -c.first;
        else
            c.second = -c.second;
    }
    return c;
}

// d/dE U_{ell-1}(E/2) via the polynomial recurrence.
template <typename Scalar>
Scalar chebyshev_second_derivative(Scalar energy, int ell) {
    const Scalar x = energy / Scalar(2);
    if (ell == 1) return Scalar(0);
    Scalar u_prev = 1, u = 2 * x;  // U_0, U_1
    Scalar d_prev = 0, d = 2;      // U_0', U_1' (w.r.t. x)
    for (int n = 1; n < ell - 1; ++n) {
        const Scalar u_next = 2 * x * u - u_prev;
        const Scalar d_next = 2 * u + 2 * x * d - d_prev;
        u_prev = u;
        u = u_next;
        d_prev = d;
        d = d_next;
    }
    return d / Scalar(2);
}

}  // namespace detail

/// x_0 = (xi^ell + xi^-ell) / 2, continuous across E = +-2.
template <typename Scalar>
Scalar x0_closed(Scalar energy, const ModelParams& params) {
    return detail::chebyshev(energy, params.ell).first;
}

/// x_1 = x_0 - (lambda/2) (xi^ell - xi^-ell)/(xi - xi^-1); the ratio takes
/// its limit value +-ell at E = +-2.
template <typename Scalar>
Scalar x1_closed(Scalar energy, const ModelParams& params) {
    const auto c = detail::chebyshev(energy, params.ell);
    return c.first - Scalar(params.lambda) / Scalar(2) * c.second;
}

/// Fricke-Vogt invariant x^2 + y^2 + z^2 - 2xyz - 1.
template <typename Scalar>
Scalar fvi_triple(Scalar x, Scalar y, Scalar z) {
    return x * x + y * y + z * z - Scalar(2) * x * y * z - Scalar(1);
}

/// FVI along the curve of initial conditions, (lambda^2/4) U_{ell-1}(E/2)^2 >= 0.
template <typename Scalar>
Scalar fvi_energy(Scalar energy, const ModelParams& params) {
    const Scalar r = detail::chebyshev(energy, params.ell).second;
    const Scalar lam = Scalar(params.lambda);
    return lam * lam / Scalar(4) * r * r;
}

/// Half-traces x_{-1}, x_0, ..., x_K at one energy.
template <typename Scalar>
struct HalfTraceRun {
    ModelParams params;
    Scalar energy{};
    std::vector<Scalar> values;       // values[k + 1] == x_k
    std::optional<int> escape_index;  // first k >= 0 with |x_k| > 1 and |x_{k+1}| > 1
    std::optional<int> stopped_at;    // k at which the escape cap ended the run

    /// Largest k present in the run.
    int last_k() const noexcept { return static_cast<int>(values.size()) - 2; }
    Scalar x(int k) const { return values.at(static_cast<std::size_t>(k + 1)); }
};

/// Scalar trace-map recursion x_{k+1} = 2 x_k x_{k-1} - x_{k-2} seeded from the
/// closed forms. Once escape is certified the run stops at the first |x_k| above
/// `escape_cap`.
template <typename Scalar>
HalfTraceRun<Scalar> half_traces_recursive(Scalar energy, const ModelParams& params, int k_max,
                                           Scalar escape_cap = Scalar(kDefaultEscapeCap)) {
    using std::abs;
    if (k_max < 1) throw std::invalid_argument("half_traces_recursive: k_max must be >= 1");
    if (!(escape_cap > Scalar(1))) {
        throw std::invalid_argument("half_traces_recursive: escape_cap must exceed 1");
    }
    HalfTraceRun<Scalar> run;
    run.params = params;
    run.energy = energy;
    run.values.reserve(static_cast<std::size_t>(k_max) + 2);
    run.values.push_back(Scalar(1));
    run.values.push_back(x0_closed(energy, params));
    run.values.push_back(x1_closed(energy, params));

    // |x| beyond which a further product could overflow.
    const Scalar hard_cap = Scalar(1e150);
    for (int k = 0;; ++k) {
        // values holds x_{-1} .. x_{k+1} here
        const Scalar xk = run.values[static_cast<std::size_t>(k + 1)];
        const Scalar xk1 = run.values[static_cast<std::size_t>(k + 2)];
        if (!run.escape_index && abs(xk) > Scalar(1) && abs(xk1) > Scalar(1)) {
            run.escape_index = k;
        }
        if (k + 1 >= k_max) break;
        if (run.escape_index && abs(xk1) > escape_cap) {
            run.stopped_at = k + 1;
            break;
        }
        if (abs(xk1) > hard_cap) {
            run.stopped_at = k + 1;
            break;
        }
        const Scalar xkm1 = run.values[static_cast<std::size_t>(k)];
        run.values.push_back(Scalar(2) * xk1 * xk - xkm1);
    }
    return run;
}

/// (tr M_k)/2 for k = -1..k_max from explicit 2x2 products M_k = M_{k-2} M_{k-1}.
/// Throws NumericalOverflow if an entry leaves the floating range.
template <typename Scalar>
std::vector<Scalar> half_traces_matrix(Scalar energy, const ModelParams& params, int k_max) {
    using std::isfinite;
    if (k_max < 0) throw std::invalid_argument("half_traces_matrix: k_max must be >= 0");
    const auto init = initial_matrices(energy, params);
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(k_max) + 2);
    out.push_back(init.m_minus1.trace() / Scalar(2));
    out.push_back(init.m0.trace() / Scalar(2));
    Mat2<Scalar> older = init.m_minus1;
    Mat2<Scalar> old = init.m0;
    for (int k = 1; k <= k_max; ++k) {
        Mat2<Scalar> next = older * old;
        if (!next.allFinite()) {
            throw NumericalOverflow("half_traces_matrix: M_" + std::to_string(k) +
                                    " overflows at E = " + std::to_string(double(energy)));
        }
        out.push_back(next.trace() / Scalar(2));
        older = old;
        old = next;
    }
    return out;
}

/// Half-trace run together with dx_k/dE.
template <typename Scalar>
struct HalfTraceJet {
    HalfTraceRun<Scalar> run;
    std::vector<Scalar> derivatives;  // derivatives[k + 1] == x_k'(E)

    Scalar dx(int k) const { return derivatives.at(static_cast<std::size_t>(k + 1)); }
};

/// Differentiates the recursion term by term:
/// x'_{k+1} = 2 (x'_k x_{k-1} + x_k x'_{k-1}) - x'_{k-2}, x'_{-1} = 0.
template <typename Scalar>
HalfTraceJet<Scalar> half_trace_derivatives(Scalar energy, const ModelParams& params, int k_max,
                                            Scalar escape_cap = Scalar(kDefaultEscapeCap)) {
    HalfTraceJet<Scalar> jet;
    jet.run = half_traces_recursive(energy, params, k_max, escape_cap);
    const auto& x = jet.run.values;
    auto& d = jet.derivatives;
    d.resize(x.size());
    const Scalar u = detail::chebyshev(energy, params.ell).second;
    const Scalar du = detail::chebyshev_second_derivative(energy, params.ell);
    d[0] = Scalar(0);
    d[1] = Scalar(params.ell) / Scalar(2) * u;
    d[2] = d[1] - Scalar(params.lambda) / Scalar(2) * du;
    for (std::size_t i = 3; i < x.size(); ++i) {
        d[i] = Scalar(2) * (d[i - 1] * x[i - 2] + x[i - 1] * d[i - 2]) - d[i - 3];
    }
    return jet;
}

/// Sign and log-magnitude of a real number; sign == 0 encodes exact zero.
struct SignedLog {
    int sign = 0;
    double log_abs = 0.0;
};

/// x_{-1}..x_{k_max} without any cap: plain doubles while small, signed
/// logarithms once magnitudes pass 1e150 (only reachable after escape).
std::vector<SignedLog> half_traces_log(double energy, const ModelParams& params, int k_max);

}  // namespace sfib
