#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "sfib/model.hpp"
#include "sfib/transfer.hpp"

namespace sfib {

/// (x_{k+1}, x_k, x_{k-1}).
template <typename Scalar>
using TraceTriple = Eigen::Matrix<Scalar, 3, 1>;

/// Default orbit length for membership queries.
inline constexpr int kDefaultOrbitLength = 40;

/// T(x, y, z) = (2xy - z, x, y).
template <typename Scalar>
TraceTriple<Scalar> trace_map_step(const TraceTriple<Scalar>& p) {
    return TraceTriple<Scalar>(Scalar(2) * p(0) * p(1) - p(2), p(0), p(1));
}

template <typename Scalar>
Scalar fvi(const TraceTriple<Scalar>& p) {
    return fvi_triple(p(0), p(1), p(2));
}

/// gamma(E) = (x_1, x_0, x_{-1}) with x_{-1} = 1.
template <typename Scalar>
TraceTriple<Scalar> curve_of_initial_conditions(Scalar energy, const ModelParams& params) {
    return TraceTriple<Scalar>(x1_closed(energy, params), x0_closed(energy, params), Scalar(1));
}

/// Escaped(k) certifies unboundedness; BoundedUpTo(k_max) only records that no
/// escape was seen within k_max steps.
struct OrbitClassification {
    enum class Kind { Escaped, BoundedUpTo };
    Kind kind = Kind::BoundedUpTo;
    int step = 0;  // escape index, or k_max

    bool escaped() const noexcept { return kind == Kind::Escaped; }
    static OrbitClassification escaped_at(int k) { return {Kind::Escaped, k}; }
    static OrbitClassification bounded_up_to(int k) { return {Kind::BoundedUpTo, k}; }
};

inline bool operator==(const OrbitClassification& a, const OrbitClassification& b) {
    return a.kind == b.kind && a.step == b.step;
}

template <typename Scalar>
OrbitClassification classify_orbit(Scalar energy, const ModelParams& params,
                                   int k_max = kDefaultOrbitLength) {
    if (k_max < 2) throw std::invalid_argument("classify_orbit: k_max must be >= 2");
    const auto run = half_traces_recursive(energy, params, k_max);
    if (run.escape_index) return OrbitClassification::escaped_at(*run.escape_index);
    return OrbitClassification::bounded_up_to(k_max);
}

}  // namespace sfib
