#pragma once

#include <string>
#include <vector>

#include "sfib/spectrum.hpp"

namespace sfib {

/// Delta + V^[ell] restricted to a finite box with Dirichlet boundary.
struct TridiagonalOperator {
    std::vector<double> diagonal;
    std::vector<double> offdiagonal;  // all exactly 1

    std::size_t size() const noexcept { return diagonal.size(); }
};

/// Window of `size` sites from the middle of the sieved expansion of
/// w_{word_generation}. Throws std::invalid_argument when the window does not fit.
TridiagonalOperator build_truncation(const ModelParams& params, int word_generation,
                                     std::size_t size);

/// Number of eigenvalues strictly below `shift` (Sturm sequence sign count).
std::size_t sturm_count(const TridiagonalOperator& op, double shift);

/// All eigenvalues by Sturm bisection, ascending, each localized to `tol`.
std::vector<double> eigenvalues(const TridiagonalOperator& op, double tol, int workers = 1);

struct ConsistencyReport {
    double fraction_inside = 1.0;
    double worst_distance = 0.0;
    std::size_t n_eigenvalues = 0;
    bool flagged = false;  // fraction below the requested threshold
};

/// Fraction of eigenvalues within `delta` of the band set.
ConsistencyReport spectral_consistency(const std::vector<double>& eigs, const BandSet& cover_set,
                                       double delta, double threshold = 0.95);

/// One eigenvalue per line, 17 significant digits.
std::string eigenvalues_to_csv(const std::vector<double>& eigs);

}  // namespace sfib
