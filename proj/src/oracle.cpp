#include "sfib/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sfib/parallel.hpp"

namespace sfib {

TridiagonalOperator build_truncation(const ModelParams& params, int word_generation,
                                     std::size_t size) {
    validate(params);
    if (size == 0) throw std::invalid_argument("build_truncation: size must be > 0");
    const std::uint64_t available =
        fibonacci(word_generation + 1) * static_cast<std::uint64_t>(params.ell);
    if (size > available) {
        throw std::invalid_argument("build_truncation: window of " + std::to_string(size) +
                                    " sites exceeds the " + std::to_string(available) +
                                    "-site sieved word");
    }
    const std::vector<double> potential = sieve(params, substitution_word(word_generation));
    const std::size_t start = (potential.size() - size) / 2;
    TridiagonalOperator op;
    op.diagonal.assign(potential.begin() + static_cast<std::ptrdiff_t>(start),
                       potential.begin() + static_cast<std::ptrdiff_t>(start + size));
    op.offdiagonal.assign(size - 1, 1.0);
    return op;
}

std::size_t sturm_count(const TridiagonalOperator& op, double shift) {
    constexpr double pivmin = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < op.size(); ++i) {
        const double b2 = i == 0 ? 0.0 : op.offdiagonal[i - 1] * op.offdiagonal[i - 1];
        d = op.diagonal[i] - shift - (i == 0 ? 0.0 : b2 / d);
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

namespace {

void bisect_all(const TridiagonalOperator& op, double a, double b, std::size_t ca, std::size_t cb,
                double tol, std::vector<double>& out) {
    if (ca >= cb) return;
    const double mid = a + 0.5 * (b - a);
    if (b - a <= tol || !(mid > a && mid < b)) {
        for (std::size_t i = ca; i < cb; ++i) out[i] = mid;
        return;
    }
    const std::size_t cm = std::clamp(sturm_count(op, mid), ca, cb);
    bisect_all(op, a, mid, ca, cm, tol, out);
    bisect_all(op, mid, b, cm, cb, tol, out);
}

}  // namespace

std::vector<double> eigenvalues(const TridiagonalOperator& op, double tol, int workers) {
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalues: tol must be > 0");
    const std::size_t n = op.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    // Gershgorin bounds
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(op.offdiagonal[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(op.offdiagonal[i]) : 0.0);
        lo = std::min(lo, op.diagonal[i] - r);
        hi = std::max(hi, op.diagonal[i] + r);
    }
    lo -= tol;
    hi += tol;
    constexpr std::size_t kChunks = 32;
    std::vector<double> cuts(kChunks + 1);
    for (std::size_t i = 0; i <= kChunks; ++i) {
        cuts[i] = lo + (hi - lo) * static_cast<double>(i) / kChunks;
    }
    cuts[kChunks] = hi;
    std::vector<std::size_t> counts(kChunks + 1);
    parallel_for(cuts.size(), workers,
                 [&](std::size_t i) { counts[i] = sturm_count(op, cuts[i]); });
    counts.front() = 0;
    counts.back() = n;
    for (std::size_t i = 1; i <= kChunks; ++i) counts[i] = std::max(counts[i], counts[i - 1]);
    parallel_for(kChunks, workers, [&](std::size_t i) {
        bisect_all(op, cuts[i], cuts[i + 1], counts[i], counts[i + 1], tol, out);
    });
    return out;
}

ConsistencyReport spectral_consistency(const std::vector<double>& eigs, const BandSet& cover_set,
                                       double delta, double threshold) {
    ConsistencyReport r;
    r.n_eigenvalues = eigs.size();
    if (eigs.empty()) return r;
    std::size_t inside = 0;
    for (double e : eigs) {
        const double dist = cover_set.distance(e);
        if (dist <= delta) ++inside;
        r.worst_distance = std::max(r.worst_distance, dist);
    }
    r.fraction_inside = static_cast<double>(inside) / static_cast<double>(eigs.size());
    r.flagged = r.fraction_inside < threshold;
    return r;
}

std::string eigenvalues_to_csv(const std::vector<double>& eigs) {
    std::ostringstream os;
    for (double e : eigs) os << format_real(e) << '\n';
    return os.str();
}

}  // namespace sfib
