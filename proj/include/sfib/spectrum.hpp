#pragma once

#include <string>
#include <vector>

#include "sfib/model.hpp"
#include "sfib/tracemap.hpp"

namespace sfib {

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    int merged_gaps = 0;      // gaps narrower than tol (or uncertified) absorbed into this band
    bool degenerate = false;  // hi == lo

    double length() const noexcept { return hi - lo; }
};

enum class BandSetKind { SigmaK, CoverK, Window };

std::string to_string(BandSetKind kind);

/// Sorted, pairwise disjoint union of closed energy intervals.
struct BandSet {
    std::vector<Band> bands;
    int generation = 0;
    ModelParams params;
    BandSetKind kind = BandSetKind::SigmaK;
    double tol = 0.0;

    std::size_t size() const noexcept { return bands.size(); }
    bool empty() const noexcept { return bands.empty(); }
    bool contains(double energy, double slack = 0.0) const;
    double distance(double energy) const;
    double smallest_width() const;
};

/// Default band-edge tolerance: 1e-10 up to generation 14, 1e-8 above.
double default_band_tolerance(int k);

/// Energy window scanned for Sigma_k: [-3, lambda + 3].
std::pair<double, double> search_window(const ModelParams& params);

/// Largest period ell * F_k accepted by sigma_k_bands.
inline constexpr std::uint64_t kMaxPeriod = std::uint64_t{1} << 22;

/// Smallest k with ell * F_k >= min_period.
int generation_for_period(int ell, std::uint64_t min_period);

/// Closure of {E : |x_k(E)| <= 1}, the spectrum of the ell F_k periodic
/// approximant. Every band edge is counted (no band or gap is skipped) and
/// localized to `tol`; edges are certified against the half-trace recursion.
/// Throws UnresolvedEdge when certification fails at full refinement.
BandSet sigma_k_bands(int k, const ModelParams& params, double tol, int workers = 1);

/// Bands of Sigma_k meeting [lo, hi], cut at the window ends. Only edges
/// inside the window are located, so the cost scales with the band count there.
BandSet sigma_k_bands(int k, const ModelParams& params, double lo, double hi, double tol,
                      int workers = 1);

/// Sigma_k union Sigma_{k+1}.
BandSet cover(int k, const ModelParams& params, double tol, int workers = 1);
/// Sigma_k union Sigma_{k+1} restricted to [lo, hi].
BandSet cover(int k, const ModelParams& params, double lo, double hi, double tol, int workers = 1);

/// Union of two band sets, merging intervals closer than `tol`.
BandSet unite(const BandSet& a, const BandSet& b, double tol);

/// Intersection with [lo, hi].
BandSet restrict_to(const BandSet& bs, double lo, double hi);

/// True when every band of `inner` lies in `outer` dilated by `slack`.
bool is_subset(const BandSet& inner, const BandSet& outer, double slack);

double lebesgue_measure(const BandSet& bs);

struct MembershipVerdict {
    enum class Kind { OutsideCertified, InCoverUpTo };
    Kind kind = Kind::InCoverUpTo;
    int step = 0;

    bool inside() const noexcept { return kind == Kind::InCoverUpTo; }
};

std::string to_string(const MembershipVerdict& v);

/// Escape at step k certifies E outside the spectrum; otherwise E lies in
/// every cover up to k_max.
MembershipVerdict membership(double energy, const ModelParams& params,
                             int k_max = kDefaultOrbitLength);

/// 2cos(pi j / ell), 0 < j < ell. The exact value is irrational in general and
/// sits on an edge of Sigma_1; of the doubles within one ulp the one on the
/// Sigma_1 side is returned.
double special_energy(int j, const ModelParams& params);

/// "lo,hi" rows, 17 significant digits.
std::string to_csv(const BandSet& bs);
/// {params, k, kind, tol, bands: [[lo, hi], ...]}
std::string to_json(const BandSet& bs);
BandSet band_set_from_json(const std::string& text);

/// %.17g
std::string format_real(double x);

namespace detail {

/// Number of periodic plus antiperiodic eigenvalues (band edges of Sigma_k)
/// below `energy`, for the period potential `period`.
class EdgeCounter {
  public:
    EdgeCounter(int k, const ModelParams& params);

    int count(double energy) const;
    int period() const noexcept { return static_cast<int>(potential_.size()); }

  private:
    int k_;
    ModelParams params_;
    std::vector<double> potential_;
};

}  // namespace detail

}  // namespace sfib
