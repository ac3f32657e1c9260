#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sfib {

/// Coupling and sieving parameter of one operator family H = Delta + V^[ell].
///
/// lambda == 0 is accepted and marks the free operator; checks that rely on
/// lambda > 0 consult free_mode() and skip themselves.
struct ModelParams {
    double lambda = 1.0;
    int ell = 1;

    bool free_mode() const noexcept { return lambda == 0.0; }
};

/// Throws std::invalid_argument unless lambda >= 0 is finite and ell >= 1.
void validate(const ModelParams& params);

using Letter = std::uint8_t;

/// Finite word over {0, 1}.
struct BinaryWord {
    std::vector<Letter> letters;

    std::size_t size() const noexcept { return letters.size(); }
    std::size_t count_ones() const noexcept;
    std::string str() const;
    bool is_prefix_of(const BinaryWord& other) const noexcept;
};

/// Largest k accepted by substitution_word (|w_k| = F_{k+1} letters).
inline constexpr int kMaxWordGeneration = 40;

/// F_k with F_0 = F_1 = 1. Throws std::overflow_error past the uint64 range.
std::uint64_t fibonacci(int k);

/// S^k(1) for S: 0 -> 1, 1 -> 10. Throws ResourceLimit for k > kMaxWordGeneration.
BinaryWord substitution_word(int k);

/// One substitution step applied to an arbitrary word.
BinaryWord substitute(const BinaryWord& word);

/// n-th letter (0-indexed) of the one-sided fixed point w_inf, in O(log n).
Letter omega_zero(std::uint64_t n);

/// lambda * omega(n / ell) if ell | n, else 0. The omega window starts at index 0.
/// Throws std::out_of_range when ell | n and n / ell falls outside the window.
double sieved_potential(const ModelParams& params, std::span<const Letter> omega, std::int64_t n);

/// Same, reading omega from the fixed point w_inf (n >= 0).
double sieved_potential(const ModelParams& params, std::int64_t n);

/// Word whose block product is M_k: "0" for k = 0, otherwise w_{k-1}. Length F_k.
BinaryWord renormalization_word(int k);

/// Site potentials of the sieved expansion of `word` (length ell * |word|).
std::vector<double> sieve(const ModelParams& params, const BinaryWord& word);

}  // namespace sfib
