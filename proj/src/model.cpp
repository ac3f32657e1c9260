#include "sfib/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfib/errors.hpp"

namespace sfib {

void validate(const ModelParams& params) {
    if (!std::isfinite(params.lambda) || params.lambda < 0.0) {
        throw std::invalid_argument("lambda must be finite and >= 0");
    }
    if (params.ell < 1) {
        throw std::invalid_argument("ell must be >= 1");
    }
}

std::size_t BinaryWord::count_ones() const noexcept {
    return static_cast<std::size_t>(std::count(letters.begin(), letters.end(), Letter{1}));
}

std::string BinaryWord::str() const {
    std::string out;
    out.reserve(letters.size());
    for (Letter l : letters) out.push_back(l ? '1' : '0');
    return out;
}

bool BinaryWord::is_prefix_of(const BinaryWord& other) const noexcept {
    return letters.size() <= other.letters.size() &&
           std::equal(letters.begin(), letters.end(), other.letters.begin());
}

std::uint64_t fibonacci(int k) {
    if (k < 0) throw std::invalid_argument("fibonacci: k must be >= 0");
    std::uint64_t prev = 1;
    std::uint64_t cur = 1;
    for (int i = 1; i < k; ++i) {
        if (cur > std::numeric_limits<std::uint64_t>::max() - prev) {
            throw std::overflow_error("fibonacci: F_" + std::to_string(k) +
                                      " exceeds the 64-bit range");
        }
        const std::uint64_t next = prev + cur;
        prev = cur;
        cur = next;
    }
    return cur;
}

BinaryWord substitute(const BinaryWord& word) {
    BinaryWord out;
    out.letters.reserve(word.size() + word.count_ones());
    for (Letter l : word.letters) {
        out.letters.push_back(1);
        if (l) out.letters.push_back(0);
    }
    return out;
}

BinaryWord substitution_word(int k) {
    if (k < 0) throw std::invalid_argument("substitution_word: k must be >= 0");
    if (k > kMaxWordGeneration) {
        throw ResourceLimit("substitution_word: generation " + std::to_string(k) +
                            " exceeds the limit " + std::to_string(kMaxWordGeneration));
    }
    BinaryWord w{{1}};
    for (int i = 0; i < k; ++i) w = substitute(w);
    return w;
}

Letter omega_zero(std::uint64_t n) {
    // w_k = w_{k-1} w_{k-2}; descend into the factor that contains n.
    int k = 0;
    while (fibonacci(k + 1) <= n) ++k;
    while (k >= 2) {
        const std::uint64_t head = fibonacci(k);  // |w_{k-1}|
        if (n < head) {
            k -= 1;
        } else {
            n -= head;
            k -= 2;
        }
    }
    // w_0 = "1", w_1 = "10"
    if (k == 0) return 1;
    return n == 0 ? 1 : 0;
}

double sieved_potential(const ModelParams& params, std::span<const Letter> omega, std::int64_t n) {
    const std::int64_t ell = params.ell;
    if (n % ell != 0) return 0.0;
    const std::int64_t idx = n / ell;
    if (idx < 0 || idx >= static_cast<std::int64_t>(omega.size())) {
        throw std::out_of_range("sieved_potential: index " + std::to_string(idx) +
                                " outside the omega window");
    }
    return params.lambda * omega[static_cast<std::size_t>(idx)];
}

double sieved_potential(const ModelParams& params, std::int64_t n) {
    if (n < 0) throw std::out_of_range("sieved_potential: w_inf is one-sided");
    if (n % params.ell != 0) return 0.0;
    return params.lambda * omega_zero(static_cast<std::uint64_t>(n / params.ell));
}

BinaryWord renormalization_word(int k) {
    if (k < 0) throw std::invalid_argument("renormalization_word: k must be >= 0");
    if (k == 0) return BinaryWord{{0}};
    return substitution_word(k - 1);
}

std::vector<double> sieve(const ModelParams& params, const BinaryWord& word) {
    std::vector<double> v(word.size() * static_cast<std::size_t>(params.ell), 0.0);
    for (std::size_t i = 0; i < word.size(); ++i) {
        v[i * static_cast<std::size_t>(params.ell)] = params.lambda * word.letters[i];
    }
    return v;
}

}  // namespace sfib
