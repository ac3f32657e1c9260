#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sfib/oracle.hpp"

using namespace sfib;

namespace {

// det(A - s) by the three-term recursion.
double char_poly(const TridiagonalOperator& op, double s) {
    double prev = 1.0;
    double cur = op.diagonal[0] - s;
    for (std::size_t i = 1; i < op.size(); ++i) {
        const double b = op.offdiagonal[i - 1];
        const double next = (op.diagonal[i] - s) * cur - b * b * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Roots of the characteristic polynomial by sign changes on a fine grid
// followed by bisection; only for small simple spectra.
std::vector<double> poly_roots(const TridiagonalOperator& op, double lo, double hi) {
    std::vector<double> roots;
    const int n = 200000;
    double a = lo;
    double fa = char_poly(op, a);
    for (int i = 1; i <= n; ++i) {
        const double b = lo + (hi - lo) * i / n;
        const double fb = char_poly(op, b);
        if (fa == 0.0)
            roots.push_back(a);
        else if (fa * fb < 0.0) {
            double x = a, y = b, fx = fa;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (x + y);
                const double fm = char_poly(op, m);
                if (fx * fm <= 0.0)
                    y = m;
                else {
                    x = m;
                    fx = fm;
                }
            }
            roots.push_back(0.5 * (x + y));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

}  // namespace

TEST_CASE("build_truncation") {
    const auto op = build_truncation(ModelParams{2.0, 2}, 1, 4);
    CHECK(op.diagonal == std::vector<double>{2, 0, 0, 0});
    CHECK(op.offdiagonal == std::vector<double>{1, 1, 1});

    const auto zero = build_truncation(ModelParams{0.0, 3}, 10, 200);
    CHECK(
        std::all_of(zero.diagonal.begin(), zero.diagonal.end(), [](double v) { return v == 0.0; }));

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int ell : {1, 2, 3, 5}) {
        const std::size_t size = 3000;
        const auto big = build_truncation(ModelParams{4.0, ell}, 20, size);
        const auto nonzero = std::count_if(big.diagonal.begin(), big.diagonal.end(),
                                           [](double v) { return v != 0.0; });
        CHECK(std::abs(static_cast<double>(nonzero) - size / (ell * phi)) <= 2.0);
        CHECK(std::all_of(big.diagonal.begin(), big.diagonal.end(),
                          [](double v) { return v == 0.0 || v == 4.0; }));
    }
    CHECK_THROWS_AS(build_truncation(ModelParams{2.0, 2}, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(build_truncation(ModelParams{2.0, 2}, 1, 0), std::invalid_argument);
}

TEST_CASE("eigenvalue examples") {
    TridiagonalOperator two{{0.0, 0.0}, {1.0}};
    const auto e2 = eigenvalues(two, 1e-12);
    REQUIRE(e2.size() == 2);
    CHECK(e2[0] == doctest::Approx(-1.0));
    CHECK(e2[1] == doctest::Approx(1.0));

    const auto free = build_truncation(ModelParams{0.0, 1}, 12, 100);
    const auto ef = eigenvalues(free, 1e-12);
    REQUIRE(ef.size() == 100);
    for (int j = 1; j <= 100; ++j) {
        const double expect = 2.0 * std::cos(std::numbers::pi * (101 - j) / 101.0);
        CHECK(std::abs(ef[static_cast<std::size_t>(j - 1)] - expect) <= 1e-8);
    }

    const ModelParams p{4.0, 2};
    const auto ev = eigenvalues(build_truncation(p, 14, 500), 1e-10);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    CHECK(ev.front() >= -2.0 - 1e-9);
    CHECK(ev.back() <= p.lambda + 2.0 + 1e-9);
    CHECK_THROWS_AS(eigenvalues(two, 0.0), std::invalid_argument);
}

TEST_CASE("Sturm count against the determinant recursion") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        TridiagonalOperator op;
        for (std::size_t i = 0; i < n; ++i) op.diagonal.push_back(u(rng));
        op.offdiagonal.assign(n - 1, 1.0);
        const auto ev = eigenvalues(op, 1e-12);
        const auto roots = poly_roots(op, -6.0, 6.0);
        REQUIRE(roots.size() == n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ev[i] - roots[i]) <= 1e-8);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(sturm_count(op, ev[i] - 1e-6) == i);
            CHECK(sturm_count(op, ev[i] + 1e-6) >= i + 1);
        }
    }
}

TEST_CASE("interlacing") {
    const auto op = build_truncation(ModelParams{3.0, 3}, 16, 200);
    for (std::size_t n : {10u, 57u, 200u}) {
        TridiagonalOperator a{{op.diagonal.begin(), op.diagonal.begin() + n},
                              std::vector<double>(n - 1, 1.0)};
        TridiagonalOperator b{{op.diagonal.begin(), op.diagonal.begin() + (n - 1)},
                              std::vector<double>(n - 2, 1.0)};
        const auto ea = eigenvalues(a, 1e-12);
        const auto eb = eigenvalues(b, 1e-12);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            CHECK(ea[i] <= eb[i] + 1e-10);
            CHECK(eb[i] <= ea[i + 1] + 1e-10);
        }
    }
}

TEST_CASE("deterministic across worker counts") {
    const auto op = build_truncation(ModelParams{4.0, 1}, 18, 1500);
    CHECK(eigenvalues(op, 1e-11, 1) == eigenvalues(op, 1e-11, 5));
}

TEST_CASE("spectral consistency") {
    const auto free = eigenvalues(build_truncation(ModelParams{0.0, 1}, 12, 100), 1e-12);
    const auto rep = spectral_consistency(free, cover(4, ModelParams{0.0, 1}, 1e-10), 1e-9);
    CHECK(rep.fraction_inside == 1.0);
    CHECK_FALSE(rep.flagged);

    const ModelParams p{4.0, 1};
    const auto c12 = cover(12, p, 1e-10);
    const auto ev = eigenvalues(build_truncation(p, 17, 2500), 1e-11);
    const auto r = spectral_consistency(ev, c12, 1e-2);
    CHECK(r.n_eigenvalues == 2500);
    CHECK(r.fraction_inside >= 0.95);
    CHECK_FALSE(r.flagged);

    const auto empty = spectral_consistency({}, c12, 1e-2);
    CHECK(empty.fraction_inside == 1.0);
    CHECK(empty.worst_distance == 0.0);
    CHECK(empty.n_eigenvalues == 0);
}

TEST_CASE("window invariance") {
    const ModelParams p{4.0, 2};
    const auto c = cover(11, p, 1e-10);
    const auto potential = sieve(p, substitution_word(20));
    const std::size_t size = 1200;
    const std::size_t start = 5000;
    std::size_t prev_outside = 0;
    for (std::size_t shift : {std::size_t{0}, static_cast<std::size_t>(p.ell)}) {
        TridiagonalOperator op;
        op.diagonal.assign(potential.begin() + static_cast<std::ptrdiff_t>(start + shift),
                           potential.begin() + static_cast<std::ptrdiff_t>(start + shift + size));
        op.offdiagonal.assign(size - 1, 1.0);
        const auto r = spectral_consistency(eigenvalues(op, 1e-11), c, 1e-2);
        const auto outside =
            static_cast<std::size_t>(std::lround((1.0 - r.fraction_inside) * size));
        if (shift > 0)
            CHECK(std::abs(static_cast<long>(outside) - static_cast<long>(prev_outside)) <= 4);
        prev_outside = outside;
    }
}

TEST_CASE("eigenvalue csv") { CHECK(eigenvalues_to_csv({-1.0, 0.5}) == "-1\n0.5\n"); }
