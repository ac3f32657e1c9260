#include <doctest.h>

#include <cmath>
#include <random>

#include "sfib/tracemap.hpp"

using namespace sfib;

using T3 = TraceTriple<double>;

TEST_CASE("trace map step") {
    CHECK(trace_map_step(T3(1, 1, 1)) == T3(1, 1, 1));
    CHECK(trace_map_step(T3(2, 3, 1)) == T3(11, 2, 3));
    CHECK(fvi(T3(2, 3, 1)) == 1.0);
    CHECK(fvi(T3(11, 2, 3)) == 1.0);
}

TEST_CASE("FVI conservation on random triples") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100000; ++i) {
        const T3 p(u(rng), u(rng), u(rng));
        const double v = fvi(p);
        CHECK(std::abs(fvi(trace_map_step(p)) - v) <= 1e-9 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("curve of initial conditions") {
    const ModelParams p1{2.5, 1};
    for (double e : {-1.0, 0.4, 6.0}) {
        const T3 g = curve_of_initial_conditions(e, p1);
        CHECK(g(0) == doctest::Approx((e - 2.5) / 2));
        CHECK(g(1) == doctest::Approx(e / 2));
        CHECK(g(2) == 1.0);
    }
    const T3 g = curve_of_initial_conditions(0.0, ModelParams{2.0, 2});
    CHECK(g(0) == doctest::Approx(-1.0));
    CHECK(g(1) == doctest::Approx(-1.0));
    CHECK(g(2) == 1.0);

    std::mt19937_64 rng(19);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p{std::uniform_real_distribution<double>(0.0, 8.0)(rng),
                            1 + static_cast<int>(rng() % 6)};
        const double e = std::uniform_real_distribution<double>(-3.0, p.lambda + 3.0)(rng);
        const double v = fvi_energy(e, p);
        CHECK(std::abs(fvi(curve_of_initial_conditions(e, p)) - v) <= 1e-9 * std::max(1.0, v));
    }
}

TEST_CASE("orbit classification examples") {
    for (int k_max : {2, 10, 40, 80}) {
        CHECK(classify_orbit(1.0, ModelParams{0.0, 1}, k_max) ==
              OrbitClassification::bounded_up_to(k_max));
    }
    CHECK(classify_orbit(10.0, ModelParams{4.0, 1}) == OrbitClassification::escaped_at(0));
    CHECK(classify_orbit(0.0, ModelParams{2.0, 2}, 50) == OrbitClassification::bounded_up_to(50));
    CHECK_THROWS_AS(classify_orbit(0.0, ModelParams{}, 1), std::invalid_argument);
}

TEST_CASE("escape permanence and monotone classification") {
    std::mt19937_64 rng(23);
    int escaped = 0;
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p{std::uniform_real_distribution<double>(0.5, 8.0)(rng),
                            1 + static_cast<int>(rng() % 5)};
        const double e = std::uniform_real_distribution<double>(-3.0, p.lambda + 3.0)(rng);
        const auto run = half_traces_recursive(e, p, 30);
        if (!run.escape_index) continue;
        ++escaped;
        const int k = *run.escape_index;
        CHECK(std::abs(run.x(k)) > 1.0);
        for (int m = k + 1; m <= run.last_k(); ++m) CHECK(std::abs(run.x(m)) > 1.0);
        for (int k_max : {k + 1, k + 2, k + 7, 30}) {
            if (k_max < 2) continue;
            CHECK(classify_orbit(e, p, k_max) == OrbitClassification::escaped_at(k));
        }
    }
    CHECK(escaped > 1000);
}

TEST_CASE("superexponential escape rate") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::mt19937_64 rng(29);
    int samples = 0;
    for (int i = 0; i < 500; ++i) {
        const ModelParams p{std::uniform_real_distribution<double>(0.5, 8.0)(rng),
                            1 + static_cast<int>(rng() % 5)};
        const double e = std::uniform_real_distribution<double>(-3.0, p.lambda + 3.0)(rng);
        const auto logs = half_traces_log(e, p, 40);
        for (int k = 3; k < 40; ++k) {
            // settled regime: four consecutive magnitudes beyond 1e3
            bool settled = true;
            for (int j = k - 3; j <= k; ++j) {
                settled = settled && logs[static_cast<std::size_t>(j + 1)].log_abs > std::log(1e3);
            }
            if (!settled) continue;
            const double ratio = logs[static_cast<std::size_t>(k + 2)].log_abs /
                                 logs[static_cast<std::size_t>(k + 1)].log_abs;
            CHECK(std::abs(ratio - phi) <= 0.1 * phi);
            ++samples;
            break;
        }
    }
    CHECK(samples > 100);
}
