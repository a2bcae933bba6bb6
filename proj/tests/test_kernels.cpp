#include <doctest.h>

#include <cmath>
#include <random>

#include "sakr/errors.hpp"
#include "sakr/kernels.hpp"
#include "test_support.hpp"

using namespace sakr;

TEST_CASE("scalar kernels match the plain-double oracle") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{8},
                          std::size_t{257}}) {
        auto a = testsup::random_unit_vec(rng, n);
        auto b = testsup::random_unit_vec(rng, n);
        CHECK(kernels::scalar().dot(a.data(), b.data(), n) ==
              doctest::Approx(testsup::oracle_dot(a, b)).epsilon(1e-14));
        CHECK(kernels::scalar().squared_norm(a.data(), n) ==
              doctest::Approx(testsup::oracle_dot(a, a)).epsilon(1e-14));
    }
}

TEST_CASE("every SIMD variant agrees with the scalar reference") {
    std::mt19937_64 rng(2);
    const auto& tables = kernels::available();
    REQUIRE(!tables.empty());
    CHECK(std::string(tables.front()->name) == "scalar");

    for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{7},
                          std::size_t{8}, std::size_t{9}, std::size_t{31},
                          std::size_t{64}, std::size_t{256}, std::size_t{1000}}) {
        auto a = testsup::random_unit_vec(rng, n);
        auto b = testsup::random_unit_vec(rng, n);
        double ref_dot = kernels::scalar().dot(a.data(), b.data(), n);
        double ref_sq = kernels::scalar().squared_norm(a.data(), n);
        std::vector<double> ref_acc(n, 0.5);
        kernels::scalar().accumulate(ref_acc.data(), b.data(), n);

        for (const auto* table : tables) {
            INFO("variant ", table->name, " n ", n);
            CHECK(table->dot(a.data(), b.data(), n) ==
                  doctest::Approx(ref_dot).epsilon(1e-12));
            CHECK(table->squared_norm(a.data(), n) ==
                  doctest::Approx(ref_sq).epsilon(1e-12));
            std::vector<double> acc(n, 0.5);
            table->accumulate(acc.data(), b.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(acc[i] == doctest::Approx(ref_acc[i]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("kernel selection honors set_active and rejects unknown names") {
    const auto& before = kernels::active();
    kernels::set_active("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    CHECK_THROWS_AS(kernels::set_active("avx512-unobtanium"), Error);
    kernels::set_active(before.name);
    CHECK(std::string(kernels::active().name) == std::string(before.name));
}

TEST_CASE("dot of empty spans is zero") {
    float dummy = 0.0f;
    for (const auto* table : kernels::available()) {
        CHECK(table->dot(&dummy, &dummy, 0) == 0.0);
        CHECK(table->squared_norm(&dummy, 0) == 0.0);
    }
}
