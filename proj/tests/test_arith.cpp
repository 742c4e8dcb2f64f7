#include <doctest.h>

#include <cmath>

#include "declab/arith.hpp"
#include "declab/common.hpp"
#include "fixture_io.hpp"

using namespace declab;

TEST_CASE("count_J small values") {
    CHECK(count_J(1) == 1);
    CHECK(count_J(2) == 20);
    CHECK(count_J(3) == 93);
    CHECK(count_J_bruteforce(1) == 1);
    CHECK(count_J_bruteforce(2) == 20);
    CHECK(count_J_bruteforce(3) == 93);
}

TEST_CASE("count_J matches fixture and brute force") {
    for (auto& r : fixture::read_csv("count_j.csv")) {
        int64_t X = std::stoll(r["X"]);
        BigInt want(r["count"]);
        CHECK(count_J(X) == want);
        if (X <= 12) CHECK(count_J_bruteforce(X) == want);
    }
}

TEST_CASE("brute force cap") {
    CHECK_THROWS_AS(count_J_bruteforce(13), Error);
    ArithCaps caps;
    caps.max_x = 10;
    CHECK_THROWS_AS(count_J(11, caps), Error);
}

TEST_CASE("diagonal lower bound") {
    for (int64_t X = 3; X <= 40; X += 7) {
        BigInt c = count_J(X);
        BigInt tri = BigInt(X) * (X - 1) * (X - 2) / 6;
        CHECK(c >= 6 * tri);
    }
}

TEST_CASE("I1 class counts") {
    CHECK(count_I1_class({1, 2, 1, 1, 1, 0}) == 0);
    CHECK(count_I1_class({4, 2, 1, 1, 1, 0}) == 12);
    for (int64_t X : {5, 17, 33}) CHECK(count_I1_class({X, 3, 0, 0, 0, 0}) == count_J(X));
    CHECK_THROWS_AS(count_I1_class({10, 4, 1, 1, 0, 0}), Error);
    CHECK_THROWS_AS(count_I1_class({10, 2, 1, 1, 2, 0}), Error);
}

TEST_CASE("sum over x-classes equals direct constrained count") {
    for (int64_t X : {7, 12, 20}) {
        for (int64_t p : {2, 3}) {
            for (int a = 0; a <= 2; ++a) {
                int b = 1;
                for (int64_t eta = 0; eta < p; ++eta) {
                    BigInt sum = 0;
                    for (int64_t xi = 0; xi < ipow(p, a); ++xi) sum += count_I1_class({X, p, a, b, xi, eta});
                    CHECK(sum == count_I1_xdiag_bruteforce(X, p, a, b, eta));
                }
            }
        }
    }
}

TEST_CASE("I1 max matches fixture") {
    for (auto& r : fixture::read_csv("i1_max.csv")) {
        auto m = count_I1_max(std::stoll(r["X"]), std::stoll(r["p"]), std::stoi(r["a"]), std::stoi(r["b"]));
        CHECK(m.count == BigInt(r["count"]));
        CHECK(m.xi == std::stoll(r["xi"]));
        CHECK(m.eta == std::stoll(r["eta"]));
    }
    CHECK(count_I1_max(1, 2, 1, 1).count == 0);
}

TEST_CASE("lifting identity on admissible tuples") {
    CHECK(lifting_identity_check({20, 2, 0, 1, 0, 1}).equal);
    CHECK(lifting_identity_check({30, 3, 1, 1, 1, 0}).equal);
    CHECK(lifting_identity_check({1, 5, 1, 1, 1, 0}).equal);
    int n = 0;
    for (int64_t p : {2, 3, 5}) {
        for (int a = 0; a <= 2; ++a) {
            for (int b = 1; b <= 2; ++b) {
                for (int64_t xi = 0; xi < ipow(p, a); ++xi) {
                    for (int64_t eta = 0; eta < ipow(p, b); ++eta) {
                        if (!lifting_admissible(p, a, b, xi, eta)) continue;
                        auto res = lifting_identity_check({40, p, a, b, xi, eta});
                        CHECK(res.admissible);
                        CHECK(res.lhs == res.rhs);
                        ++n;
                    }
                }
            }
        }
    }
    CHECK(n > 50);
}

TEST_CASE("lifting can fail outside the admissible range") {
    // eta = xi mod p with b = 1: x1 and x2 need not agree mod p^2.
    auto res = lifting_identity_check({40, 2, 1, 1, 1, 1});
    CHECK_FALSE(res.admissible);
    CHECK(res.lhs > res.rhs);
}

TEST_CASE("congruencing ratios match fixture") {
    for (auto& r : fixture::read_csv("congruencing_ratios.csv")) {
        auto c = congruencing_step_ratio(std::stoll(r["X"]), std::stoll(r["p"]), std::stoi(r["a"]), std::stoi(r["b"]));
        CHECK(c.numerator == BigInt(r["numerator"]));
        CHECK(c.denominator == BigInt(r["denominator"]));
        CHECK(c.ratio == std::stod(r["ratio"]));
        CHECK(c.flagged == (c.ratio > 1.0));
    }
    CHECK(congruencing_step_ratio(30, 2, 2, 1).ratio == 1.0);
    CHECK_THROWS_AS(congruencing_step_ratio(3, 2, 1, 1), Error);
}

TEST_CASE("weighted sixth moment") {
    auto delta0 = CoefficientVector::zeros(3);
    delta0.a[3] = 1.0;
    CHECK(weighted_sixth_moment(delta0).real() == 1.0);
    CHECK(std::abs(torus_grid_integral(delta0) - 1.0) < 1e-12);

    auto ones1 = CoefficientVector::ones_on(1, -1, 1);
    CHECK(weighted_sixth_moment(ones1).real() == 93.0);
    CHECK(std::abs(torus_grid_integral(ones1) - 93.0) < 1e-9);

    for (int64_t X : {1, 5, 13, 29}) {
        auto c = CoefficientVector::ones_on(X, 1, X);
        CHECK(BigInt(static_cast<long long>(weighted_sixth_moment(c).real())) == count_J(X));
    }
}

TEST_CASE("moment equals torus integral for random coefficients") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        auto c = CoefficientVector::random(8 + static_cast<int64_t>(seed), seed);
        cplx m = weighted_sixth_moment(c);
        double t = torus_grid_integral(c);
        CHECK(m.real() >= 0);
        CHECK(std::abs(m.imag()) <= 1e-8 * m.real());
        CHECK(std::abs(m.real() - t) <= 1e-8 * t);
    }
}

TEST_CASE("discrete restriction ratio") {
    for (auto& r : fixture::read_csv("discrete_restriction.csv")) {
        int64_t N = std::stoll(r["N"]);
        if (N < 3) continue;
        auto d = discrete_restriction_ratio(N);
        CHECK(d.moment == std::stod(r["moment"]));
        CHECK(std::abs(d.ratio - std::stod(r["ratio"])) < 1e-14);
        CHECK(d.reference == doctest::Approx(std::exp(30 * std::log(double(N)) / std::log(std::log(double(N))))));
    }
    CHECK_THROWS_AS(discrete_restriction_ratio(2), Error);
}
