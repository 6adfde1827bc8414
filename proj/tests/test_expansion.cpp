#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "jacform/expansion.hpp"
#include "jacform/serialize.hpp"
#include "random_forms.hpp"

using namespace jacform;

TEST_CASE("FormSignature validation") {
    CHECK_THROWS_AS(FormSignature(0, 1, 1), ArgumentError);
    CHECK_THROWS_AS(FormSignature(4, 0, 1), ArgumentError);
    CHECK_THROWS_AS(FormSignature(4, 1, 0), ArgumentError);
    // N = 1 admits only the trivial character
    CHECK_THROWS_AS(FormSignature(4, 1, 1, QuadCharacter(-3)), ArgumentError);
    CHECK_NOTHROW(FormSignature(4, 1, 1, QuadCharacter::trivial()));
    // character modulus must divide the level
    CHECK_NOTHROW(FormSignature(4, 1, 3, QuadCharacter(-3)));
    CHECK_THROWS_AS(FormSignature(4, 1, 3, QuadCharacter(-4)), ArgumentError);
    // level must be a multiple of N^2
    CHECK_THROWS_AS(FormSignature(4, 1, 2, std::nullopt, 6), ArgumentError);
    CHECK_NOTHROW(FormSignature(4, 1, 2, std::nullopt, 12));

    FormSignature sig(4, 2, 3);
    CHECK(sig.key_modulus() == 12);
    CHECK(sig.level() == 9);
    CHECK(sig.character_disc() == 1);
    CHECK(sig.chi(5) == 1);
    CHECK(FormSignature(4, 1, 1) == FormSignature(4, 1, 1, QuadCharacter::trivial()));
    CHECK(FormSignature(4, 1, 1) != FormSignature(6, 1, 1));
    CHECK(FormSignature(4, 1, 3) != FormSignature(4, 1, 3, QuadCharacter(-3)));
}

TEST_CASE("coeff/set_coeff orbit aliasing") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 10);
    phi.set_coeff(1, 1, Rational(56));
    // lattice shift lambda = 1: (1,1) -> (3,3); lambda = -1 covers (1,-1)
    CHECK(phi.coeff(3, 3) == Rational(56));
    CHECK(phi.coeff(1, -1) == Rational(56));
    CHECK(phi.coeff(7, 5) == Rational(56));
    // same orbit set twice with the same value is fine
    CHECK_NOTHROW(phi.set_coeff(3, 3, Rational(56)));
    // conflicting assignment to the orbit is an error
    CHECK_THROWS_AS(phi.set_coeff(3, 3, Rational(57)), ConsistencyError);
    // a different orbit with the same D is independent
    phi.set_coeff(1, 0, Rational(126));
    CHECK(phi.coeff(1, 0) == Rational(126));
    CHECK(phi.coeff(2, 2) == Rational(126));
    CHECK(phi.coeff(1, 1) == Rational(56));
}

TEST_CASE("holomorphy and truncation") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 10);
    phi.set_coeff(1, 1, Rational(56));
    // r^2 > 4mn is identically zero, even outside the bound
    CHECK(phi.coeff(0, 1) == Rational(0));
    CHECK(phi.coeff(-5, 1) == Rational(0));
    CHECK(phi.coeff(2, 100) == Rational(0));
    CHECK_THROWS_AS(phi.set_coeff(0, 1, Rational(1)), ArgumentError);
    CHECK_NOTHROW(phi.set_coeff(0, 1, Rational(0)));
    // |D| beyond the bound is unknown, not zero
    CHECK_THROWS_AS(phi.coeff(3, 1), TruncationError);
    CHECK_THROWS_AS(phi.set_coeff(3, 1, Rational(1)), ArgumentError);
    // absent key within bound reads as zero
    CHECK(phi.coeff(1, 2) == Rational(0));
}

TEST_CASE("sealing") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 10);
    phi.set_coeff(1, 1, Rational(0));
    phi.set_coeff(1, 0, Rational(5));
    CHECK_FALSE(phi.sealed());
    phi.seal();
    CHECK(phi.sealed());
    CHECK(phi.coefficients().size() == 1);  // the zero orbit was pruned
    CHECK_THROWS_AS(phi.set_coeff(2, 1, Rational(1)), std::logic_error);
    CHECK(phi.coeff(1, 1) == Rational(0));
    CHECK(phi.coeff(1, 0) == Rational(5));
    CHECK_FALSE(phi.is_zero());
    CHECK(zero_expansion(FormSignature(4, 1, 1), 10).is_zero());
}

TEST_CASE("orbit well-definedness on random expansions") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> pick_n(0, 30);
    std::uniform_int_distribution<long long> pick_r(-25, 25);
    std::uniform_int_distribution<long long> pick_lambda(-4, 4);
    std::uniform_int_distribution<std::uint64_t> pick_mn(1, 5);
    for (int iter = 0; iter < 60; ++iter) {
        std::uint64_t m = pick_mn(rng), N = pick_mn(rng);
        auto phi = testutil::random_expansion(rng, 4, m, N, 300);
        for (int trial = 0; trial < 200; ++trial) {
            long long n = pick_n(rng), r = pick_r(rng), lam = pick_lambda(rng);
            long long Nl = static_cast<long long>(N);
            long long ml = static_cast<long long>(m);
            long long n2 = n + r * Nl * lam + ml * Nl * Nl * lam * lam;
            long long r2 = r + 2 * ml * Nl * lam;
            __int128 D = JacobiExpansion::discriminant_wide(n, r, m);
            if (D < 0 && -D > 300) continue;
            CHECK(phi.coeff(n2, r2) == phi.coeff(n, r));
        }
    }
}

TEST_CASE("stored keys satisfy the congruence D = rho^2 mod 4m") {
    std::mt19937_64 rng(12);
    for (int iter = 0; iter < 40; ++iter) {
        std::uint64_t m = 1 + rng() % 5, N = 1 + rng() % 5;
        auto phi = testutil::random_expansion(rng, 4, m, N, 200);
        for (const auto& [key, v] : phi.coefficients()) {
            CHECK(key.D <= 0);
            CHECK(key.rho < 2 * m * N);
            __int128 delta = static_cast<__int128>(key.rho) * key.rho - key.D;
            CHECK(delta % static_cast<__int128>(4 * m) == 0);
            CHECK_FALSE(v.is_zero());
            // representative reconstructs the key
            long long n = phi.rep_n(key);
            CHECK(JacobiExpansion::discriminant_wide(n, static_cast<long long>(key.rho), m) == key.D);
        }
    }
}

TEST_CASE("add and scale") {
    std::mt19937_64 rng(13);
    auto phi = testutil::random_expansion(rng, 4, 2, 1, 60);
    auto zero = zero_expansion(phi.signature(), 60);

    SECTION("phi + 0 = phi") {
        auto sum = add(phi, zero);
        CHECK(sum.coefficients() == phi.coefficients());
    }
    SECTION("scale by zero and cancellation") {
        CHECK(scale(phi, Rational(0)).is_zero());
        CHECK(add(phi, scale(phi, Rational(-1))).is_zero());
    }
    SECTION("signature mismatch") {
        auto psi = testutil::random_expansion(rng, 6, 2, 1, 60);
        CHECK_THROWS_AS(add(phi, psi), ArgumentError);
    }
    SECTION("bound is the minimum") {
        auto psi = testutil::random_expansion(rng, 4, 2, 1, 40);
        CHECK(add(phi, psi).bound() == 40);
    }
    SECTION("linearity of values") {
        auto psi = testutil::random_expansion(rng, 4, 2, 1, 60);
        auto sum = add(phi, scale(psi, Rational(3, 7)));
        for (const auto& [key, v] : sum.coefficients()) {
            long long rho = static_cast<long long>(key.rho);
            CHECK(v == phi.coeff_key(key.D, rho) + Rational(3, 7) * psi.coeff_key(key.D, rho));
        }
    }
}

TEST_CASE("nu_ell_form") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 10);
    phi.seal();
    CHECK(nu_ell_form(phi, 5) == Valuation::infinity());

    JacobiExpansion psi(FormSignature(4, 1, 1), 10);
    psi.set_coeff(1, 1, Rational(56));
    psi.seal();
    CHECK(nu_ell_form(psi, 7) == Valuation(1));
    CHECK(nu_ell_form(psi, 2) == Valuation(3));
    CHECK(nu_ell_form(psi, 3) == Valuation(0));
    CHECK_THROWS_AS(nu_ell_form(psi, 6), ArgumentError);

    std::mt19937_64 rng(14);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = testutil::random_expansion(rng, 4, 1, 2, 80);
        auto b = testutil::random_expansion(rng, 4, 1, 2, 80);
        Valuation lhs = nu_ell_form(add(a, b), 3);
        CHECK(lhs >= std::min(nu_ell_form(a, 3), nu_ell_form(b, 3)));
    }
}

TEST_CASE("promote refines the lattice without changing the function") {
    std::mt19937_64 rng(15);
    auto phi = testutil::random_expansion(rng, 4, 2, 1, 100);
    auto fine = promote(phi, 3);
    CHECK(fine.signature().lattice() == 3);
    CHECK(fine.signature().level() == 9);
    CHECK(fine.signature().index() == 2);
    CHECK(fine.coefficients().size() == 3 * phi.coefficients().size());
    CHECK(forms_agree(phi, fine, 100));
    CHECK_THROWS_AS(promote(fine, 2), ArgumentError);
    // promotion by 1 is the identity
    auto same = promote(phi, 1);
    CHECK(same.coefficients() == phi.coefficients());
}

TEST_CASE("forms_agree detects differences") {
    std::mt19937_64 rng(16);
    auto phi = testutil::random_expansion(rng, 4, 1, 1, 50, 0.9);
    CHECK(forms_agree(phi, phi, 50));
    JacobiExpansion tweaked(phi.signature(), phi.bound());
    bool flipped = false;
    for (const auto& [key, v] : phi.coefficients()) {
        if (!flipped && key.D < -10) {
            tweaked.set_coeff_key(key.D, static_cast<long long>(key.rho), v + Rational(1));
            flipped = true;
        } else {
            tweaked.set_coeff_key(key.D, static_cast<long long>(key.rho), v);
        }
    }
    tweaked.seal();
    REQUIRE(flipped);
    CHECK_FALSE(forms_agree(phi, tweaked, 50));
    CHECK_THROWS_AS(forms_agree(phi, tweaked, 51), TruncationError);
}

TEST_CASE("JSON round trip") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 25; ++iter) {
        std::uint64_t m = 1 + rng() % 4, N = 1 + rng() % 3;
        auto phi = testutil::random_expansion(rng, 4 + 2 * (iter % 3), m, N, 120);
        auto j = expansion_to_json(phi);
        auto back = expansion_from_json(j);
        CHECK(back.signature() == phi.signature());
        CHECK(back.bound() == phi.bound());
        CHECK(back.coefficients() == phi.coefficients());
        // byte-stable: same dump both times
        CHECK(j.dump(1) == expansion_to_json(back).dump(1));
    }
}

TEST_CASE("JSON layout details") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 8);
    phi.set_coeff(1, 1, Rational(56));
    phi.set_coeff(1, 0, Rational(126));
    phi.set_coeff(0, 0, Rational(1));
    phi.seal();
    auto j = expansion_to_json(phi);
    CHECK(j["signature"]["k"] == 4);
    CHECK(j["signature"]["char_disc"] == 1);
    CHECK_FALSE(j["signature"].contains("gamma"));
    CHECK(j["bound"] == 8);
    // ordering by (|D|, rho) ascending, values as "num/den"
    REQUIRE(j["coeffs"].size() == 3);
    CHECK(j["coeffs"][0][0] == 0);
    CHECK(j["coeffs"][0][2] == "1/1");
    CHECK(j["coeffs"][1][0] == -3);
    CHECK(j["coeffs"][1][1] == 1);
    CHECK(j["coeffs"][1][2] == "56/1");
    CHECK(j["coeffs"][2][0] == -4);
    CHECK(j["coeffs"][2][1] == 0);
    CHECK(j["coeffs"][2][2] == "126/1");

    // non-default level survives the round trip
    JacobiExpansion raised(FormSignature(4, 1, 1, std::nullopt, 3), 8);
    raised.set_coeff(1, 1, Rational(1, 2));
    raised.seal();
    auto j2 = expansion_to_json(raised);
    CHECK(j2["signature"]["gamma"] == 3);
    CHECK(expansion_from_json(j2).signature() == raised.signature());

    // malformed documents are consistency errors
    CHECK_THROWS_AS(expansion_from_json(nlohmann::json::parse("{}")), ConsistencyError);
    auto bad = expansion_to_json(phi);
    bad["coeffs"][0][0] = 5;  // positive D
    CHECK_THROWS_AS(expansion_from_json(bad), ConsistencyError);
    auto bad2 = expansion_to_json(phi);
    bad2["coeffs"][0][2] = "not-a-number";
    CHECK_THROWS_AS(expansion_from_json(bad2), ConsistencyError);
}

TEST_CASE("CSV table") {
    JacobiExpansion phi(FormSignature(4, 1, 1), 8);
    phi.set_coeff(1, 1, Rational(-56, 3));
    phi.set_coeff(0, 0, Rational(1));
    phi.seal();
    CHECK(expansion_to_csv(phi) == "D,rho,numerator,denominator\n0,0,1,1\n-3,1,-56,3\n");
}

TEST_CASE("file round trip") {
    std::mt19937_64 rng(18);
    auto phi = testutil::random_expansion(rng, 4, 3, 1, 90);
    const std::string path = "test_expansion_tmp.json";
    write_expansion(path, phi);
    auto back = read_expansion(path);
    CHECK(back.signature() == phi.signature());
    CHECK(back.coefficients() == phi.coefficients());
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_expansion("does_not_exist_anywhere.json"), ArgumentError);
}
