#include "xtalk/errors.hpp"
#include "xtalk/special.hpp"
#include "xtalk/zz.hpp"

#include <doctest.h>

#include <cmath>

using namespace xtalk;

TEST_CASE("nearest-neighbour ZZ: Q1-Q2 at J = 0.6 MHz") {
    const PairSpectrum p{4888.2, 4795.6, -196.6, -197.2, 0.6};
    const double hand = 2.0 * (-393.8) * 0.36 / ((92.6 - 196.6) * (92.6 + 197.2));
    const auto r = zz_nn(p);
    CHECK(r.zeta == doctest::Approx(hand).epsilon(1e-14));
    CHECK(r.zeta * 1e3 == doctest::Approx(9.4).epsilon(0.01));
    CHECK(r.margin == doctest::Approx(104.0));
    CHECK(p.straddling());
}

TEST_CASE("nearest-neighbour ZZ trivial cases") {
    CHECK(zz_nn({4900, 4800, -200, -200, 0.0}).zeta == 0.0);
    CHECK(zz_nn({4900, 4800, -200, 200, 0.7}).zeta == 0.0);
}

TEST_CASE("nearest-neighbour ZZ pole diagnostics") {
    try {
        (void)zz_nn({4900, 4700.5, -199.8, -200, 0.6});
        FAIL("expected PoleProximityError");
    } catch (const PoleProximityError& e) {
        CHECK(e.factor() == "delta+alpha1");
        CHECK(std::abs(e.value()) < 1.0);
    }
    try {
        (void)zz_nn({4700, 4900.3, -200, -200, 0.6});
        FAIL("expected PoleProximityError");
    } catch (const PoleProximityError& e) {
        CHECK(e.factor() == "delta-alpha2");
    }
    CHECK_NOTHROW(zz_nn({4700, 4900.3, -200, -200, 0.6}, 0.1));
}

TEST_CASE("next-nearest-neighbour ZZ reduces to the pair formula without a mediator") {
    const TripletSpectrum t{4810, 4960, 4890, -196, -195, -197, 0.0, 0.0, 0.4};
    const auto r = zz_nnn(t);
    CHECK(r.lambda == 0.0);
    CHECK(r.zeta == doctest::Approx(zz_nn({4810, 4890, -196, -197, 0.4}).zeta).epsilon(1e-14));
}

TEST_CASE("next-nearest-neighbour ZZ decomposition") {
    const TripletSpectrum t{4810, 4960, 4890, -196, -196, -196, 0.6, 0.6, 0.0};
    const double lam = -0.36 / (2.0 * (-150.0) * 70.0);
    CHECK(t.lambda() == doctest::Approx(lam).epsilon(1e-14));
    CHECK(t.j13_effective() == doctest::Approx(lam * (-150.0 - 70.0)).epsilon(1e-14));
    const auto r = zz_nnn(t);
    CHECK(r.zeta == doctest::Approx(r.direct + r.asymmetry + r.lambda_sq).epsilon(1e-14));
    CHECK(r.zeta != 0.0);
}

TEST_CASE("next-nearest-neighbour ZZ degeneracy and poles") {
    CHECK_THROWS_AS(zz_nnn({4800, 4950, 4800, -196, -196, -196, 0.6, 0.6, 0.0}), DegeneratePairError);
    try {
        // Δ12 − Δ23 − α2 = ω1 − 2ω2 + ω3 + 196 = 0.3
        (void)zz_nnn({4810, 4960, 4914.3, -196, -196, -196, 0.6, 0.6, 0.0});
        FAIL("expected PoleProximityError");
    } catch (const PoleProximityError& e) {
        CHECK(e.factor() == "delta12-delta23-alpha2");
    }
}

TEST_CASE("scaled ZZ envelope") {
    const PairSpectrum p{4888.2, 4795.6, -196.6, -197.2, 0.6};
    ScalingLaw law;
    law.d0 = 1.5;
    law.reference_spacing = 2.0;
    law.normalize_at_nn = true;
    CHECK(zz_scaled(p, 2.0, law).zeta == doctest::Approx(zz_nn(p).zeta).epsilon(1e-14));
    law.normalize_at_nn = false;
    const auto s = zz_scaled(p, 1.5, law);
    CHECK(s.envelope == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(s.zeta == doctest::Approx(zz_nn(p).zeta * std::exp(-2.0)).epsilon(1e-13));
    CHECK(zz_scaled(p, 1e-12, law).zeta == doctest::Approx(zz_nn(p).zeta).epsilon(1e-10));
    law.dispersion_reference = 4800.0;
    CHECK(zz_scaled(p, 1.5, law).j_used == doctest::Approx(0.6 * std::sqrt(4888.2 * 4795.6) / 4800.0).epsilon(1e-14));
}

TEST_CASE("unified J law") {
    ScalingLaw law;
    law.j0 = 0.623;
    law.d0 = 1.7;
    CHECK(j_unified(4900, 4800, 2.0, law) / j_unified(4900, 4800, 5.0, law) ==
          doctest::Approx(k0(2.0 / 1.7) / k0(5.0 / 1.7)).epsilon(1e-13));
    const double x = 25.0;
    CHECK(j_unified(4900, 4800, x * law.d0, law) / (law.j0 * std::sqrt(M_PI / (2 * x)) * std::exp(-x)) ==
          doctest::Approx(1.0).epsilon(0.01));
    const double j0 = calibrate_j0(0.623, 2.0, 1.7);
    law.j0 = j0;
    CHECK(j_unified(4900, 4800, 2.0, law) == doctest::Approx(0.623).epsilon(1e-14));
    law.f = [](double dw) { return 1.0 / (1.0 + std::abs(dw) / 100.0); };
    CHECK(j_unified(4900, 4800, 2.0, law) == doctest::Approx(0.623 / 2.0).epsilon(1e-14));
}

TEST_CASE("spectator error") {
    const TripletSpectrum none{4888.2, 4795.6, 4855.3, -196.6, -197.2, -196.4, 0.6, 0.6, 0.0};
    CHECK(spectator_error(none).absolute == 0.0);
    const TripletSpectrum t{4888.2, 4795.6, 4855.3, -196.6, -197.2, -196.4, 0.6, 0.6, 0.05};
    const auto e = spectator_error(t);
    CHECK(e.relative < 0.05);
    auto t2 = t;
    t2.j13 = 0.1;
    CHECK(spectator_error(t2).absolute == doctest::Approx(2.0 * e.absolute).epsilon(1e-14));
    const double d12 = t.omega1 - t.omega2, d13 = t.omega1 - t.omega3, d23 = t.omega2 - t.omega3;
    CHECK(e.lambda_prime == doctest::Approx(t.j13 * t.j23 / (2 * d13 * d23)).epsilon(1e-14));
    const double pref = 2 * (t.alpha1 + t.alpha2) / ((d12 + t.alpha1) * (d12 - t.alpha2));
    CHECK(e.absolute ==
          doctest::Approx(pref * t.j12 * (2 * (d12 + d23) - (t.alpha1 + t.alpha2)) * e.lambda_prime).epsilon(1e-13));
}
