#include "xtalk/enclosure.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/special.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>

using namespace xtalk;

namespace {

double k0_quadrature(double x) {
    boost::math::quadrature::exp_sinh<double> q;
    return std::exp(-x) * q.integrate([x](double t) {
        const double s = std::sinh(0.5 * t);
        return std::exp(-2.0 * x * s * s);
    });
}

double j0_quadrature(double x) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate([x](double t) { return std::cos(x * std::sin(t)); }, 0.0, M_PI) / M_PI;
}

// Y0(x) = (4/π²) ∫_0^{π/2} cos(x cos t) (γ + ln(2 x sin² t)) dt

} // namespace

TEST_CASE("k0 reference values") {
    CHECK(k0(1.0) == doctest::Approx(0.421024438240708).epsilon(1e-12));
    CHECK(k0(1.0) == doctest::Approx(k0_quadrature(1.0)).epsilon(1e-12));
    CHECK(k0(3.0) / k0(1.0) == doctest::Approx(0.0825).epsilon(1e-3));
    for (double x : {1e-6, 0.5, 1.9999, 2.0001, 7.5, 24.9, 25.1, 100.0, 650.0}) {
        CAPTURE(x);
        CHECK(k0_scaled(x) == doctest::Approx(k0_quadrature(x) * std::exp(x)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(k0(0.0), DomainError);
    CHECK_THROWS_AS(k0(-1.0), DomainError);
}

TEST_CASE("k0 is strictly decreasing") {
    double prev = k0(0.01);
    for (double x = 0.02; x < 60; x += 0.01) {
        const double v = k0(x);
        REQUIRE(v < prev);
        prev = v;
    }
}

TEST_CASE("J0 against its integral representation, Y0 against Boost") {
    for (double x : {0.3, 1.0, 2.5, 8.0, 11.0, 12.5, 20.0, 40.0}) {
        CAPTURE(x);
        CHECK(std::abs(xtalk::j0(x) - j0_quadrature(x)) < 1e-8);
        CHECK(std::abs(xtalk::y0(x) - boost::math::cyl_neumann(0, x)) < 1e-8);
    }
    const auto h = hankel1_0(1.0);
    CHECK(std::abs(h.real() - j0_quadrature(1.0)) < 1e-8);
    CHECK(std::abs(h.imag() - boost::math::cyl_neumann(0, 1.0)) < 1e-8);
}

TEST_CASE("enclosure spec: cutoff and velocity") {
    const auto es = enclosure_with_cutoff(34000, 0.35, 2.0);
    CHECK(es.omega_c() == doctest::Approx(34000).epsilon(1e-14));
    CHECK(es.omega0 == doctest::Approx(34000 * std::sqrt(2.4)).epsilon(1e-14));
    CHECK(es.velocity() * es.velocity() ==
          doctest::Approx(34000.0 * 34000.0 * 4.0 / (4 * 0.35) * 2.4).epsilon(1e-13));
    CHECK(es.omega_c() <= es.omega0);
}

TEST_CASE("mode frequencies") {
    EnclosureSpec flat;
    flat.omega0 = 10000;
    flat.beta = 0.0;
    const auto m0 = mode_frequencies(flat, 3, 4);
    CHECK(m0.frequencies.size() == 12);
    for (double w : m0.frequencies) CHECK(w == 10000.0);

    EnclosureSpec s;
    s.omega0 = 10000;
    s.beta = 0.2;
    const auto m = mode_frequencies(s, 50, 50);
    CHECK(m.frequencies.size() == 2500);
    CHECK(std::is_sorted(m.frequencies.begin(), m.frequencies.end()));
    const double lowest = s.omega0 / std::sqrt(1 + 2 * s.beta * 2 * std::cos(M_PI / 50));
    CHECK(m.frequencies.front() == doctest::Approx(lowest).epsilon(1e-12));
    CHECK(std::abs(m.frequencies.front() - s.omega_c()) / s.omega_c() < 1e-3);

    const auto big = enclosure_with_cutoff(34000, 0.35, 2.0);
    CHECK_THROWS_AS(mode_frequencies(big, 8, 8), DomainError);
    const auto skip = mode_frequencies(big, 8, 8, ModePolicy::SkipNonresonant);
    CHECK(skip.skipped > 0);
    CHECK(skip.frequencies.size() + skip.skipped == 64);
}

TEST_CASE("kappa, screening length and the two length forms") {
    const auto es = enclosure_with_cutoff(34000, 0.35, 2.0);
    const auto s = kappa(es, 4900);
    CHECK(s.kappa == doctest::Approx(std::sqrt(34000.0 * 34000 - 4900.0 * 4900) / es.velocity()).epsilon(1e-14));
    CHECK(s.delta_b == doctest::Approx(1.0 / s.kappa));
    CHECK(s.delta_b == doctest::Approx(2.65).epsilon(0.01));
    CHECK(s.delta_b_circuit == doctest::Approx(2.0 * std::sqrt(2.4 / 1.4) / std::sqrt(2 * (34000 - 4900) / 34000.0)).epsilon(1e-13));
    CHECK_FALSE(s.near_cutoff);
    // Near cutoff the two forms converge.
    const auto near = kappa(es, 34000 * (1 - 1e-4));
    CHECK(near.form_gap < 1e-3);
    CHECK(kappa(es, 0.0).kappa == doctest::Approx(34000 / es.velocity()));
    CHECK_THROWS_AS(kappa(es, 34000), DomainError);
    CHECK_THROWS_AS(kappa(es, 35000), DomainError);
}

TEST_CASE("kappa and q vanish at the cutoff from both sides") {
    const auto es = enclosure_with_cutoff(34000, 0.35, 2.0);
    CHECK(kappa(es, 34000 * (1 - 1e-12)).kappa < 1e-3);
    CHECK(propagation_q(es, 34000 * (1 + 1e-12)) < 1e-3);
    CHECK(kappa_derivative(es, 4900) == doctest::Approx(-4900 / (es.velocity() * std::sqrt(34000.0 * 34000 - 4900.0 * 4900))));
}

TEST_CASE("hankel Green function above cutoff") {
    const auto es = enclosure_with_cutoff(10000, 0.35, 2.0);
    const double w = 15000, q = propagation_q(es, w);
    const double r = 200.0 / q;
    CHECK(std::abs(hankel_green(es, w, 4 * r)) / std::abs(hankel_green(es, w, r)) == doctest::Approx(0.5).epsilon(1e-2));
    const double dphi = std::arg(hankel_green(es, w, r + 0.1 / q) / hankel_green(es, w, r));
    CHECK(dphi == doctest::Approx(0.1).epsilon(1e-3));
    CHECK_THROWS_AS(hankel_green(es, 9000, 1.0), DomainError);
}

TEST_CASE("enclosure coupling") {
    const auto es = enclosure_with_cutoff(34000, 0.35, 2.0);
    CHECK(enclosure_coupling(es, 4900, 4900, 2.0, 1.0).cosh_factor == 1.0);
    const auto c = enclosure_coupling(es, 4777.3, 5040.2, 2.0, 1.0);
    CHECK(c.cosh_factor - 1.0 < 1e-3);
    CHECK(c.j == enclosure_coupling(es, 5040.2, 4777.3, 2.0, 1.0).j);
    const double k = kappa(es, 4900).kappa;
    CHECK(enclosure_coupling(es, 4900, 4900, 2.0, 3.0).j == doctest::Approx(3.0 * k0(2.0 * k)).epsilon(1e-14));
    CHECK_THROWS_AS(enclosure_coupling(es, 4900, 40000, 2.0, 1.0), DomainError);
}

TEST_CASE("spatial envelopes") {
    for (auto r : {EnvelopeRegime::NearField, EnvelopeRegime::Fringing, EnvelopeRegime::Dipolar, EnvelopeRegime::BelowCutoff})
        CHECK(spatial_envelope(r, 2.0, 2.0, 0.5, 0.7) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spatial_envelope(EnvelopeRegime::Dipolar, 4.0, 2.0, 0.5, 0.0) == doctest::Approx(0.125));
    CHECK(spatial_envelope(EnvelopeRegime::NearField, 4.0, 2.0, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(spatial_envelope(EnvelopeRegime::Fringing, 4.0, 2.0, 0.5, 0.0) == doctest::Approx(std::log(8.0) / std::log(16.0)));
    CHECK(spatial_envelope(EnvelopeRegime::BelowCutoff, 3.0, 1.0, 0.5, 1.0) == doctest::Approx(0.0825).epsilon(1e-3));
    CHECK_THROWS_AS(spatial_envelope(EnvelopeRegime::Fringing, 0.2, 2.0, 0.5, 0.0), DomainError);
}

TEST_CASE("coupling from transimpedance") {
    CHECK(coupling_from_transimpedance(5, 6, 1, 2, {0, 0}, {0, 0}) == 0.0);
    CHECK(coupling_from_transimpedance(5, 6, 1, 2, {3, 0}, {-2, 0}) == 0.0);
    const double x = 0.7, wi = 5, wj = 6, li = 1.5, lj = 2;
    CHECK(coupling_from_transimpedance(wi, wj, li, lj, {0, wi * x}, {0, wj * x}) ==
          doctest::Approx(-0.5 * std::sqrt(wi * wj / (li * lj)) * x).epsilon(1e-14));
}
