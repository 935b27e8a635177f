#include "xtalk/enclosure.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xtalk {

void EnclosureSpec::validate() const {
    if (!(a_mm > 0.0)) throw DomainError("EnclosureSpec: pillar spacing must be positive");
    if (!(beta >= 0.0)) throw DomainError("EnclosureSpec: beta must be non-negative");
    if (!(omega0 > 0.0)) throw DomainError("EnclosureSpec: omega0 must be positive");
    if (n < 0 || m < 0) throw DomainError("EnclosureSpec: grid counts must be non-negative");
    if (boundary_inductance != 0.0)
        throw DomainError("EnclosureSpec: only the open boundary (L_b = 0) is modelled");
}

double EnclosureSpec::omega_c() const {
    validate();
    return omega0 / std::sqrt(1.0 + 4.0 * beta);
}

double EnclosureSpec::velocity() const {
    validate();
    if (!(beta > 0.0)) throw DomainError("EnclosureSpec: velocity needs beta > 0");
    return omega_c() * a_mm * std::sqrt((1.0 + 4.0 * beta) / (4.0 * beta));
}

EnclosureSpec enclosure_with_cutoff(double omega_c, double beta, double a_mm) {
    EnclosureSpec s;
    s.a_mm = a_mm;
    s.beta = beta;
    s.omega0 = omega_c * std::sqrt(1.0 + 4.0 * beta);
    s.validate();
    return s;
}

ModeSpectrum mode_frequencies(const EnclosureSpec& spec, int n, int m, ModePolicy policy) {
    spec.validate();
    if (n < 1 || m < 1) throw DomainError("mode_frequencies: grid counts must be >= 1");
    ModeSpectrum out;
    out.frequencies.reserve(static_cast<std::size_t>(n) * m);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j) {
            const double rad =
                1.0 + 2.0 * spec.beta * (std::cos(i * M_PI / n) + std::cos(j * M_PI / m));
            if (!(rad > 0.0)) {
                if (policy == ModePolicy::Strict) {
                    std::ostringstream os;
                    os << "mode_frequencies: nonpositive radicand " << rad << " at (i,j)=(" << i << ","
                       << j << "); beta=" << spec.beta << " is too large for this grid";
                    throw DomainError(os.str());
                }
                ++out.skipped;
                continue;
            }
            out.frequencies.push_back(spec.omega0 / std::sqrt(rad));
        }
    std::sort(out.frequencies.begin(), out.frequencies.end());
    return out;
}

ScreeningParams kappa(const EnclosureSpec& spec, double omega) {
    const double wc = spec.omega_c();
    const double v = spec.velocity();
    if (!(omega >= 0.0)) throw DomainError("kappa: frequency must be non-negative");
    if (omega >= wc) {
        std::ostringstream os;
        os << "kappa: omega=" << omega << " is at or above the cutoff " << wc
           << "; the field propagates, use hankel_green";
        throw DomainError(os.str());
    }
    ScreeningParams s;
    s.omega = omega;
    s.kappa = std::sqrt((wc - omega) * (wc + omega)) / v;
    s.delta_b = 1.0 / s.kappa;
    s.delta_b_circuit = spec.a_mm * std::sqrt((1.0 + 4.0 * spec.beta) / (4.0 * spec.beta)) /
                        std::sqrt(2.0 * (wc - omega) / wc);
    s.form_gap = std::abs(s.delta_b - s.delta_b_circuit) / s.delta_b;
    s.near_cutoff = (wc - omega) / wc < 1e-6;
    return s;
}

double kappa_derivative(const EnclosureSpec& spec, double omega) {
    const double wc = spec.omega_c();
    if (!(omega >= 0.0) || omega >= wc) throw DomainError("kappa_derivative: needs 0 <= omega < omega_c");
    return -omega / (spec.velocity() * std::sqrt((wc - omega) * (wc + omega)));
}

double propagation_q(const EnclosureSpec& spec, double omega) {
    const double wc = spec.omega_c();
    if (!(omega > wc)) {
        std::ostringstream os;
        os << "propagation_q: omega=" << omega << " is at or below the cutoff " << wc
           << "; the field is evanescent, use the K0 path";
        throw DomainError(os.str());
    }
    return std::sqrt((omega - wc) * (omega + wc)) / spec.velocity();
}

std::complex<double> hankel_green(const EnclosureSpec& spec, double omega, double r_mm) {
    const double q = propagation_q(spec, omega);
    if (!(r_mm > 0.0)) throw DomainError("hankel_green: separation must be positive");
    return std::complex<double>(0.0, 0.25) * hankel1_0(q * r_mm);
}

EnclosureCoupling enclosure_coupling(const EnclosureSpec& spec, double omega_i, double omega_j,
                                     double d_mm, double j0_env) {
    if (!(d_mm > 0.0)) throw DomainError("enclosure_coupling: separation must be positive");
    const double wc = spec.omega_c();
    if (omega_i >= wc || omega_j >= wc)
        throw DomainError("enclosure_coupling: qubit frequency at or above the cutoff");
    const double wbar = 0.5 * (omega_i + omega_j);
    EnclosureCoupling c;
    c.kappa_mean = kappa(spec, wbar).kappa;
    const double slope = std::abs(kappa_derivative(spec, wbar));
    c.cosh_factor = std::cosh(0.5 * slope * std::abs(omega_i - omega_j) * d_mm);
    c.j = j0_env * k0(c.kappa_mean * d_mm) * c.cosh_factor;
    return c;
}

double spatial_envelope(EnvelopeRegime regime, double d, double d0, double width, double kappa_mean) {
    if (!(d > 0.0) || !(d0 > 0.0)) throw DomainError("spatial_envelope: distances must be positive");
    switch (regime) {
    case EnvelopeRegime::NearField:
        return d0 / d;
    case EnvelopeRegime::Fringing:
        if (!(width > 0.0)) throw DomainError("spatial_envelope: electrode width must be positive");
        if (d <= 0.5 * width || d0 <= 0.5 * width)
            throw DomainError("spatial_envelope: fringing regime needs d > w/2 (log argument <= 1)");
        return std::log(2.0 * d0 / width) / std::log(2.0 * d / width);
    case EnvelopeRegime::Dipolar: {
        const double r = d0 / d;
        return r * r * r;
    }
    case EnvelopeRegime::BelowCutoff:
        if (!(kappa_mean > 0.0)) throw DomainError("spatial_envelope: kappa must be positive");
        // Ratio of scaled functions avoids underflow at large κd.
        return std::exp(-kappa_mean * (d - d0)) * k0_scaled(kappa_mean * d) /
               k0_scaled(kappa_mean * d0);
    }
    throw DomainError("spatial_envelope: unknown regime");
}

double coupling_from_transimpedance(double omega_i, double omega_j, double l_i, double l_j,
                                    std::complex<double> z_at_i, std::complex<double> z_at_j) {
    if (!(l_i > 0.0) || !(l_j > 0.0)) throw DomainError("coupling_from_transimpedance: inductances must be positive");
    if (!(omega_i > 0.0) || !(omega_j > 0.0))
        throw DomainError("coupling_from_transimpedance: frequencies must be positive");
    const double im = (z_at_i / omega_i + z_at_j / omega_j).imag();
    return -0.25 * std::sqrt(omega_i * omega_j / (l_i * l_j)) * im;
}

} // namespace xtalk
