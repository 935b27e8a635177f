#include "xtalk/zz.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xtalk {

namespace {
void require_away(double value, double tol, const char* name, const char* who) {
    if (std::abs(value) < tol) {
        std::ostringstream os;
        os << who << ": denominator " << name << " = " << value << " MHz is within the pole tolerance "
           << tol << " MHz (straddling-regime edge)";
        throw PoleProximityError(os.str(), name, value);
    }
}
} // namespace

bool PairSpectrum::straddling() const {
    return std::abs(delta()) < std::min(std::abs(alpha1), std::abs(alpha2));
}

ZZResult zz_nn(const PairSpectrum& p, double pole_tol) {
    const double d = p.delta();
    const double f1 = d + p.alpha1, f2 = d - p.alpha2;
    require_away(f1, pole_tol, "delta+alpha1", "zz_nn");
    require_away(f2, pole_tol, "delta-alpha2", "zz_nn");
    ZZResult r;
    r.zeta = 2.0 * (p.alpha1 + p.alpha2) * p.j * p.j / (f1 * f2);
    r.margin = std::min(std::abs(f1), std::abs(f2));
    return r;
}

double TripletSpectrum::lambda() const {
    if (j12 == 0.0 || j23 == 0.0) return 0.0;
    const double d12 = omega1 - omega2, d23 = omega2 - omega3;
    if (d12 == 0.0 || d23 == 0.0) throw DegeneratePairError("Lambda undefined: middle transmon degenerate with an end");
    return -j12 * j23 / (2.0 * d12 * d23);
}

double TripletSpectrum::j13_effective() const {
    return j13 + lambda() * ((omega1 - omega2) - (omega2 - omega3));
}

NNNResult zz_nnn(const TripletSpectrum& t, double pole_tol) {
    const double d12 = t.omega1 - t.omega2, d23 = t.omega2 - t.omega3, d13 = t.omega1 - t.omega3;
    const double a1 = t.alpha1, a2 = t.alpha2, a3 = t.alpha3;
    if (t.j12 != 0.0 && t.j23 != 0.0) {
        require_away(d12, pole_tol, "delta12", "zz_nnn");
        require_away(d23, pole_tol, "delta23", "zz_nnn");
    }
    if (std::abs(d13) < pole_tol) {
        std::ostringstream os;
        os << "zz_nnn: end transmons are degenerate (|delta13| = " << std::abs(d13)
           << " MHz); perturbation theory in the mediated coupling breaks down";
        throw DegeneratePairError(os.str());
    }
    require_away(d13 + a1, pole_tol, "delta13+alpha1", "zz_nnn");
    require_away(d13 - a3, pole_tol, "delta13-alpha3", "zz_nnn");

    NNNResult r;
    r.lambda = t.lambda();
    r.j13_effective = t.j13 + r.lambda * (d12 - d23);
    const double den = (d13 + a1) * (d13 - a3);
    const double s = a1 + a3;
    const double je = r.j13_effective - r.lambda * s / 2.0;
    r.direct = 2.0 * s / den * je * je;
    r.asymmetry = 4.0 * (a1 - a3) / den * (d13 + s / 2.0) * r.lambda * r.j13_effective;
    if (r.lambda != 0.0) {
        require_away(d12 - d23 - a2, pole_tol, "delta12-delta23-alpha2", "zz_nnn");
        const double bracket = 2.0 * (d13 * d13 - (s / 2.0) * (s / 2.0)) / den * s +
                               8.0 * (d12 - d23) / (d12 - d23 - a2) * a2;
        r.lambda_sq = bracket * r.lambda * r.lambda;
    }
    r.zeta = r.direct + r.asymmetry + r.lambda_sq;
    return r;
}

ScaledZZ zz_scaled(const PairSpectrum& p, double d, const ScalingLaw& law, double pole_tol) {
    if (!(d > 0.0)) throw DomainError("zz_scaled: distance must be positive");
    if (!(law.d0 > 0.0)) throw DomainError("zz_scaled: d0 must be positive");
    ScaledZZ out;
    PairSpectrum q = p;
    if (law.dispersion_reference) {
        if (!(*law.dispersion_reference > 0.0)) throw DomainError("zz_scaled: dispersion reference must be positive");
        q.j = p.j * std::sqrt(p.omega1 * p.omega2) / *law.dispersion_reference;
    }
    out.j_used = q.j;
    const double offset = law.normalize_at_nn ? law.reference_spacing : 0.0;
    out.envelope = std::exp(-2.0 * (d - offset) / law.d0);
    out.zeta = zz_nn(q, pole_tol).zeta * out.envelope;
    return out;
}

double j_unified(double omega_i, double omega_j, double d, const ScalingLaw& law) {
    if (!(law.d0 > 0.0) || !(d > 0.0)) throw DomainError("j_unified: needs kappa*d > 0");
    const double f = law.f ? law.f(omega_i - omega_j) : 1.0;
    return law.j0 * k0(d / law.d0) * f;
}

double calibrate_j0(double j_ref, double d_ref, double d0) {
    if (!(d0 > 0.0) || !(d_ref > 0.0)) throw DomainError("calibrate_j0: distances must be positive");
    return j_ref / k0(d_ref / d0);
}

SpectatorError spectator_error(const TripletSpectrum& t, double pole_tol) {
    const double d12 = t.omega1 - t.omega2, d23 = t.omega2 - t.omega3, d13 = t.omega1 - t.omega3;
    const double a1 = t.alpha1, a2 = t.alpha2;
    const double f1 = d12 + a1, f2 = d12 - a2;
    require_away(f1, pole_tol, "delta12+alpha1", "spectator_error");
    require_away(f2, pole_tol, "delta12-alpha2", "spectator_error");
    SpectatorError e;
    if (t.j13 != 0.0 && t.j23 != 0.0) {
        require_away(d13, pole_tol, "delta13", "spectator_error");
        require_away(d23, pole_tol, "delta23", "spectator_error");
        e.lambda_prime = t.j13 * t.j23 / (2.0 * d13 * d23);
    }
    const double bracket = 2.0 * (d12 + d23) - (a1 + a2);
    e.absolute = 2.0 * (a1 + a2) / (f1 * f2) * t.j12 * bracket * e.lambda_prime;
    const double zeta12 = 2.0 * (a1 + a2) * t.j12 * t.j12 / (f1 * f2);
    e.relative = zeta12 != 0.0 ? std::abs(e.absolute / zeta12) : 0.0;
    if (d23 != 0.0 && d13 != 0.0)
        e.relative_approx = std::abs((d12 + d23 - (a1 + a2) / 2.0) / d23) * std::abs(t.j13 / d13);
    return e;
}

} // namespace xtalk
