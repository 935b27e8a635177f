#pragma once

#include <functional>
#include <optional>

namespace xtalk {

/// Default distance from a perturbative pole, MHz.
inline constexpr double kDefaultPoleTolerance = 1.0;

/// Two transmons, MHz. Δ = ω1 − ω2.
struct PairSpectrum {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double j = 0.0;

    double delta() const { return omega1 - omega2; }
    /// |Δ| < min(|α1|, |α2|).
    bool straddling() const;
    /// Relabel 1 ↔ 2.
    PairSpectrum swapped() const { return {omega2, omega1, alpha2, alpha1, j}; }
};

struct ZZResult {
    double zeta = 0.0;
    double margin = 0.0; ///< min(|Δ + α1|, |Δ − α2|)
};

/// ζ = 2(α1+α2) J² / ((Δ+α1)(Δ−α2)). A factor within `pole_tol` raises
/// PoleProximityError naming it ("delta+alpha1" or "delta-alpha2").
ZZResult zz_nn(const PairSpectrum& p, double pole_tol = kDefaultPoleTolerance);

/// Three transmons 1–2–3 with 2 in the middle. Δ_ij = ω_i − ω_j.
struct TripletSpectrum {
    double omega1 = 0.0, omega2 = 0.0, omega3 = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double j12 = 0.0, j23 = 0.0, j13 = 0.0;

    /// Λ = −J12 J23 / (2 Δ12 Δ23); zero when either link vanishes.
    double lambda() const;
    /// J′13 = J13 + Λ(Δ12 − Δ23).
    double j13_effective() const;
};

struct NNNResult {
    double zeta = 0.0;
    double direct = 0.0;    ///< 2(α1+α3)/((Δ13+α1)(Δ13−α3)) (J′13 − Λ(α1+α3)/2)²
    double asymmetry = 0.0; ///< 4(α1−α3)/(…) (Δ13 + (α1+α3)/2) Λ J′13
    double lambda_sq = 0.0; ///< [ … ] Λ²
    double lambda = 0.0;
    double j13_effective = 0.0;
};

/// Next-nearest-neighbour ZZ through a middle transmon (three-term expression).
/// Denominators near zero raise PoleProximityError with the factor name;
/// |Δ13| below `pole_tol` raises DegeneratePairError.
NNNResult zz_nnn(const TripletSpectrum& t, double pole_tol = kDefaultPoleTolerance);

/// Distance scaling of couplings.
struct ScalingLaw {
    double j0 = 0.0;                 ///< MHz
    double d0 = 1.0;                 ///< decay length (mm, or sites)
    double reference_spacing = 2.0;  ///< nearest-neighbour spacing a
    bool normalize_at_nn = true;     ///< ZZ envelope e^{−2(d−a)/d0} instead of e^{−2d/d0}
    /// When set, J_ij = J · √(ω_i ω_j) / ω_ref.
    std::optional<double> dispersion_reference;
    /// Frequency correction f(Δω); unity when empty.
    std::function<double(double)> f;
};

struct ScaledZZ {
    double zeta = 0.0;
    double envelope = 0.0;
    double j_used = 0.0;
};

/// zz_nn with the pair's J (optionally carrying √(ω_i ω_j) dispersion) times
/// the distance envelope.
ScaledZZ zz_scaled(const PairSpectrum& p, double d, const ScalingLaw& law,
                   double pole_tol = kDefaultPoleTolerance);

/// J = J0 K0(d/d0) f(Δω).
double j_unified(double omega_i, double omega_j, double d, const ScalingLaw& law);

/// J0 such that j_unified(d_ref) equals j_ref (with f = 1).
double calibrate_j0(double j_ref, double d_ref, double d0);

struct SpectatorError {
    double absolute = 0.0;    ///< Δζ12
    double relative = 0.0;    ///< |Δζ12 / ζ12|
    double relative_approx = 0.0; ///< |(Δ12+Δ23−(α1+α2)/2)/Δ23| |J13/Δ13|
    double lambda_prime = 0.0;    ///< J13 J23 / (2 Δ13 Δ23)
};

/// First-order shift of the pair (1,2) ZZ from a ground-state spectator 3.
SpectatorError spectator_error(const TripletSpectrum& t, double pole_tol = kDefaultPoleTolerance);

} // namespace xtalk
