#pragma once

#include <complex>
#include <vector>

namespace xtalk {

/// Pillar-shunted enclosure as a 2D lattice of LC plasma resonators.
/// Lengths in mm, frequencies in MHz.
struct EnclosureSpec {
    double a_mm = 2.0;     ///< pillar spacing
    double beta = 0.0;     ///< L_g / L_0
    double omega0 = 0.0;   ///< bare resonator frequency
    int n = 0;             ///< optional grid counts (0 = unset)
    int m = 0;
    double boundary_inductance = 0.0; ///< L_b / L_0; 0 = open boundary (only supported value)

    /// ω_c = ω0 / √(1 + 4β).
    double omega_c() const;
    /// Effective velocity v = ω_c a √((1+4β)/(4β)) in mm·MHz, so κ = √(ω_c² − ω²)/v.
    double velocity() const;
    void validate() const;
};

/// Builds a spec with a prescribed cutoff: ω0 = ω_c √(1 + 4β).
EnclosureSpec enclosure_with_cutoff(double omega_c, double beta, double a_mm);

enum class ModePolicy {
    Strict,          ///< any nonpositive radicand is an error
    SkipNonresonant, ///< drop (i, j) with nonpositive radicand and count them
};

struct ModeSpectrum {
    std::vector<double> frequencies; ///< ascending
    int skipped = 0;
};

/// ω_ij = ω0 / √(1 + 2β(cos(iπ/n) + cos(jπ/m))), i = 1..n, j = 1..m.
ModeSpectrum mode_frequencies(const EnclosureSpec& spec, int n, int m,
                              ModePolicy policy = ModePolicy::Strict);

struct ScreeningParams {
    double omega = 0.0;
    double kappa = 0.0;            ///< 1/mm
    double delta_b = 0.0;          ///< 1/κ, mm
    double delta_b_circuit = 0.0;  ///< a √((1+4β)/(4β)) / √(2(ω_c − ω)/ω_c)
    double form_gap = 0.0;         ///< |δ_b − δ_b_circuit| / δ_b
    bool near_cutoff = false;      ///< (ω_c − ω)/ω_c < 1e-6: δ_b is diverging
};

/// Evanescent screening below cutoff. ω ≥ ω_c raises DomainError
/// (use hankel_green there).
ScreeningParams kappa(const EnclosureSpec& spec, double omega);

/// dκ/dω = −ω / (v √(ω_c² − ω²)).
double kappa_derivative(const EnclosureSpec& spec, double omega);

/// Propagation constant q = √(ω² − ω_c²)/v above cutoff.
double propagation_q(const EnclosureSpec& spec, double omega);

/// (i/4) H0^(1)(qR) above cutoff. ω ≤ ω_c raises DomainError (use the K0 path).
std::complex<double> hankel_green(const EnclosureSpec& spec, double omega, double r_mm);

struct EnclosureCoupling {
    double j = 0.0;
    double kappa_mean = 0.0;   ///< κ at the mean frequency
    double cosh_factor = 1.0;  ///< cosh(½|κ′(ω̄)| |ω_i − ω_j| d)
};

/// J0_env K0(κ̄ d) cosh(½|κ′(ω̄)| |ω_i − ω_j| d); J0_env is a calibration scale.
EnclosureCoupling enclosure_coupling(const EnclosureSpec& spec, double omega_i, double omega_j,
                                     double d_mm, double j0_env);

enum class EnvelopeRegime { NearField, Fringing, Dipolar, BelowCutoff };

/// Distance envelope normalised to 1 at d0:
/// d0/d | ln(2d0/w)/ln(2d/w) | (d0/d)³ | K0(κ̄d)/K0(κ̄d0).
double spatial_envelope(EnvelopeRegime regime, double d, double d0, double width, double kappa_mean);

/// −¼ √(ω_i ω_j / (L_i L_j)) Im[Z_ij(ω_i)/ω_i + Z_ij(ω_j)/ω_j].
double coupling_from_transimpedance(double omega_i, double omega_j, double l_i, double l_j,
                                    std::complex<double> z_at_i, std::complex<double> z_at_j);

} // namespace xtalk
