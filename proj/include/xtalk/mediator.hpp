#pragma once

#include <optional>
#include <vector>

namespace xtalk {

/// Two end modes coupled through M intermediate (mediator) modes in a line:
/// b1 –g[0]– c1 –g[1]– c2 … cM –g[M]– b2. Frequencies in MHz.
struct MediatorChain {
    double omega1 = 0.0;
    double omega2 = 0.0;
    std::vector<double> mediators; ///< ω_{c_1..c_M}
    std::vector<double> links;     ///< g_{0,1} … g_{M,M+1}, size M+1

    int size() const { return static_cast<int>(mediators.size()); }
    double mean_end_frequency() const { return 0.5 * (omega1 + omega2); }
    /// Δ_n = |ω̄ − ω_{c_n}|.
    std::vector<double> detunings() const;
    /// max_n over links and mediators of |g|/Δ (the dispersive small parameter).
    double dispersive_ratio() const;
    /// Ends swapped and link order reversed; physically the same chain.
    MediatorChain reversed() const;
    /// Throws DomainError on inconsistent sizes or nonpositive frequencies.
    void validate() const;
};

struct ProductEstimate {
    double j = 0.0;                 ///< Π g / Π Δ  (magnitude convention)
    double g_mean = 0.0;            ///< geometric mean of |g| over the M+1 links
    double delta_mean = 0.0;        ///< geometric mean of Δ over the M mediators
    double geometric_form = 0.0;    ///< ḡ (ḡ/Δ̄)^M, equal to |j|
    std::vector<double> detunings;
};

/// Product-over-links-and-detunings estimate. Requires M ≥ 1; a zero detuning
/// raises ResonanceError naming the mediator.
ProductEstimate jeff_product(const MediatorChain& chain);

/// Second-order result for one mediator, signed:
/// (g01 g12 / 2) [1/(ω1 − ωc) + 1/(ω2 − ωc)].
double jeff_single_exact(const MediatorChain& chain);

/// Exact elimination of the excitation-preserving chain. The mediator block
/// H_c is tridiagonal (ω_{c_n} on the diagonal, links between mediators);
/// Σ(E) = g01 [(E − H_c)^{-1}]_{1M} g_{M,M+1}. Without a probe the result is
/// ½[Σ(ω1) + Σ(ω2)], which reduces to jeff_single_exact for M = 1; with a
/// probe it is Σ(probe). M = 0 returns the direct link. A singular pivot
/// raises ResonanceError with the 1-based mediator index.
double jeff_chain_exact(const MediatorChain& chain, std::optional<double> probe = std::nullopt);

/// Classical flux-amplitude elimination with the dynamic matrix
/// [A]_nn = ω_{c_n}² − ω², [A]_{n,n±1} = −ω_{c_n}² k̃, equal inductances and
/// k = −2g/√(ω_i ω_j). Keeps the counter-rotating contributions, so it differs
/// from jeff_chain_exact by O(Δ/(ω + ω_c)). The probe defaults to ω̄.
double jeff_chain_classical(const MediatorChain& chain, std::optional<double> probe = std::nullopt);

struct ChainComparison {
    double exact = 0.0;        ///< signed
    double product = 0.0;      ///< magnitude
    double relative_gap = 0.0; ///< | |exact| − product | / |exact|
    bool sign_differs = false; ///< exact is negative while the product form is positive
};

ChainComparison compare_chain(const MediatorChain& chain);

} // namespace xtalk
