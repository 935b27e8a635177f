#pragma once

#include <Eigen/Dense>

#include <vector>

namespace xtalk {

/// Transmon charging and Josephson energies. All frequencies are cyclic and in
/// MHz internally; every formula here is homogeneous in frequency, so GHz
/// inputs give GHz outputs.
struct TransmonParams {
    double ec = 0.0;
    double ej = 0.0;
};

/// ω ≈ √(8 E_C E_J) − E_C.
double bare_frequency(const TransmonParams& p);

/// E_J reproducing frequency ω at charging energy E_C: E_C (ω+E_C)² / (8 E_C²).
double ej_for_frequency(double ec, double omega);

/// α ≈ −E_C.
double default_anharmonicity(const TransmonParams& p);

/// E_C/E_J below `max_ratio`.
bool transmon_regime(const TransmonParams& p, double max_ratio = 1.0 / 20.0);

/// g = E_Cij / ⁴√(4 E_Ci E_Cj) · ⁴√(E_Ji E_Jj).
double bare_coupling(const TransmonParams& i, const TransmonParams& j, double ec_ij);

/// Impedance form 2 E_Cij / √(Z_i Z_j) with Z = √(8 E_C / E_J); algebraically
/// identical to bare_coupling.
double bare_coupling_impedance(const TransmonParams& i, const TransmonParams& j, double ec_ij);

/// Dispersion form (E_Cij / √(16 E_Ci E_Cj)) · √(ω_i ω_j), which keeps the
/// explicit frequency dependence.
double bare_coupling_dispersion(double ec_i, double ec_j, double ec_ij, double omega_i,
                                double omega_j);

struct CouplingEdge {
    int i = 0;
    int j = 0;
    double value = 0.0; ///< g_ij, or E_Cij before conversion
};

/// Undirected coupling graph; validated on construction.
class CouplingGraph {
public:
    CouplingGraph(int n, std::vector<CouplingEdge> edges);

    int size() const { return n_; }
    const std::vector<CouplingEdge>& edges() const { return edges_; }
    /// Dense symmetric table, zero where no edge exists.
    Eigen::MatrixXd dense() const;

private:
    int n_;
    std::vector<CouplingEdge> edges_;
};

/// Converts a graph of mutual charging energies into bare couplings g_ij.
CouplingGraph couplings_from_charging(const CouplingGraph& ec_graph,
                                      const std::vector<TransmonParams>& params);

struct DressedParams {
    std::vector<double> omega;       ///< bare frequencies used
    std::vector<double> omega_prime; ///< ω′_i
    std::vector<double> shift;       ///< ω′_i − ω_i (≤ 0)
    Eigen::MatrixXd g_prime;         ///< g′_ij for every pair, symmetric, zero diagonal
    Eigen::MatrixXd g_correction;    ///< g′_ij − g_ij
};

/// Second-order Schrieffer–Wolff dressing from the counter-rotating terms:
///   ω′_i = ω_i − Σ_k g_ik² / (ω_i + ω_k)
///   g′_ij = g_ij − ½ Σ_{k≠i,j} g_ik g_jk [1/(ω_i+ω_k) + 1/(ω_j+ω_k)]
DressedParams swt_dress(const CouplingGraph& g, const std::vector<double>& omega);
DressedParams swt_dress(const CouplingGraph& g, const std::vector<TransmonParams>& params);

} // namespace xtalk
