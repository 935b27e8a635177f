#pragma once

#include "xtalk/types.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace xtalk {

/// ζ values below this magnitude (1e-8 kHz, expressed in MHz) carry kZZFloor.
inline constexpr double kExactDiagFloorMHz = 1e-11;

/// Excitation-preserving lattice model
///   H = Σ ω_i n_i + Σ (α_i/2) n_i(n_i − 1) + Σ_{i<j} J_ij (a_i† a_j + h.c.)
/// restricted to the 0-, 1- and 2-excitation sectors.
///
/// Frequencies are stored relative to `reference` (their mean); ζ is a second
/// difference of energies and does not depend on it, while the shift keeps the
/// sector spectra O(detuning) and improves the floor by orders of magnitude.
struct LatticeHamiltonian {
    int n = 0;
    double reference = 0.0;
    std::vector<double> omega; ///< absolute, MHz
    std::vector<double> alpha;
    Eigen::MatrixXd j;
    Eigen::MatrixXd sector1; ///< N × N, shifted by −reference on the diagonal
    Eigen::MatrixXd sector2; ///< N(N+1)/2 square, shifted by −2·reference
    /// Sector-2 basis: (i, i) is |2_i⟩ (first N entries), (i, j), i<j, is |1_i 1_j⟩.
    std::vector<std::pair<int, int>> basis2;

    int pair_index(int i, int j) const;
};

/// Throws DomainError for N < 2, mismatched sizes, non-finite or asymmetric J.
LatticeHamiltonian build_sectors(const std::vector<double>& omega, const std::vector<double>& alpha,
                                 const Eigen::MatrixXd& j);

struct LabelAssignment {
    std::string label;  ///< "1_i", "1_i1_j" or "2_i"
    int eigen_index = -1;
    double overlap = 0.0;      ///< |⟨bare|eigen⟩|² of the winner
    int runner_up = -1;
    double runner_overlap = 0.0;
    bool tie = false;          ///< two candidates within 1e-9, lower index chosen
};

/// Diagonalized sectors with their energies (absolute, MHz) and eigenvectors.
class SectorSolution {
public:
    explicit SectorSolution(const LatticeHamiltonian& h);

    const LatticeHamiltonian& hamiltonian() const { return *h_; }
    const Eigen::VectorXd& energies1() const { return e1_; } ///< shifted
    const Eigen::VectorXd& energies2() const { return e2_; } ///< shifted
    const Eigen::MatrixXd& vectors1() const { return v1_; }
    const Eigen::MatrixXd& vectors2() const { return v2_; }

    /// Greedy max-overlap labeling against the bare basis with the hard 0.5
    /// threshold; throws AssignmentError reporting the two best candidates.
    LabelAssignment assign_single(int i) const;
    LabelAssignment assign_pair(int i, int j) const;
    LabelAssignment assign_double(int i) const;

    /// Every bare label of sectors 1 and 2; failures are returned with
    /// eigen_index = −1 instead of thrown.
    std::vector<LabelAssignment> all_assignments() const;

private:
    LabelAssignment assign(const Eigen::MatrixXd& v, int row, std::string label) const;
    const LatticeHamiltonian* h_;
    Eigen::VectorXd e1_, e2_;
    Eigen::MatrixXd v1_, v2_;
};

/// ζ_ij = E(1_i 1_j) − E(1_i) − E(1_j) + E(0), MHz.
double zz_exact(const SectorSolution& s, int i, int j);
double zz_exact(const LatticeHamiltonian& h, int i, int j);

/// All pairs; assignment failures become NaN entries with kZZAssignmentFailed,
/// |ζ| < kExactDiagFloorMHz gets kZZFloor.
ZZMatrix zz_matrix_exact(const LatticeHamiltonian& h);

} // namespace xtalk
