#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xtalk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive-definite matrix with a known bandwidth.
///
/// Stored densely (desk-scale orders, up to a few hundred). Construction
/// validates symmetry, the band structure and positive definiteness; a
/// failed factorization reports the offending leading minor.
class BandedSPD {
public:
    /// Bandwidth is inferred as the largest |i-j| with a nonzero entry unless
    /// declared, in which case entries beyond it must be exactly zero.
    static BandedSPD from_dense(const Matrix& m, std::optional<int> bandwidth = std::nullopt);
    /// `bands[k]` holds the k-th superdiagonal (length n-k); bands[0] is the diagonal.
    static BandedSPD from_bands(const std::vector<std::vector<double>>& bands);

    int order() const { return static_cast<int>(m_.rows()); }
    int bandwidth() const { return w_; }
    const Matrix& dense() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    std::vector<std::vector<double>> bands() const;

private:
    BandedSPD(Matrix m, int w) : m_(std::move(m)), w_(w) {}
    Matrix m_;
    int w_ = 0;
};

/// Lower Cholesky factor L with A = L Lᵀ. Throws NotPositiveDefiniteError
/// naming the failed pivot (leading minor of order step+1).
Matrix cholesky_lower(const Matrix& a);

/// Factorization-based inverse, symmetrized.
Matrix invert_dense(const BandedSPD& m);

/// Tridiagonal Toeplitz chain: diagonal a, off-diagonals b.
struct ToeplitzTridiag {
    int n = 1;
    double a = 0.0;
    double b = 0.0;

    /// θ with cosh θ = a / (2|b|).
    double theta() const;
    /// r = e^{-θ} = (a - √(a² - 4b²)) / (2|b|).
    double r() const;
    Matrix dense() const;
    BandedSPD banded() const;
};

/// Hyperbolic-sine closed form of the inverse, evaluated in log space so that
/// long chains do not overflow.
Matrix toeplitz_inverse_closed_form(const ToeplitzTridiag& t);

/// Entrywise uniform bound r^{|i-j|} / (|b| sinh θ).
Matrix toeplitz_uniform_bound(const ToeplitzTridiag& t);

/// Limit of the diagonal of the inverse for an infinite chain: 1/√(a² - 4b²).
double toeplitz_infinite_diagonal(const ToeplitzTridiag& t);

/// All-pairs hop distance on the sparsity graph (off-diagonal nonzeros);
/// -1 marks unreachable pairs.
Eigen::MatrixXi graph_distances(const Matrix& m);

struct WalkBound {
    double a = 0.0;              ///< split C = aI - B
    int nu = 0;                  ///< maximum vertex degree of the sparsity graph
    double norm_b = 0.0;         ///< spectral norm of B
    double ratio = 0.0;          ///< ν‖B‖/a
    bool applicable = false;     ///< ratio < 1; otherwise `bound` holds +inf (no guarantee)
    double spectral_ratio = 0.0; ///< ‖B‖/a, the walk-count-free variant
    bool spectral_applicable = false;
    double condition_number = 0.0; ///< λmax/λmin of C
    Eigen::MatrixXi dist;
    Matrix bound;          ///< (1/a)(ν‖B‖/a)^dist / (1 - ν‖B‖/a)
    Matrix spectral_bound; ///< (1/a)(‖B‖/a)^dist / (1 - ‖B‖/a)
};

/// Neumann-series walk bound on |C^{-1}_ij|. `split_a` defaults to the
/// largest diagonal entry. An inapplicable bound is reported, not thrown.
WalkBound neumann_walk_bound(const BandedSPD& m, std::optional<double> split_a = std::nullopt);

/// m x n nearest-neighbour lattice, C = aI + b(I⊗S_n + S_m⊗I).
/// Site (x, y), 1-based, maps to row (x-1)·n + (y-1).
struct Lattice2DSpec {
    int m = 1;
    int n = 1;
    double a = 0.0;
    double b = 0.0;

    Matrix dense() const;
};

/// Inverse from the discrete-sine eigenbasis.
Matrix lattice2d_inverse_spectral(const Lattice2DSpec& spec);

struct ContinuumKappa {
    double kappa = 0.0; ///< per site
    double xi = 0.0;    ///< 1/κ, +inf at the gap closing
};

/// κ = √(2(a - 4|b|)/|b|) of the continuum screened Green's function.
ContinuumKappa continuum_kappa(const Lattice2DSpec& spec);

/// Asymptotic per-site decay rate of the 2D inverse along the lattice diagonal,
/// measured in Manhattan steps: cosh γ = a/(4|b|).
double lattice2d_diagonal_rate(const Lattice2DSpec& spec);

enum class Metric { Graph, Manhattan, Euclidean };

struct Site {
    double x = 0.0;
    double y = 0.0;
};

struct DecayEstimate {
    double gamma = 0.0;
    double prefactor = 0.0;
    double residual_norm = 0.0;
    double r_squared = 0.0;
    Metric metric = Metric::Manhattan;
    std::vector<double> shell_distance;
    std::vector<double> shell_max;
    std::vector<double> residuals;
};

struct FitDecayOptions {
    double floor = 1e-14;
    /// Sites closer than this to the lattice edge (in site units) are dropped.
    /// Negative selects the default 2w.
    double boundary_exclusion = -1.0;
    int bandwidth = 1;
};

/// Log-linear least squares of max|entry| per distance shell versus distance.
DecayEstimate fit_decay(const Matrix& inverse, const std::vector<Site>& positions, Metric metric,
                        const FitDecayOptions& opt = {});

/// Same, with an explicit distance table (e.g. graph distances).
DecayEstimate fit_decay(const Matrix& inverse, const std::vector<Site>& positions,
                        const Matrix& distances, Metric metric, const FitDecayOptions& opt = {});

std::vector<Site> chain_sites(int n);
std::vector<Site> grid_sites(int m, int n);

/// Dense CSV: a "# n,w" comment line followed by n rows of n values.
void write_matrix_csv(std::ostream& os, const BandedSPD& m);
BandedSPD read_matrix_csv(std::istream& is);
/// {"order": n, "bandwidth": w, "bands": [[diag], [super1], ...]}
std::string matrix_to_json(const BandedSPD& m);
BandedSPD matrix_from_json(const std::string& text);

} // namespace xtalk
