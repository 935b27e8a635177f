#pragma once

#include "xtalk/zz.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xtalk {

/// Lattice pitch of the reference device, mm.
inline constexpr double kDefaultPitchMM = 2.0;

struct GridPos {
    int row = 0;
    int col = 0;
};

/// Row-major grid placement: index i → (⌊i/cols⌋, i mod cols).
GridPos lattice_position(int index, int rows, int cols);
std::vector<GridPos> lattice_positions(int rows, int cols);

int manhattan(const GridPos& a, const GridPos& b);
double euclidean(const GridPos& a, const GridPos& b, double pitch_mm = kDefaultPitchMM);

struct MeasurementRow {
    int i = 0;
    int j = 0;
    double zz_khz = 0.0;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::string timestamp;
};

using MeasurementTable = std::vector<MeasurementRow>;

/// Measurement CSV with header `i,j,zz_khz,ci_low,ci_high` (CI cells may be
/// empty; an optional trailing `timestamp` column is kept verbatim). Errors are
/// SchemaError tagged "line N".
MeasurementTable read_measurements_csv(const std::string& text);

/// Throws DomainError for invalid indices, non-finite ζ or ci_low > ci_high.
void validate_table(const MeasurementTable& t, int n_qubits);

enum class ExclusionReason { StraddlingOutlier, BelowThreshold, CIIncludesZero };
std::string to_string(ExclusionReason r);

struct Exclusion {
    MeasurementRow row;
    ExclusionReason reason = ExclusionReason::BelowThreshold;
};

struct FilterResult {
    MeasurementTable kept;
    std::vector<Exclusion> excluded;
};

/// Drops, in this order of precedence: pairs on the outlier list, |ζ| below
/// the threshold, and rows whose confidence interval contains zero.
FilterResult filter_measurements(const MeasurementTable& t, double threshold_khz,
                                 const std::vector<std::pair<int, int>>& outliers = {});

/// Inverts the nearest-neighbour ZZ expression: J = √(ζ (Δ+α1)(Δ−α2) / (2(α1+α2))),
/// returned non-negative. ζ and the result in the same unit as the spectrum
/// (MHz). A negative radicand raises SignInconsistencyError for pair (i, j).
double zz_to_j_naive(double zeta, const PairSpectrum& p, int i = -1, int j = -1,
                     double pole_tol = kDefaultPoleTolerance);

struct SummaryStats {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev_sample = 0.0;     ///< n − 1 normalisation
    double stddev_population = 0.0; ///< n normalisation
};

SummaryStats summarize(const std::vector<double>& values);

enum class FitPopulation { ShellMeans, Pairs };
enum class FitWeighting { Unweighted, InverseVariance };

struct ShellStat {
    double distance = 0.0;
    std::size_t count = 0;
    double mean = 0.0;   ///< arithmetic mean of |ζ|
    double stddev = 0.0; ///< sample standard deviation (0 for a single entry)
};

enum class ScalingModel { ExpManhattan, K0Euclidean };

struct ScalingFit {
    ScalingModel model = ScalingModel::ExpManhattan;
    double amplitude = 0.0; ///< A in A e^{−D/D0}, or A in A K0(d/d0)^p
    double length = 0.0;   ///< D0 (sites) or d0 (mm)
    double r_squared = 0.0;
    std::vector<double> residuals; ///< log-space
    std::vector<ShellStat> shells;
    std::vector<Exclusion> excluded;
    /// Shell means condition on detection: undetected pairs are absent, which
    /// biases far shells upward.
    bool detection_conditioned = true;
};

struct ManhattanFitOptions {
    FitPopulation population = FitPopulation::ShellMeans;
    FitWeighting weighting = FitWeighting::Unweighted;
};

/// Per-shell statistics of |ζ| keyed by Manhattan distance.
std::vector<ShellStat> shell_statistics(const MeasurementTable& t, const std::vector<GridPos>& pos);

/// Log-linear least squares of ⟨|ζ|⟩ ∝ exp(−D/D0). Needs ≥ 2 shells.
ScalingFit fit_manhattan_decay(const MeasurementTable& t, const std::vector<GridPos>& pos,
                               const ManhattanFitOptions& opt = {});

/// Same fit on explicit (distance, value) points, e.g. shell means.
ScalingFit fit_exponential(const std::vector<double>& distance, const std::vector<double>& value,
                           const std::vector<double>& weight = {});

/// |ζ| (or J) ∝ K0(d/d0)^power in Euclidean distance; d0 by a Brent
/// search on the log-space residual, amplitude in closed form.
ScalingFit fit_k0_euclidean(const std::vector<double>& distance_mm, const std::vector<double>& value,
                            double power = 2.0);

struct CouplingRow {
    int i = 0;
    int j = 0;
    double distance_mm = 0.0;
    double j_mhz = 0.0;
};

enum class EnvelopeKind { Exp, K0 };

/// Multiplies every J by the envelope at its distance, normalised to 1 at the
/// nearest-neighbour spacing: e^{−(d−a)/d0} or K0(d/d0)/K0(a/d0).
std::vector<CouplingRow> apply_scaling_correction(const std::vector<CouplingRow>& unscaled,
                                                  EnvelopeKind kind, double d0_mm,
                                                  double nn_spacing_mm = kDefaultPitchMM);

/// Multiplies every J by one shared factor s.
std::vector<CouplingRow> apply_scaling_correction(const std::vector<CouplingRow>& unscaled, double s);

/// Least-squares s minimising Σ (s x − y)²: s = Σxy / Σx².
double fit_global_factor(const std::vector<double>& unscaled, const std::vector<double>& scaled);

} // namespace xtalk
