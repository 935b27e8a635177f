#pragma once

#include <Eigen/Dense>

#include <string>

namespace xtalk {

enum class CouplingProvenance { Circuit, Enclosure, Total, Fitted, Measured };

/// Symmetric N×N exchange strengths J_ij in MHz.
struct CouplingMatrix {
    Eigen::MatrixXd j;
    CouplingProvenance provenance = CouplingProvenance::Total;
};

enum class ZZMethod { Perturbative, Scaling, ExactDiag, Measured };

/// Per-entry flags of a ZZMatrix (bitmask).
enum ZZFlag : int {
    kZZOk = 0,
    kZZFloor = 1,            ///< below the numerical floor of the method
    kZZAssignmentFailed = 2, ///< dressed-state labeling failed; value is NaN
    kZZPole = 4,             ///< perturbative denominator within tolerance; value is NaN
    kZZBelowThreshold = 8,   ///< below the detection threshold
    kZZDegenerate = 16,      ///< degenerate pair; value is NaN
};

/// Symmetric N×N matrix of ζ_ij in MHz with per-entry flags.
struct ZZMatrix {
    Eigen::MatrixXd zeta;
    Eigen::MatrixXi flags;
    ZZMethod method = ZZMethod::ExactDiag;
};

std::string to_string(CouplingProvenance p);
std::string to_string(ZZMethod m);

} // namespace xtalk
