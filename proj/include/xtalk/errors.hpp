#pragma once

#include <stdexcept>
#include <string>

namespace xtalk {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (nonpositive energy, bad index...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization broke down; `step` is the 0-based pivot that failed,
/// i.e. the leading minor of order step+1 is not positive.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(const std::string& what, long step)
        : Error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/// A mediator (or any dispersive denominator) is resonant with the probe.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, long index)
        : Error(what), index_(index) {}
    /// Offending mediator index (1-based along the chain), -1 when not applicable.
    long index() const { return index_; }

private:
    long index_;
};

/// A perturbative denominator is within the pole tolerance.
class PoleProximityError : public Error {
public:
    PoleProximityError(const std::string& what, std::string factor, double value)
        : Error(what), factor_(std::move(factor)), value_(value) {}
    /// Symbolic name of the offending denominator, e.g. "delta+alpha1".
    const std::string& factor() const { return factor_; }
    double value() const { return value_; }

private:
    std::string factor_;
    double value_;
};

/// Two modes are degenerate where a detuning is required to be nonzero.
class DegeneratePairError : public Error {
public:
    using Error::Error;
};

/// Dressed-state labeling could not find a dominant eigenvector.
class AssignmentError : public Error {
public:
    AssignmentError(const std::string& what, std::string label, long best, long runner_up,
                    double best_overlap, double runner_overlap)
        : Error(what), label_(std::move(label)), best_(best), runner_(runner_up),
          best_ov_(best_overlap), runner_ov_(runner_overlap) {}
    const std::string& label() const { return label_; }
    long best() const { return best_; }
    long runner_up() const { return runner_; }
    double best_overlap() const { return best_ov_; }
    double runner_overlap() const { return runner_ov_; }

private:
    std::string label_;
    long best_, runner_;
    double best_ov_, runner_ov_;
};

/// A fit or estimator has too few usable data points.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Input file does not satisfy its schema. `where` is a JSON path or "line N".
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::string where)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// ZZ-to-J inversion got a ζ whose sign disagrees with the perturbative prefactor.
class SignInconsistencyError : public Error {
public:
    SignInconsistencyError(const std::string& what, int i, int j)
        : Error(what), i_(i), j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

} // namespace xtalk
