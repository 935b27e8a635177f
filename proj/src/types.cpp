#include "xtalk/types.hpp"

namespace xtalk {

std::string to_string(CouplingProvenance p) {
    switch (p) {
    case CouplingProvenance::Circuit: return "circuit";
    case CouplingProvenance::Enclosure: return "enclosure";
    case CouplingProvenance::Total: return "total";
    case CouplingProvenance::Fitted: return "fitted";
    case CouplingProvenance::Measured: return "measured";
    }
    return "unknown";
}

std::string to_string(ZZMethod m) {
    switch (m) {
    case ZZMethod::Perturbative: return "perturbative";
    case ZZMethod::Scaling: return "scaling";
    case ZZMethod::ExactDiag: return "exact-diag";
    case ZZMethod::Measured: return "measured";
    }
    return "unknown";
}

} // namespace xtalk
