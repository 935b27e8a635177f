#include "xtalk/circuit.hpp"
#include "xtalk/errors.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace xtalk {

namespace {
void check_positive(const TransmonParams& p, const char* who) {
    if (!(p.ec > 0.0) || !(p.ej > 0.0)) {
        std::ostringstream os;
        os << who << ": E_C and E_J must be positive (got E_C=" << p.ec << ", E_J=" << p.ej << ")";
        throw DomainError(os.str());
    }
}
} // namespace

double bare_frequency(const TransmonParams& p) {
    check_positive(p, "bare_frequency");
    return std::sqrt(8.0 * p.ec * p.ej) - p.ec;
}

double ej_for_frequency(double ec, double omega) {
    if (!(ec > 0.0) || !(omega > 0.0))
        throw DomainError("ej_for_frequency: E_C and omega must be positive");
    return ec * (omega + ec) * (omega + ec) / (8.0 * ec * ec);
}

double default_anharmonicity(const TransmonParams& p) {
    check_positive(p, "default_anharmonicity");
    return -p.ec;
}

bool transmon_regime(const TransmonParams& p, double max_ratio) {
    check_positive(p, "transmon_regime");
    return p.ec / p.ej < max_ratio;
}

double bare_coupling(const TransmonParams& i, const TransmonParams& j, double ec_ij) {
    check_positive(i, "bare_coupling");
    check_positive(j, "bare_coupling");
    return ec_ij / std::pow(4.0 * i.ec * j.ec, 0.25) * std::pow(i.ej * j.ej, 0.25);
}

double bare_coupling_impedance(const TransmonParams& i, const TransmonParams& j, double ec_ij) {
    check_positive(i, "bare_coupling_impedance");
    check_positive(j, "bare_coupling_impedance");
    const double zi = std::sqrt(8.0 * i.ec / i.ej);
    const double zj = std::sqrt(8.0 * j.ec / j.ej);
    return 2.0 * ec_ij / std::sqrt(zi * zj);
}

double bare_coupling_dispersion(double ec_i, double ec_j, double ec_ij, double omega_i,
                                double omega_j) {
    if (!(ec_i > 0.0) || !(ec_j > 0.0) || !(omega_i > 0.0) || !(omega_j > 0.0))
        throw DomainError("bare_coupling_dispersion: energies and frequencies must be positive");
    return ec_ij / std::sqrt(16.0 * ec_i * ec_j) * std::sqrt(omega_i * omega_j);
}

CouplingGraph::CouplingGraph(int n, std::vector<CouplingEdge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) throw DomainError("CouplingGraph: negative node count");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
        std::ostringstream os;
        os << "CouplingGraph: edge (" << e.i << "," << e.j << ")";
        if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) throw DomainError(os.str() + " references a missing node");
        if (e.i == e.j) throw DomainError(os.str() + " is a self-edge");
        if (!std::isfinite(e.value)) throw DomainError(os.str() + " has a non-finite strength");
        if (!seen.insert({std::min(e.i, e.j), std::max(e.i, e.j)}).second)
            throw DomainError(os.str() + " is duplicated");
    }
}

Eigen::MatrixXd CouplingGraph::dense() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : edges_) g(e.i, e.j) = g(e.j, e.i) = e.value;
    return g;
}

CouplingGraph couplings_from_charging(const CouplingGraph& ec_graph,
                                      const std::vector<TransmonParams>& params) {
    if (static_cast<int>(params.size()) != ec_graph.size())
        throw DomainError("couplings_from_charging: parameter count does not match graph size");
    std::vector<CouplingEdge> out;
    for (const auto& e : ec_graph.edges())
        out.push_back({e.i, e.j, bare_coupling(params[e.i], params[e.j], e.value)});
    return CouplingGraph(ec_graph.size(), std::move(out));
}

DressedParams swt_dress(const CouplingGraph& graph, const std::vector<double>& omega) {
    const int n = graph.size();
    if (static_cast<int>(omega.size()) != n)
        throw DomainError("swt_dress: frequency count does not match graph size");
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (i != k && !(omega[i] + omega[k] > 0.0))
                throw DomainError("swt_dress: frequency sums must be positive");

    const Eigen::MatrixXd g = graph.dense();
    DressedParams d;
    d.omega = omega;
    d.omega_prime.resize(n);
    d.shift.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            if (k != i && g(i, k) != 0.0) s += g(i, k) * g(i, k) / (omega[i] + omega[k]);
        d.shift[i] = -s;
        d.omega_prime[i] = omega[i] - s;
    }
    d.g_correction = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double p = g(i, k) * g(j, k);
                if (p == 0.0) continue;
                s += p / (omega[i] + omega[k]) + p / (omega[j] + omega[k]);
            }
            d.g_correction(i, j) = d.g_correction(j, i) = -0.5 * s;
        }
    d.g_prime = g + d.g_correction;
    return d;
}

DressedParams swt_dress(const CouplingGraph& graph, const std::vector<TransmonParams>& params) {
    std::vector<double> omega;
    omega.reserve(params.size());
    for (const auto& p : params) omega.push_back(bare_frequency(p));
    return swt_dress(graph, omega);
}

} // namespace xtalk
