#include "xtalk/exactdiag.hpp"
#include "xtalk/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace xtalk {

int LatticeHamiltonian::pair_index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("pair_index: mode index out of range");
    if (i == j) return i;
    if (i > j) std::swap(i, j);
    // Pairs follow the N doubles in row-major (i<j) order.
    return n + i * (2 * n - i - 1) / 2 + (j - i - 1);
}

LatticeHamiltonian build_sectors(const std::vector<double>& omega, const std::vector<double>& alpha,
                                 const Eigen::MatrixXd& j) {
    const int n = static_cast<int>(omega.size());
    if (n < 2) throw DomainError("build_sectors: need at least two modes");
    if (static_cast<int>(alpha.size()) != n || j.rows() != n || j.cols() != n)
        throw DomainError("build_sectors: omega, alpha and J sizes disagree");
    if (!j.allFinite()) throw DomainError("build_sectors: non-finite coupling");
    for (int a = 0; a < n; ++a) {
        if (!std::isfinite(omega[a]) || !std::isfinite(alpha[a]))
            throw DomainError("build_sectors: non-finite frequency or anharmonicity");
        for (int b = a + 1; b < n; ++b)
            if (j(a, b) != j(b, a)) {
                std::ostringstream os;
                os << "build_sectors: coupling table is not symmetric at (" << a << "," << b << ")";
                throw DomainError(os.str());
            }
    }

    LatticeHamiltonian h;
    h.n = n;
    h.omega = omega;
    h.alpha = alpha;
    h.j = j;
    h.reference = std::accumulate(omega.begin(), omega.end(), 0.0) / n;
    std::vector<double> w(n);
    for (int a = 0; a < n; ++a) w[a] = omega[a] - h.reference;

    h.sector1 = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) h.sector1(a, b) = a == b ? w[a] : j(a, b);

    const int dim = n * (n + 1) / 2;
    h.basis2.reserve(dim);
    for (int a = 0; a < n; ++a) h.basis2.emplace_back(a, a);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) h.basis2.emplace_back(a, b);

    const double sqrt2 = std::sqrt(2.0);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < n; ++a) s2(a, a) = 2.0 * w[a] + alpha[a];
    for (int col = n; col < dim; ++col) {
        const auto [p, q] = h.basis2[col];
        s2(col, col) = w[p] + w[q];
        // Move the excitation on p to k (or the one on q), keeping the other.
        for (int k = 0; k < n; ++k) {
            if (k != p && j(k, p) != 0.0) {
                const int row = h.pair_index(k, q);
                s2(row, col) += (k == q ? sqrt2 : 1.0) * j(k, p);
            }
            if (k != q && j(k, q) != 0.0) {
                const int row = h.pair_index(k, p);
                s2(row, col) += (k == p ? sqrt2 : 1.0) * j(k, q);
            }
        }
    }
    // Doubles couple only to pairs; fill their rows from the symmetric partner.
    for (int a = 0; a < n; ++a)
        for (int col = n; col < dim; ++col) s2(col, a) = s2(a, col);
    h.sector2 = s2;
    return h;
}

SectorSolution::SectorSolution(const LatticeHamiltonian& h) : h_(&h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s1(h.sector1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s2(h.sector2);
    if (s1.info() != Eigen::Success || s2.info() != Eigen::Success)
        throw Error("exact diagonalization: eigensolver did not converge");
    e1_ = s1.eigenvalues();
    v1_ = s1.eigenvectors();
    e2_ = s2.eigenvalues();
    v2_ = s2.eigenvectors();
}

LabelAssignment SectorSolution::assign(const Eigen::MatrixXd& v, int row, std::string label) const {
    LabelAssignment a;
    a.label = std::move(label);
    for (int k = 0; k < v.cols(); ++k) {
        const double ov = v(row, k) * v(row, k);
        if (a.eigen_index < 0 || ov > a.overlap) {
            a.eigen_index = k;
            a.overlap = ov;
        }
    }
    for (int k = 0; k < v.cols(); ++k) {
        if (k == a.eigen_index) continue;
        const double ov = v(row, k) * v(row, k);
        if (a.runner_up < 0 || ov > a.runner_overlap) {
            a.runner_up = k;
            a.runner_overlap = ov;
        }
    }
    if (a.runner_up >= 0 && a.overlap - a.runner_overlap < 1e-9) {
        a.tie = true;
        if (a.runner_up < a.eigen_index) {
            std::swap(a.eigen_index, a.runner_up);
            std::swap(a.overlap, a.runner_overlap);
        }
    }
    if (!(a.overlap > 0.5)) {
        std::ostringstream os;
        os << "dressed-state assignment failed for |" << a.label << ">: best overlap^2 " << a.overlap
           << " (eigenstate " << a.eigen_index << "), runner-up " << a.runner_overlap << " (eigenstate "
           << a.runner_up << ")";
        throw AssignmentError(os.str(), a.label, a.eigen_index, a.runner_up, a.overlap, a.runner_overlap);
    }
    return a;
}

LabelAssignment SectorSolution::assign_single(int i) const {
    if (i < 0 || i >= h_->n) throw DomainError("assign_single: mode index out of range");
    return assign(v1_, i, "1_" + std::to_string(i));
}

LabelAssignment SectorSolution::assign_pair(int i, int j) const {
    if (i == j) throw DomainError("assign_pair: indices must differ");
    if (i > j) std::swap(i, j);
    return assign(v2_, h_->pair_index(i, j), "1_" + std::to_string(i) + "1_" + std::to_string(j));
}

LabelAssignment SectorSolution::assign_double(int i) const {
    return assign(v2_, h_->pair_index(i, i), "2_" + std::to_string(i));
}

std::vector<LabelAssignment> SectorSolution::all_assignments() const {
    std::vector<LabelAssignment> out;
    auto push = [&](auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const AssignmentError& e) {
            LabelAssignment a;
            a.label = e.label();
            a.eigen_index = -1;
            a.overlap = e.best_overlap();
            a.runner_up = e.runner_up();
            a.runner_overlap = e.runner_overlap();
            out.push_back(a);
        }
    };
    const int n = h_->n;
    for (int i = 0; i < n; ++i) push([&] { return assign_single(i); });
    for (int i = 0; i < n; ++i) push([&] { return assign_double(i); });
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) push([&] { return assign_pair(i, j); });
    return out;
}

double zz_exact(const SectorSolution& s, int i, int j) {
    const auto ai = s.assign_single(i);
    const auto aj = s.assign_single(j);
    const auto aij = s.assign_pair(i, j);
    // Shifted energies: the references cancel (2·ref − ref − ref), E(0) = 0.
    return s.energies2()(aij.eigen_index) - s.energies1()(ai.eigen_index) - s.energies1()(aj.eigen_index);
}

double zz_exact(const LatticeHamiltonian& h, int i, int j) {
    return zz_exact(SectorSolution(h), i, j);
}

ZZMatrix zz_matrix_exact(const LatticeHamiltonian& h) {
    const SectorSolution s(h);
    ZZMatrix z;
    z.method = ZZMethod::ExactDiag;
    z.zeta = Eigen::MatrixXd::Zero(h.n, h.n);
    z.flags = Eigen::MatrixXi::Zero(h.n, h.n);
    for (int i = 0; i < h.n; ++i)
        for (int j = i + 1; j < h.n; ++j) {
            double v;
            int flag = kZZOk;
            try {
                v = zz_exact(s, i, j);
                if (std::abs(v) < kExactDiagFloorMHz) flag = kZZFloor;
            } catch (const AssignmentError&) {
                v = std::numeric_limits<double>::quiet_NaN();
                flag = kZZAssignmentFailed;
            }
            z.zeta(i, j) = z.zeta(j, i) = v;
            z.flags(i, j) = z.flags(j, i) = flag;
        }
    return z;
}

} // namespace xtalk
