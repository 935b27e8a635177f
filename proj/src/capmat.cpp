#include "xtalk/capmat.hpp"
#include "xtalk/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace xtalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sinh(x)) for x > 0 without overflow.
double log_sinh(double x) {
    return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

int infer_bandwidth(const Matrix& m) {
    int w = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != 0.0) w = std::max(w, static_cast<int>(j - i));
    return w;
}

} // namespace

BandedSPD BandedSPD::from_dense(const Matrix& m, std::optional<int> bandwidth) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw DomainError("BandedSPD: matrix must be square and non-empty");
    if (!m.allFinite()) throw DomainError("BandedSPD: non-finite entry");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
                std::ostringstream os;
                os << "BandedSPD: not symmetric at (" << i << "," << j << ")";
                throw DomainError(os.str());
            }
    Matrix sym = 0.5 * (m + m.transpose());
    const int inferred = infer_bandwidth(sym);
    int w = inferred;
    if (bandwidth) {
        if (*bandwidth < 0) throw DomainError("BandedSPD: negative bandwidth");
        if (inferred > *bandwidth) {
            std::ostringstream os;
            os << "BandedSPD: nonzero entry at offset " << inferred << " beyond declared bandwidth "
               << *bandwidth;
            throw DomainError(os.str());
        }
        w = *bandwidth;
    }
    (void)cholesky_lower(sym); // throws with the failing step
    return BandedSPD(std::move(sym), w);
}

BandedSPD BandedSPD::from_bands(const std::vector<std::vector<double>>& bands) {
    if (bands.empty() || bands[0].empty()) throw DomainError("BandedSPD: empty band list");
    const auto n = static_cast<Eigen::Index>(bands[0].size());
    if (static_cast<Eigen::Index>(bands.size()) > n)
        throw DomainError("BandedSPD: more bands than the matrix order allows");
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < bands.size(); ++k) {
        if (static_cast<Eigen::Index>(bands[k].size()) != n - static_cast<Eigen::Index>(k)) {
            std::ostringstream os;
            os << "BandedSPD: band " << k << " has length " << bands[k].size() << ", expected "
               << n - static_cast<Eigen::Index>(k);
            throw DomainError(os.str());
        }
        for (Eigen::Index i = 0; i + static_cast<Eigen::Index>(k) < n; ++i) {
            m(i, i + k) = bands[k][i];
            m(i + k, i) = bands[k][i];
        }
    }
    return from_dense(m, static_cast<int>(bands.size()) - 1);
}

std::vector<std::vector<double>> BandedSPD::bands() const {
    std::vector<std::vector<double>> out(w_ + 1);
    const int n = order();
    for (int k = 0; k <= w_; ++k)
        for (int i = 0; i + k < n; ++i) out[k].push_back(m_(i, i + k));
    return out;
}

Matrix cholesky_lower(const Matrix& a) {
    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "matrix is not positive definite: Cholesky pivot " << j
               << " is " << d << " (leading minor of order " << j + 1 << ")";
            throw NotPositiveDefiniteError(os.str(), static_cast<long>(j));
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

Matrix invert_dense(const BandedSPD& m) {
    const Matrix l = cholesky_lower(m.dense());
    const Eigen::Index n = l.rows();
    Matrix x = Matrix::Identity(n, n);
    l.triangularView<Eigen::Lower>().solveInPlace(x);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return 0.5 * (x + x.transpose());
}

// ---------------------------------------------------------------- Toeplitz

namespace {
void check_toeplitz(const ToeplitzTridiag& t) {
    if (t.n < 1) throw DomainError("Toeplitz: order must be >= 1");
    if (t.b == 0.0) throw DomainError("Toeplitz: b = 0, theta undefined (matrix is diagonal)");
    if (!(t.a > 2.0 * std::abs(t.b)))
        throw DomainError("Toeplitz: a <= 2|b|, matrix is not positive definite");
}
} // namespace

double ToeplitzTridiag::theta() const {
    check_toeplitz(*this);
    return std::acosh(a / (2.0 * std::abs(b)));
}

double ToeplitzTridiag::r() const {
    check_toeplitz(*this);
    return (a - std::sqrt(a * a - 4.0 * b * b)) / (2.0 * std::abs(b));
}

Matrix ToeplitzTridiag::dense() const {
    if (n < 1) throw DomainError("Toeplitz: order must be >= 1");
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = a;
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = b;
    }
    return m;
}

BandedSPD ToeplitzTridiag::banded() const {
    return BandedSPD::from_dense(dense(), n > 1 ? 1 : 0);
}

Matrix toeplitz_inverse_closed_form(const ToeplitzTridiag& t) {
    const double th = t.theta();
    const int n = t.n;
    const double ab = std::abs(t.b);
    const double sgn = t.b > 0 ? -1.0 : 1.0; // (-sgn b)
    const double denom = log_sinh(th) + log_sinh((n + 1) * th);
    Matrix inv(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const double mag = std::exp(log_sinh(i * th) + log_sinh((n + 1 - j) * th) - denom) / ab;
            const double v = ((i + j) % 2 == 0 || sgn > 0) ? mag : -mag;
            inv(i - 1, j - 1) = v;
            inv(j - 1, i - 1) = v;
        }
    return inv;
}

Matrix toeplitz_uniform_bound(const ToeplitzTridiag& t) {
    const double th = t.theta();
    const double r = t.r();
    const double c = 1.0 / (std::abs(t.b) * std::sinh(th));
    Matrix m(t.n, t.n);
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) m(i, j) = c * std::pow(r, std::abs(i - j));
    return m;
}

double toeplitz_infinite_diagonal(const ToeplitzTridiag& t) {
    check_toeplitz(t);
    return 1.0 / std::sqrt(t.a * t.a - 4.0 * t.b * t.b);
}

// ---------------------------------------------------------------- walk bound

Eigen::MatrixXi graph_distances(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && m(i, j) != 0.0) adj[i].push_back(j);
    Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, -1);
    for (int s = 0; s < n; ++s) {
        std::queue<int> q;
        d(s, s) = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (d(s, v) < 0) {
                    d(s, v) = d(s, u) + 1;
                    q.push(v);
                }
        }
    }
    return d;
}

WalkBound neumann_walk_bound(const BandedSPD& m, std::optional<double> split_a) {
    const Matrix& c = m.dense();
    const int n = m.order();
    WalkBound wb;
    wb.a = split_a ? *split_a : c.diagonal().maxCoeff();
    if (!(wb.a > 0.0)) throw DomainError("neumann_walk_bound: split a must be positive");

    const Matrix b = wb.a * Matrix::Identity(n, n) - c;
    Eigen::SelfAdjointEigenSolver<Matrix> eb(b, Eigen::EigenvaluesOnly);
    wb.norm_b = eb.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Matrix> ec(c, Eigen::EigenvaluesOnly);
    wb.condition_number = ec.eigenvalues().maxCoeff() / ec.eigenvalues().minCoeff();

    for (int i = 0; i < n; ++i) {
        int deg = 0;
        for (int j = 0; j < n; ++j)
            if (i != j && c(i, j) != 0.0) ++deg;
        wb.nu = std::max(wb.nu, deg);
    }
    wb.dist = graph_distances(c);
    wb.ratio = wb.nu * wb.norm_b / wb.a;
    wb.spectral_ratio = wb.norm_b / wb.a;
    wb.applicable = wb.ratio < 1.0;
    wb.spectral_applicable = wb.spectral_ratio < 1.0;

    auto fill = [&](double q, bool ok) {
        Matrix out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int d = wb.dist(i, j);
                if (!ok) out(i, j) = kInf;
                else if (d < 0) out(i, j) = 0.0;
                else out(i, j) = std::pow(q, d) / (wb.a * (1.0 - q));
            }
        return out;
    };
    wb.bound = fill(wb.ratio, wb.applicable);
    wb.spectral_bound = fill(wb.spectral_ratio, wb.spectral_applicable);
    return wb;
}

// ---------------------------------------------------------------- 2D lattice

namespace {
void check_lattice(const Lattice2DSpec& s) {
    if (s.m < 1 || s.n < 1) throw DomainError("Lattice2D: grid dimensions must be >= 1");
    if (!(s.a > 4.0 * std::abs(s.b)))
        throw DomainError("Lattice2D: a <= 4|b|, positive definiteness not guaranteed");
}

Matrix shift_matrix(int n) {
    Matrix s = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) s(i, i + 1) = s(i + 1, i) = 1.0;
    return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix sine_basis(int n) {
    Matrix p(n, n);
    const double c = std::sqrt(2.0 / (n + 1));
    for (int x = 1; x <= n; ++x)
        for (int k = 1; k <= n; ++k) p(x - 1, k - 1) = c * std::sin(k * M_PI * x / (n + 1));
    return p;
}
} // namespace

Matrix Lattice2DSpec::dense() const {
    if (m < 1 || n < 1) throw DomainError("Lattice2D: grid dimensions must be >= 1");
    const Matrix im = Matrix::Identity(m, m), in = Matrix::Identity(n, n);
    return a * Matrix::Identity(m * n, m * n) + b * (kron(im, shift_matrix(n)) + kron(shift_matrix(m), in));
}

Matrix lattice2d_inverse_spectral(const Lattice2DSpec& s) {
    check_lattice(s);
    const Matrix u = kron(sine_basis(s.m), sine_basis(s.n));
    Vector inv_lambda(s.m * s.n);
    for (int p = 1; p <= s.m; ++p)
        for (int q = 1; q <= s.n; ++q) {
            const double lam = s.a + s.b * (2.0 * std::cos(p * M_PI / (s.m + 1)) +
                                             2.0 * std::cos(q * M_PI / (s.n + 1)));
            inv_lambda((p - 1) * s.n + (q - 1)) = 1.0 / lam;
        }
    Matrix out = u * inv_lambda.asDiagonal() * u.transpose();
    return 0.5 * (out + out.transpose());
}

ContinuumKappa continuum_kappa(const Lattice2DSpec& s) {
    if (s.b == 0.0) throw DomainError("continuum_kappa: b = 0, gap-only regime (no spatial coupling)");
    const double gap = s.a - 4.0 * std::abs(s.b);
    if (gap < 0.0) throw DomainError("continuum_kappa: a < 4|b|, no spectral gap");
    ContinuumKappa k;
    k.kappa = std::sqrt(2.0 * gap / std::abs(s.b));
    k.xi = k.kappa > 0.0 ? 1.0 / k.kappa : kInf;
    return k;
}

double lattice2d_diagonal_rate(const Lattice2DSpec& s) {
    check_lattice(s);
    if (s.b == 0.0) throw DomainError("lattice2d_diagonal_rate: b = 0");
    return std::acosh(s.a / (4.0 * std::abs(s.b)));
}

// ---------------------------------------------------------------- decay fit

std::vector<Site> chain_sites(int n) {
    std::vector<Site> s(n);
    for (int i = 0; i < n; ++i) s[i] = {static_cast<double>(i), 0.0};
    return s;
}

std::vector<Site> grid_sites(int m, int n) {
    std::vector<Site> s;
    s.reserve(static_cast<std::size_t>(m) * n);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < n; ++y) s.push_back({static_cast<double>(x), static_cast<double>(y)});
    return s;
}

namespace {
Matrix metric_distances(const std::vector<Site>& p, Metric metric) {
    const auto n = static_cast<Eigen::Index>(p.size());
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
            d(i, j) = metric == Metric::Euclidean ? std::hypot(dx, dy) : std::abs(dx) + std::abs(dy);
        }
    return d;
}
} // namespace

DecayEstimate fit_decay(const Matrix& inverse, const std::vector<Site>& positions, Metric metric,
                        const FitDecayOptions& opt) {
    if (metric == Metric::Graph)
        throw DomainError("fit_decay: graph metric needs an explicit distance table");
    return fit_decay(inverse, positions, metric_distances(positions, metric), metric, opt);
}

DecayEstimate fit_decay(const Matrix& inverse, const std::vector<Site>& positions,
                        const Matrix& distances, Metric metric, const FitDecayOptions& opt) {
    const auto n = static_cast<Eigen::Index>(positions.size());
    if (inverse.rows() != n || inverse.cols() != n || distances.rows() != n || distances.cols() != n)
        throw DomainError("fit_decay: size mismatch between matrix, positions and distances");

    const double margin = opt.boundary_exclusion < 0 ? 2.0 * opt.bandwidth : opt.boundary_exclusion;
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto& s : positions) {
        xmin = std::min(xmin, s.x); xmax = std::max(xmax, s.x);
        ymin = std::min(ymin, s.y); ymax = std::max(ymax, s.y);
    }
    // Axes with zero extent (a 1D chain's y) carry no boundary.
    auto interior = [&](const Site& s) {
        if (xmax > xmin && (s.x - xmin < margin || xmax - s.x < margin)) return false;
        if (ymax > ymin && (s.y - ymin < margin || ymax - s.y < margin)) return false;
        return true;
    };

    std::map<long long, std::pair<double, double>> shells; // key -> (distance, max)
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!interior(positions[i])) continue;
        for (Eigen::Index j = i; j < n; ++j) {
            if (!interior(positions[j])) continue;
            const double d = distances(i, j);
            if (d < 0) continue;
            const long long key = std::llround(d * 1e9);
            auto& sh = shells[key];
            sh.first = d;
            sh.second = std::max(sh.second, std::abs(inverse(i, j)));
        }
    }

    DecayEstimate est;
    est.metric = metric;
    for (const auto& [key, sh] : shells)
        if (sh.second > opt.floor) {
            est.shell_distance.push_back(sh.first);
            est.shell_max.push_back(sh.second);
        }
    const auto k = est.shell_distance.size();
    if (k < 3)
        throw InsufficientDataError("fit_decay: fewer than 3 distance shells above the floor");

    Eigen::MatrixXd x(k, 2);
    Vector y(k);
    for (std::size_t s = 0; s < k; ++s) {
        x(s, 0) = 1.0;
        x(s, 1) = est.shell_distance[s];
        y(s) = std::log(est.shell_max[s]);
    }
    const Vector beta = x.colPivHouseholderQr().solve(y);
    const Vector res = y - x * beta;
    est.prefactor = std::exp(beta(0));
    est.gamma = -beta(1);
    est.residual_norm = res.norm();
    est.residuals.assign(res.data(), res.data() + res.size());
    const double ss_tot = (y.array() - y.mean()).square().sum();
    est.r_squared = ss_tot > 0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
    return est;
}

// ---------------------------------------------------------------- I/O

void write_matrix_csv(std::ostream& os, const BandedSPD& m) {
    const int n = m.order();
    os << "# " << n << "," << m.bandwidth() << "\n";
    os << std::setprecision(17);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) os << (j ? "," : "") << m(i, j);
        os << "\n";
    }
}

BandedSPD read_matrix_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#')
        throw SchemaError("expected '# n,w' header", "line 1");
    int n = 0, w = 0;
    {
        std::string body = line.substr(1);
        std::replace(body.begin(), body.end(), ',', ' ');
        std::istringstream hs(body);
        if (!(hs >> n >> w) || n < 1 || w < 0) throw SchemaError("malformed '# n,w' header", "line 1");
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const std::string where = "line " + std::to_string(i + 2);
        if (!std::getline(is, line)) throw SchemaError("missing matrix row", where);
        std::istringstream rs(line);
        std::string cell;
        int j = 0;
        while (std::getline(rs, cell, ',')) {
            if (j >= n) throw SchemaError("too many columns", where);
            try {
                std::size_t used = 0;
                m(i, j) = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw SchemaError("not a number: '" + cell + "'", where);
            }
            ++j;
        }
        if (j != n) throw SchemaError("expected " + std::to_string(n) + " columns", where);
    }
    return BandedSPD::from_dense(m, w);
}

std::string matrix_to_json(const BandedSPD& m) {
    nlohmann::json j;
    j["order"] = m.order();
    j["bandwidth"] = m.bandwidth();
    j["bands"] = m.bands();
    return j.dump();
}

BandedSPD matrix_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(e.what(), "$");
    }
    for (const char* key : {"order", "bandwidth", "bands"})
        if (!j.contains(key)) throw SchemaError(std::string("missing key '") + key + "'", "$");
    const int n = j["order"].get<int>();
    const int w = j["bandwidth"].get<int>();
    auto bands = j["bands"].get<std::vector<std::vector<double>>>();
    if (static_cast<int>(bands.size()) != w + 1)
        throw SchemaError("bands length must equal bandwidth + 1", "$.bands");
    if (bands[0].size() != static_cast<std::size_t>(n))
        throw SchemaError("diagonal length must equal order", "$.bands[0]");
    return BandedSPD::from_bands(bands);
}

} // namespace xtalk
