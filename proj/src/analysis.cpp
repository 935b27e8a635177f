#include "xtalk/analysis.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/special.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace xtalk {

GridPos lattice_position(int index, int rows, int cols) {
    if (rows < 1 || cols < 1) throw DomainError("lattice_position: grid must be at least 1x1");
    if (index < 0 || index >= rows * cols) {
        std::ostringstream os;
        os << "lattice_position: index " << index << " outside a " << rows << "x" << cols << " grid";
        throw DomainError(os.str());
    }
    return {index / cols, index % cols};
}

std::vector<GridPos> lattice_positions(int rows, int cols) {
    std::vector<GridPos> p;
    for (int i = 0; i < rows * cols; ++i) p.push_back(lattice_position(i, rows, cols));
    return p;
}

int manhattan(const GridPos& a, const GridPos& b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

double euclidean(const GridPos& a, const GridPos& b, double pitch_mm) {
    return pitch_mm * std::hypot(static_cast<double>(a.row - b.row), static_cast<double>(a.col - b.col));
}

MeasurementTable read_measurements_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        header = split(line);
    }
    const std::vector<std::string> want = {"i", "j", "zz_khz", "ci_low", "ci_high"};
    const bool has_ts = header.size() == 6 && header[5] == "timestamp";
    if (header.size() < 5 || !std::equal(want.begin(), want.end(), header.begin()) || (header.size() == 6 && !has_ts) ||
        header.size() > 6)
        throw SchemaError("header must be i,j,zz_khz,ci_low,ci_high[,timestamp]", "line " + std::to_string(line_no));
    MeasurementTable t;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = "line " + std::to_string(line_no);
        const auto c = split(line);
        if (c.size() != header.size()) throw SchemaError("wrong number of cells", where);
        auto parse = [&](const std::string& s, const char* col) {
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw SchemaError(std::string("column '") + col + "' is not numeric: '" + s + "'", where);
            }
        };
        MeasurementRow r;
        const double i = parse(c[0], "i"), j = parse(c[1], "j");
        if (i != std::floor(i) || j != std::floor(j)) throw SchemaError("pair indices must be integers", where);
        r.i = static_cast<int>(i);
        r.j = static_cast<int>(j);
        r.zz_khz = parse(c[2], "zz_khz");
        if (!c[3].empty()) r.ci_low = parse(c[3], "ci_low");
        if (!c[4].empty()) r.ci_high = parse(c[4], "ci_high");
        if (r.ci_low.has_value() != r.ci_high.has_value()) throw SchemaError("CI needs both bounds", where);
        if (r.ci_low && *r.ci_low > *r.ci_high) throw SchemaError("ci_low > ci_high", where);
        if (has_ts) r.timestamp = c[5];
        t.push_back(r);
    }
    return t;
}

void validate_table(const MeasurementTable& t, int n_qubits) {
    for (std::size_t r = 0; r < t.size(); ++r) {
        const auto& m = t[r];
        std::ostringstream os;
        os << "measurement row " << r << " (" << m.i << "," << m.j << "): ";
        if (m.i < 0 || m.j < 0 || m.i >= n_qubits || m.j >= n_qubits || m.i == m.j)
            throw DomainError(os.str() + "invalid pair indices");
        if (!std::isfinite(m.zz_khz)) throw DomainError(os.str() + "non-finite zz");
        if (m.ci_low.has_value() != m.ci_high.has_value())
            throw DomainError(os.str() + "confidence interval needs both bounds");
        if (m.ci_low && *m.ci_low > *m.ci_high) throw DomainError(os.str() + "ci_low > ci_high");
    }
}

std::string to_string(ExclusionReason r) {
    switch (r) {
    case ExclusionReason::StraddlingOutlier: return "straddling-outlier";
    case ExclusionReason::BelowThreshold: return "below-threshold";
    case ExclusionReason::CIIncludesZero: return "CI-includes-zero";
    }
    return "unknown";
}

FilterResult filter_measurements(const MeasurementTable& t, double threshold_khz,
                                 const std::vector<std::pair<int, int>>& outliers) {
    if (!(threshold_khz >= 0.0)) throw DomainError("filter_measurements: threshold must be >= 0");
    std::set<std::pair<int, int>> out;
    for (auto [a, b] : outliers) out.insert({std::min(a, b), std::max(a, b)});
    FilterResult r;
    for (const auto& m : t) {
        if (out.count({std::min(m.i, m.j), std::max(m.i, m.j)})) {
            r.excluded.push_back({m, ExclusionReason::StraddlingOutlier});
        } else if (std::abs(m.zz_khz) < threshold_khz) {
            r.excluded.push_back({m, ExclusionReason::BelowThreshold});
        } else if (m.ci_low && *m.ci_low <= 0.0 && *m.ci_high >= 0.0) {
            r.excluded.push_back({m, ExclusionReason::CIIncludesZero});
        } else {
            r.kept.push_back(m);
        }
    }
    return r;
}

double zz_to_j_naive(double zeta, const PairSpectrum& p, int i, int j, double pole_tol) {
    PairSpectrum unit = p;
    unit.j = 1.0;
    const double per_j2 = zz_nn(unit, pole_tol).zeta; // ζ/J², checks the poles
    if (zeta == 0.0) return 0.0;
    const double rad = zeta / per_j2;
    if (!(rad >= 0.0)) {
        std::ostringstream os;
        os << "zz_to_j_naive: pair (" << i << "," << j << ") has zeta=" << zeta
           << " with sign opposite to the perturbative prefactor " << per_j2;
        throw SignInconsistencyError(os.str(), i, j);
    }
    return std::sqrt(rad);
}

SummaryStats summarize(const std::vector<double>& v) {
    SummaryStats s;
    s.count = v.size();
    if (v.empty()) return s;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev_population = std::sqrt(ss / v.size());
    s.stddev_sample = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    return s;
}

std::vector<ShellStat> shell_statistics(const MeasurementTable& t, const std::vector<GridPos>& pos) {
    std::map<int, std::vector<double>> by_d;
    for (const auto& m : t) {
        if (m.i < 0 || m.j < 0 || m.i >= static_cast<int>(pos.size()) || m.j >= static_cast<int>(pos.size()))
            throw DomainError("shell_statistics: pair index without a position");
        by_d[manhattan(pos[m.i], pos[m.j])].push_back(std::abs(m.zz_khz));
    }
    std::vector<ShellStat> out;
    for (const auto& [d, vals] : by_d) {
        const auto s = summarize(vals);
        out.push_back({static_cast<double>(d), s.count, s.mean, s.stddev_sample});
    }
    return out;
}

namespace {

struct LineFit {
    double intercept = 0.0, slope = 0.0, r2 = 0.0;
    std::vector<double> residuals;
};

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    const std::size_t n = x.size();
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sw += w[k];
        sx += w[k] * x[k];
        sy += w[k] * y[k];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += w[k] * (x[k] - mx) * (x[k] - mx);
        sxy += w[k] * (x[k] - mx) * (y[k] - my);
        syy += w[k] * (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit: all points share one distance");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = y[k] - (f.intercept + f.slope * x[k]);
        f.residuals.push_back(r);
        sse += w[k] * r * r;
    }
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    return f;
}

} // namespace

ScalingFit fit_exponential(const std::vector<double>& distance, const std::vector<double>& value,
                           const std::vector<double>& weight) {
    if (distance.size() != value.size() || (!weight.empty() && weight.size() != value.size()))
        throw DomainError("fit_exponential: size mismatch");
    std::vector<double> x, y, w;
    for (std::size_t k = 0; k < value.size(); ++k) {
        if (!(std::abs(value[k]) > 0.0)) continue;
        x.push_back(distance[k]);
        y.push_back(std::log(std::abs(value[k])));
        w.push_back(weight.empty() ? 1.0 : weight[k]);
    }
    std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < 2) throw InsufficientDataError("fit_exponential: fewer than 2 distance shells");
    const LineFit f = weighted_line(x, y, w);
    ScalingFit s;
    s.model = ScalingModel::ExpManhattan;
    s.amplitude = std::exp(f.intercept);
    if (!(f.slope < 0.0)) {
        std::ostringstream os;
        os << "fit_exponential: data do not decay (slope " << f.slope << ")";
        throw InsufficientDataError(os.str());
    }
    s.length = -1.0 / f.slope;
    s.r_squared = f.r2;
    s.residuals = f.residuals;
    return s;
}

ScalingFit fit_manhattan_decay(const MeasurementTable& t, const std::vector<GridPos>& pos,
                               const ManhattanFitOptions& opt) {
    const auto shells = shell_statistics(t, pos);
    if (shells.size() < 2) throw InsufficientDataError("fit_manhattan_decay: fewer than 2 distance shells");
    std::vector<double> x, y, w;
    if (opt.population == FitPopulation::ShellMeans) {
        std::map<int, std::vector<double>> var_by_d;
        if (opt.weighting == FitWeighting::InverseVariance)
            for (const auto& m : t) {
                if (!m.ci_low) throw DomainError("fit_manhattan_decay: inverse-variance weighting needs CIs");
                const double sigma = (*m.ci_high - *m.ci_low) / (2.0 * 1.959963984540054);
                var_by_d[manhattan(pos[m.i], pos[m.j])].push_back(sigma * sigma);
            }
        for (const auto& sh : shells) {
            x.push_back(sh.distance);
            y.push_back(sh.mean);
            if (opt.weighting == FitWeighting::InverseVariance) {
                double v = 0;
                for (double s2 : var_by_d[static_cast<int>(sh.distance)]) v += s2;
                const double sd_mean = std::sqrt(v) / sh.count;
                const double sd_log = sd_mean / sh.mean;
                w.push_back(sd_log > 0 ? 1.0 / (sd_log * sd_log) : 1.0);
            }
        }
    } else {
        for (const auto& m : t) {
            x.push_back(manhattan(pos[m.i], pos[m.j]));
            y.push_back(m.zz_khz);
            if (opt.weighting == FitWeighting::InverseVariance) {
                if (!m.ci_low) throw DomainError("fit_manhattan_decay: inverse-variance weighting needs CIs");
                const double sigma = (*m.ci_high - *m.ci_low) / (2.0 * 1.959963984540054);
                const double sd_log = sigma / std::abs(m.zz_khz);
                w.push_back(sd_log > 0 ? 1.0 / (sd_log * sd_log) : 1.0);
            }
        }
    }
    ScalingFit f = fit_exponential(x, y, w);
    f.shells = shells;
    return f;
}

ScalingFit fit_k0_euclidean(const std::vector<double>& d, const std::vector<double>& value, double power) {
    if (d.size() != value.size()) throw DomainError("fit_k0_euclidean: size mismatch");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < d.size(); ++k)
        if (std::abs(value[k]) > 0.0 && d[k] > 0.0) {
            x.push_back(d[k]);
            y.push_back(std::log(std::abs(value[k])));
        }
    if (std::set<double>(x.begin(), x.end()).size() < 2)
        throw InsufficientDataError("fit_k0_euclidean: fewer than 2 distinct distances");
    const double dmin = *std::min_element(x.begin(), x.end());
    const double dmax = *std::max_element(x.begin(), x.end());

    // For fixed d0 the log-amplitude is the mean offset; minimise the SSE over ln d0.
    auto model = [&](double log_d0, double& log_a) {
        const double d0 = std::exp(log_d0);
        double off = 0;
        std::vector<double> lk(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double z = x[k] / d0;
            lk[k] = power * (std::log(k0_scaled(z)) - z);
            off += y[k] - lk[k];
        }
        log_a = off / x.size();
        double sse = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double r = y[k] - log_a - lk[k];
            sse += r * r;
        }
        return sse;
    };
    double log_a = 0;
    const auto best = boost::math::tools::brent_find_minima(
        [&](double ld) { double la; return model(ld, la); }, std::log(dmin * 1e-2), std::log(dmax * 1e2), 50);
    model(best.first, log_a);

    ScalingFit f;
    f.model = ScalingModel::K0Euclidean;
    f.length = std::exp(best.first);
    f.amplitude = std::exp(log_a);
    double my = 0;
    for (double v : y) my += v;
    my /= y.size();
    double syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double z = x[k] / f.length;
        const double r = y[k] - log_a - power * (std::log(k0_scaled(z)) - z);
        f.residuals.push_back(r);
        syy += (y[k] - my) * (y[k] - my);
    }
    f.r_squared = syy > 0 ? 1.0 - best.second / syy : 1.0;
    return f;
}

std::vector<CouplingRow> apply_scaling_correction(const std::vector<CouplingRow>& unscaled, EnvelopeKind kind,
                                                  double d0_mm, double nn_spacing_mm) {
    if (!(d0_mm > 0.0) || !(nn_spacing_mm > 0.0))
        throw DomainError("apply_scaling_correction: lengths must be positive");
    std::vector<CouplingRow> out = unscaled;
    for (auto& r : out) {
        if (!(r.distance_mm > 0.0)) throw DomainError("apply_scaling_correction: distance must be positive");
        double env;
        if (kind == EnvelopeKind::Exp) {
            env = std::exp(-(r.distance_mm - nn_spacing_mm) / d0_mm);
        } else {
            const double z = r.distance_mm / d0_mm, z0 = nn_spacing_mm / d0_mm;
            env = std::exp(-(z - z0)) * k0_scaled(z) / k0_scaled(z0);
        }
        r.j_mhz *= env;
    }
    return out;
}

std::vector<CouplingRow> apply_scaling_correction(const std::vector<CouplingRow>& unscaled, double s) {
    std::vector<CouplingRow> out = unscaled;
    for (auto& r : out) r.j_mhz *= s;
    return out;
}

double fit_global_factor(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw InsufficientDataError("fit_global_factor: need matching non-empty columns");
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += x[k] * y[k];
        sxx += x[k] * x[k];
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit_global_factor: unscaled column is all zero");
    return sxy / sxx;
}

} // namespace xtalk
