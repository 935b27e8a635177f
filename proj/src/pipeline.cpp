#include "xtalk/pipeline.hpp"
#include "xtalk/capmat.hpp"
#include "xtalk/circuit.hpp"
#include "xtalk/enclosure.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/exactdiag.hpp"
#include "xtalk/mediator.hpp"
#include "xtalk/special.hpp"
#include "xtalk/zz.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace xtalk {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& pipeline_commands() {
    static const std::vector<std::string> c = {"capmat", "couplings", "chain", "enclosure",
                                               "zz predict", "ed", "fit", "report"};
    return c;
}

std::vector<std::string> lint_csv_header(const std::string& header_line) {
    static const char* suffixes[] = {"_mhz", "_khz", "_mm", "_sites", "_per_mm", "_ff", "_per_ff", "_ratio"};
    static const std::set<std::string> plain = {"i", "j", "index", "label", "count", "flags"};
    std::vector<std::string> bad;
    std::istringstream in(header_line);
    std::string col;
    while (std::getline(in, col, ',')) {
        if (plain.count(col)) continue;
        bool ok = false;
        for (const char* s : suffixes) {
            const std::string suf = s;
            ok = ok || (col.size() > suf.size() && col.compare(col.size() - suf.size(), suf.size(), suf) == 0);
        }
        if (!ok) bad.push_back(col);
    }
    return bad;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : f_(path, std::ios::binary) {
        if (!f_) throw Error("cannot write " + path.string());
        const auto bad = lint_csv_header(header);
        if (!bad.empty()) throw std::logic_error("CSV column without unit suffix: " + bad.front());
        f_ << header << '\n';
    }
    template <class... T>
    void row(const T&... cells) {
        bool first = true;
        ((f_ << (first ? "" : ",") << cell(cells), first = false), ...);
        f_ << '\n';
    }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    std::ofstream f_;
};

struct Predictions {
    Eigen::MatrixXd zeta;   ///< perturbative NN/NNN, MHz; NaN where not defined
    Eigen::MatrixXd scaled; ///< scaling-law estimate, MHz
    Eigen::MatrixXi flags;
};

struct Context {
    Context(const DeviceSpec& s, const PipelineOptions& o, fs::path dir, RunReport& r)
        : spec(s), opt(o), out(std::move(dir)), report(r) {}
    const DeviceSpec& spec;
    const PipelineOptions& opt;
    fs::path out;
    RunReport& report;
    json summary = json::object();
    int n = 0;
    std::vector<GridPos> pos;
    Eigen::MatrixXd j;
    std::vector<double> omega, alpha;
    std::optional<ZZMatrix> exact;
    std::optional<Predictions> predicted;

    double threshold() const { return opt.threshold_khz.value_or(spec.analysis.threshold_khz); }
    double pole_tol() const { return spec.analysis.pole_tolerance_mhz; }
    int dist(int a, int b) const { return manhattan(pos[a], pos[b]); }
    double dist_mm(int a, int b) const { return euclidean(pos[a], pos[b], spec.pitch_mm); }
    Csv csv(const std::string& name, const std::string& header) {
        report.outputs.push_back(name);
        return Csv(out / name, header);
    }
    void warn(const std::string& w) { report.warnings.push_back(w); }
};

std::string pair_name(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

void cmd_capmat(Context& c) {
    if (!c.spec.capacitance) {
        c.warn("capmat: skipped, the device spec has no capacitance block");
        return;
    }
    const Lattice2DSpec lat{c.spec.rows, c.spec.cols, c.spec.capacitance->self_ff, c.spec.capacitance->mutual_ff};
    const auto cm = BandedSPD::from_dense(lat.dense());
    const Matrix inv = invert_dense(cm);
    const WalkBound wb = neumann_walk_bound(cm);
    const int sites = c.spec.rows * c.spec.cols;
    auto w = c.csv("capmat_inverse.csv", "i,j,manhattan_sites,distance_mm,cinv_per_ff,walk_bound_per_ff,spectral_bound_per_ff");
    std::vector<GridPos> grid = lattice_positions(c.spec.rows, c.spec.cols);
    for (int a = 0; a < sites; ++a)
        for (int b = a; b < sites; ++b)
            w.row(a, b, manhattan(grid[a], grid[b]), euclidean(grid[a], grid[b], c.spec.pitch_mm), inv(a, b),
                  wb.bound(a, b), wb.spectral_bound(a, b));
    json s = {{"walk_ratio", wb.ratio}, {"walk_applicable", wb.applicable},
              {"spectral_ratio", wb.spectral_ratio}, {"condition_number", wb.condition_number}};
    if (!wb.applicable)
        c.warn("capmat: walk bound inapplicable (nu*|B|/a = " + num(wb.ratio) + " >= 1); no guarantee");
    FitDecayOptions fo;
    fo.boundary_exclusion = 0.0;
    try {
        const auto d = fit_decay(inv, grid_sites(c.spec.rows, c.spec.cols), Metric::Manhattan, fo);
        s["decay_rate_per_site"] = d.gamma;
        s["decay_r_squared"] = d.r_squared;
    } catch (const InsufficientDataError& e) {
        c.warn(std::string("capmat: decay fit skipped: ") + e.what());
    }
    if (lat.a > 4.0 * std::abs(lat.b)) s["diagonal_rate_per_site"] = lattice2d_diagonal_rate(lat);
    c.summary["capmat"] = s;
}

void cmd_couplings(Context& c) {
    std::vector<CouplingEdge> edges;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b)
            if (c.j(a, b) != 0.0) edges.push_back({a, b, c.j(a, b)});
    const CouplingGraph g(c.n, edges);
    const DressedParams d = swt_dress(g, c.omega);
    auto q = c.csv("couplings_qubits.csv", "index,omega_mhz,omega_dressed_mhz,alpha_mhz");
    for (int a = 0; a < c.n; ++a) q.row(a, c.omega[a], d.omega_prime[a], c.alpha[a]);
    auto w = c.csv("couplings.csv", "i,j,manhattan_sites,distance_mm,j_mhz,j_dressed_mhz");
    std::vector<double> nn;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            if (c.j(a, b) == 0.0 && d.g_prime(a, b) == 0.0) continue;
            w.row(a, b, c.dist(a, b), c.dist_mm(a, b), c.j(a, b), d.g_prime(a, b));
            if (c.j(a, b) != 0.0) nn.push_back(c.j(a, b));
        }
    if (edges.empty()) c.warn("couplings: the device spec has no edges; predictions reduce to single-qubit outputs");
    const auto st = summarize(nn);
    c.summary["couplings"] = {{"edges", st.count}, {"mean_j_mhz", st.mean}, {"min_j_mhz", st.min},
                              {"max_j_mhz", st.max}, {"stddev_sample_j_mhz", st.stddev_sample},
                              {"stddev_population_j_mhz", st.stddev_population}};
}

void cmd_chain(Context& c) {
    if (c.n != c.spec.rows * c.spec.cols) {
        c.warn("chain: skipped, the grid is not fully populated");
        return;
    }
    auto w = c.csv("chain.csv", "i,j,manhattan_sites,distance_mm,jeff_exact_mhz,jeff_product_mhz,gap_ratio,dispersive_ratio");
    int rows = 0, resonant = 0;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            if (c.dist(a, b) < 2) continue;
            // Row-first lattice path from a to b; intermediate qubits act as mediators.
            std::vector<int> path = {a};
            GridPos p = c.pos[a];
            const GridPos t = c.pos[b];
            while (p.row != t.row || p.col != t.col) {
                if (p.col != t.col) p.col += p.col < t.col ? 1 : -1;
                else p.row += p.row < t.row ? 1 : -1;
                path.push_back(p.row * c.spec.cols + p.col);
            }
            MediatorChain ch;
            ch.omega1 = c.omega[a];
            ch.omega2 = c.omega[b];
            bool linked = true;
            for (std::size_t k = 0; k + 1 < path.size(); ++k) {
                const double g = c.j(path[k], path[k + 1]);
                linked = linked && g != 0.0;
                ch.links.push_back(g);
                if (k > 0) ch.mediators.push_back(c.omega[path[k]]);
            }
            if (!linked) continue;
            try {
                const auto cmp = compare_chain(ch);
                w.row(a, b, c.dist(a, b), c.dist_mm(a, b), cmp.exact, cmp.product, cmp.relative_gap,
                      ch.dispersive_ratio());
            } catch (const ResonanceError& e) {
                ++resonant;
                c.warn("chain: pair " + pair_name(a, b) + " resonant with mediator " + std::to_string(e.index()));
                w.row(a, b, c.dist(a, b), c.dist_mm(a, b), kNaN, kNaN, kNaN, kNaN);
            }
            ++rows;
        }
    c.summary["chain"] = {{"pairs", rows}, {"resonant", resonant}};
}

void cmd_enclosure(Context& c) {
    if (!c.spec.enclosure) {
        c.warn("enclosure: skipped, the device spec has no enclosure block");
        return;
    }
    const auto& e = *c.spec.enclosure;
    const EnclosureSpec es = enclosure_with_cutoff(e.omega_c_mhz, e.beta, e.a_mm);
    auto w = c.csv("enclosure.csv",
                   "i,j,distance_mm,kappa_per_mm,delta_b_mm,delta_b_circuit_mm,cosh_excess_ratio,j_relative_ratio");
    double worst = 0.0;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            const double d = c.dist_mm(a, b);
            const auto k = kappa(es, 0.5 * (c.omega[a] + c.omega[b]));
            const auto ec = enclosure_coupling(es, c.omega[a], c.omega[b], d, 1.0);
            const auto ec0 = enclosure_coupling(es, c.omega[a], c.omega[a], c.spec.pitch_mm, 1.0);
            worst = std::max(worst, ec.cosh_factor - 1.0);
            w.row(a, b, d, k.kappa, k.delta_b, k.delta_b_circuit, ec.cosh_factor - 1.0, ec.j / ec0.j);
        }
    // Mode list of a pillar lattice with the qubit-grid dimensions; modes with a
    // nonpositive radicand (beta >= 1/4) are skipped and counted.
    const auto modes = mode_frequencies(es, c.spec.rows, c.spec.cols, ModePolicy::SkipNonresonant);
    auto m = c.csv("enclosure_modes.csv", "index,mode_mhz");
    for (std::size_t k = 0; k < modes.frequencies.size(); ++k) m.row(k, modes.frequencies[k]);
    if (modes.skipped > 0)
        c.warn("enclosure: " + std::to_string(modes.skipped) + " modes with nonpositive radicand skipped");
    c.summary["enclosure"] = {{"omega_c_mhz", es.omega_c()}, {"omega0_mhz", es.omega0},
                              {"max_cosh_excess", worst}, {"modes", modes.frequencies.size()},
                              {"modes_skipped", modes.skipped}};
}

Predictions predict(Context& c) {
    if (c.predicted) return *c.predicted;
    Predictions p;
    p.zeta = Eigen::MatrixXd::Constant(c.n, c.n, kNaN);
    p.scaled = Eigen::MatrixXd::Constant(c.n, c.n, kNaN);
    p.flags = Eigen::MatrixXi::Zero(c.n, c.n);
    std::vector<double> nn;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b)
            if (c.j(a, b) != 0.0) nn.push_back(c.j(a, b));
    const double jref = nn.empty() ? kNaN : summarize(nn).mean;
    const double a_mm = c.spec.pitch_mm, d0 = c.spec.analysis.d0_mm;
    auto envelope = [&](double d) {
        if (c.opt.envelope == EnvelopeKind::Exp)
            return c.opt.normalize_at_nn ? std::exp(-(d - a_mm) / d0) : std::exp(-d / d0);
        const double v = std::exp(-(d / d0)) * k0_scaled(d / d0);
        return c.opt.normalize_at_nn ? v / (std::exp(-(a_mm / d0)) * k0_scaled(a_mm / d0)) : v;
    };
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            int flag = kZZOk;
            double z = kNaN;
            try {
                if (c.j(a, b) != 0.0) {
                    z = zz_nn({c.omega[a], c.omega[b], c.alpha[a], c.alpha[b], c.j(a, b)}, c.pole_tol()).zeta;
                } else {
                    for (int k = 0; k < c.n; ++k) {
                        if (k == a || k == b || c.j(a, k) == 0.0 || c.j(k, b) == 0.0) continue;
                        const TripletSpectrum t{c.omega[a], c.omega[k], c.omega[b], c.alpha[a], c.alpha[k],
                                                c.alpha[b], c.j(a, k), c.j(k, b), 0.0};
                        z = (std::isnan(z) ? 0.0 : z) + zz_nnn(t, c.pole_tol()).zeta;
                    }
                }
            } catch (const PoleProximityError& e) {
                z = kNaN;
                flag |= kZZPole;
                c.warn("zz predict: pair " + pair_name(a, b) + " near pole " + e.factor());
            } catch (const DegeneratePairError&) {
                z = kNaN;
                flag |= kZZDegenerate;
                c.warn("zz predict: pair " + pair_name(a, b) + " degenerate");
            }
            double s = kNaN;
            if (!std::isnan(jref)) {
                try {
                    s = zz_nn({c.omega[a], c.omega[b], c.alpha[a], c.alpha[b], jref * envelope(c.dist_mm(a, b))},
                              c.pole_tol()).zeta;
                } catch (const PoleProximityError&) {
                    flag |= kZZPole;
                }
            }
            p.zeta(a, b) = p.zeta(b, a) = z;
            p.scaled(a, b) = p.scaled(b, a) = s;
            p.flags(a, b) = p.flags(b, a) = flag;
        }
    c.predicted = p;
    return p;
}

void cmd_zz_predict(Context& c) {
    const auto p = predict(c);
    auto w = c.csv("zz_predicted.csv", "i,j,manhattan_sites,distance_mm,zz_khz,zz_scaled_khz,flags");
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b)
            w.row(a, b, c.dist(a, b), c.dist_mm(a, b), 1e3 * p.zeta(a, b), 1e3 * p.scaled(a, b), p.flags(a, b));
    c.summary["zz_predict"] = {{"envelope", c.opt.envelope == EnvelopeKind::Exp ? "exp" : "k0"},
                               {"normalize_at_nn", c.opt.normalize_at_nn},
                               {"d0_mm", c.spec.analysis.d0_mm}};
}

const ZZMatrix& exact(Context& c) {
    if (!c.exact) c.exact = zz_matrix_exact(build_sectors(c.omega, c.alpha, c.j));
    return *c.exact;
}

void cmd_ed(Context& c) {
    if (c.n < 2) {
        c.warn("ed: skipped, fewer than two qubits");
        return;
    }
    const auto& z = exact(c);
    auto w = c.csv("zz_exact.csv", "i,j,manhattan_sites,distance_mm,zz_khz,flags");
    int floor = 0, failed = 0;
    std::map<int, std::vector<double>> shells;
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            w.row(a, b, c.dist(a, b), c.dist_mm(a, b), 1e3 * z.zeta(a, b), z.flags(a, b));
            if (z.flags(a, b) & kZZFloor) ++floor;
            if (z.flags(a, b) & kZZAssignmentFailed) {
                ++failed;
                c.warn("ed: pair " + pair_name(a, b) + " dressed-state assignment failed");
            } else {
                shells[c.dist(a, b)].push_back(std::abs(1e3 * z.zeta(a, b)));
            }
        }
    if (floor > 0) c.warn("ed: " + std::to_string(floor) + " pairs below the 1e-8 kHz floor");
    {
        const auto h = build_sectors(c.omega, c.alpha, c.j);
        const SectorSolution sol(h);
        json diag = json::array();
        int ties = 0;
        for (const auto& a : sol.all_assignments()) {
            diag.push_back({{"label", a.label}, {"eigen_index", a.eigen_index}, {"overlap", a.overlap},
                            {"runner_up", a.runner_up}, {"runner_overlap", a.runner_overlap}, {"tie", a.tie}});
            ties += a.tie ? 1 : 0;
        }
        if (ties > 0) c.warn("ed: " + std::to_string(ties) + " assignment ties resolved by lower eigen index");
        c.report.outputs.push_back("ed_assignments.json");
        std::ofstream f(c.out / "ed_assignments.json", std::ios::binary);
        f << diag.dump(2) << '\n';
    }
    auto s = c.csv("zz_exact_shells.csv", "manhattan_sites,count,mean_abs_zz_khz,max_abs_zz_khz");
    for (const auto& [d, v] : shells) {
        const auto st = summarize(v);
        s.row(d, st.count, st.mean, st.max);
    }
    const auto p = predict(c);
    auto cmp = c.csv("zz_compare.csv", "i,j,manhattan_sites,zz_predicted_khz,zz_exact_khz,gap_ratio");
    for (int a = 0; a < c.n; ++a)
        for (int b = a + 1; b < c.n; ++b) {
            if (std::isnan(p.zeta(a, b))) continue;
            const double e = z.zeta(a, b);
            cmp.row(a, b, c.dist(a, b), 1e3 * p.zeta(a, b), 1e3 * e, std::abs(p.zeta(a, b) - e) / std::abs(e));
        }
    c.summary["ed"] = {{"floor_pairs", floor}, {"assignment_failures", failed}};
}

json fit_json(const ScalingFit& f) {
    return {{"d0_sites", f.length}, {"amplitude_khz", f.amplitude}, {"r_squared", f.r_squared}};
}

void write_shells(Context& c, const std::string& name, const std::vector<ShellStat>& sh) {
    auto w = c.csv(name, "manhattan_sites,count,mean_abs_zz_khz,stddev_abs_zz_khz");
    for (const auto& s : sh) w.row(s.distance, s.count, s.mean, s.stddev);
}

void cmd_fit(Context& c) {
    json s = json::object();
    if (!c.spec.analysis.measurements.empty()) {
        const auto fr = filter_measurements(c.spec.analysis.measurements, c.threshold(), c.spec.analysis.outliers);
        for (const auto& e : fr.excluded)
            c.warn("fit: excluded " + pair_name(e.row.i, e.row.j) + " (" + to_string(e.reason) + ")");
        try {
            const auto f = fit_manhattan_decay(fr.kept, c.pos);
            write_shells(c, "fit_measured_shells.csv", f.shells);
            s["measured"] = fit_json(f);
        } catch (const InsufficientDataError& e) {
            c.warn(std::string("fit: measured data: ") + e.what());
        }
    } else {
        c.warn("fit: the device spec has no measurements; fitting the exact-diagonalization matrix only");
    }
    if (c.n >= 2) {
        const auto& z = exact(c);
        MeasurementTable t;
        for (int a = 0; a < c.n; ++a)
            for (int b = a + 1; b < c.n; ++b)
                if (z.flags(a, b) == kZZOk) t.push_back({a, b, 1e3 * z.zeta(a, b), {}, {}, {}});
        try {
            const auto f = fit_manhattan_decay(t, c.pos);
            write_shells(c, "fit_exact_shells.csv", f.shells);
            s["exact"] = fit_json(f);
        } catch (const InsufficientDataError& e) {
            c.warn(std::string("fit: exact data: ") + e.what());
        }
    }
    c.summary["fit"] = s;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

RunReport run_pipeline(const DeviceSpec& spec, const std::vector<std::string>& commands, const std::string& out_dir,
                       const PipelineOptions& opt) {
    const auto& known = pipeline_commands();
    std::vector<std::string> todo;
    for (const auto& cmd : commands) {
        if (std::find(known.begin(), known.end(), cmd) == known.end())
            throw DomainError("unknown subcommand '" + cmd + "'");
        if (cmd == "report") todo.assign(known.begin(), known.end() - 1);
    }
    // Canonical order regardless of how the commands were listed.
    for (const auto& k : known)
        if (std::find(commands.begin(), commands.end(), k) != commands.end() &&
            std::find(todo.begin(), todo.end(), k) == todo.end() && k != "report")
            todo.push_back(k);
    std::stable_sort(todo.begin(), todo.end(), [&](const auto& a, const auto& b) {
        return std::find(known.begin(), known.end(), a) < std::find(known.begin(), known.end(), b);
    });

    validate(spec);
    if (opt.threshold_khz && !(*opt.threshold_khz >= 0.0)) throw DomainError("threshold must be >= 0");
    fs::create_directories(out_dir);

    RunReport report;
    report.input_digest = spec_digest(spec);
    report.timestamp = opt.timestamp.empty() ? utc_now() : opt.timestamp;
    report.commands = todo;

    Context c(spec, opt, fs::path(out_dir), report);
    c.n = spec.size();
    c.pos = lattice_positions(spec.rows, spec.cols);
    c.pos.resize(c.n);
    c.j = coupling_table(spec);
    for (const auto& q : spec.qubits) {
        c.omega.push_back(q.omega_mhz);
        c.alpha.push_back(q.alpha_mhz);
    }

    for (const auto& cmd : todo) {
        try {
            if (cmd == "capmat") cmd_capmat(c);
            else if (cmd == "couplings") cmd_couplings(c);
            else if (cmd == "chain") cmd_chain(c);
            else if (cmd == "enclosure") cmd_enclosure(c);
            else if (cmd == "zz predict") cmd_zz_predict(c);
            else if (cmd == "ed") cmd_ed(c);
            else if (cmd == "fit") cmd_fit(c);
        } catch (const std::exception& e) {
            report.errors.push_back(cmd + ": " + e.what());
        }
    }
    report.summary_json = c.summary.dump();

    json r = {{"input_digest", report.input_digest},
              {"toolkit_version", report.toolkit_version},
              {"timestamp", report.timestamp},
              {"commands", report.commands},
              {"outputs", report.outputs},
              {"warnings", report.warnings},
              {"errors", report.errors},
              {"summary", c.summary}};
    report.outputs.push_back("run_report.json");
    r["outputs"] = report.outputs;
    std::ofstream f(fs::path(out_dir) / "run_report.json", std::ios::binary);
    f << r.dump(2) << '\n';
    return report;
}

} // namespace xtalk
