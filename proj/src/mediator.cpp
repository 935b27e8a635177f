#include "xtalk/mediator.hpp"
#include "xtalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xtalk {

std::vector<double> MediatorChain::detunings() const {
    const double wbar = mean_end_frequency();
    std::vector<double> d;
    d.reserve(mediators.size());
    for (double wc : mediators) d.push_back(std::abs(wbar - wc));
    return d;
}

double MediatorChain::dispersive_ratio() const {
    const auto d = detunings();
    double r = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        const double g = std::max(std::abs(links[n]), std::abs(links[n + 1]));
        r = std::max(r, d[n] > 0 ? g / d[n] : INFINITY);
    }
    return r;
}

MediatorChain MediatorChain::reversed() const {
    MediatorChain r;
    r.omega1 = omega2;
    r.omega2 = omega1;
    r.mediators.assign(mediators.rbegin(), mediators.rend());
    r.links.assign(links.rbegin(), links.rend());
    return r;
}

void MediatorChain::validate() const {
    if (links.size() != mediators.size() + 1) {
        std::ostringstream os;
        os << "MediatorChain: " << mediators.size() << " mediators need " << mediators.size() + 1
           << " links, got " << links.size();
        throw DomainError(os.str());
    }
    if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("MediatorChain: end frequencies must be positive");
    for (double w : mediators)
        if (!(w > 0.0)) throw DomainError("MediatorChain: mediator frequencies must be positive");
    for (double g : links)
        if (!std::isfinite(g)) throw DomainError("MediatorChain: non-finite link");
}

ProductEstimate jeff_product(const MediatorChain& chain) {
    chain.validate();
    const int m = chain.size();
    if (m < 1) throw DomainError("jeff_product: needs at least one mediator");
    ProductEstimate p;
    p.detunings = chain.detunings();
    for (int n = 0; n < m; ++n)
        if (p.detunings[n] == 0.0)
            throw ResonanceError("jeff_product: mediator " + std::to_string(n + 1) +
                                     " is resonant with the mean end frequency",
                                 n + 1);
    double num = 1.0, den = 1.0, log_g = 0.0, log_d = 0.0;
    bool zero_link = false;
    for (double g : chain.links) {
        num *= std::abs(g);
        if (g == 0.0) zero_link = true;
        else log_g += std::log(std::abs(g));
    }
    for (double d : p.detunings) {
        den *= d;
        log_d += std::log(d);
    }
    p.j = num / den;
    p.g_mean = zero_link ? 0.0 : std::exp(log_g / (m + 1));
    p.delta_mean = std::exp(log_d / m);
    p.geometric_form = p.g_mean * std::pow(p.g_mean / p.delta_mean, m);
    return p;
}

double jeff_single_exact(const MediatorChain& chain) {
    chain.validate();
    if (chain.size() != 1) throw DomainError("jeff_single_exact: requires exactly one mediator");
    const double wc = chain.mediators[0];
    if (chain.omega1 == wc || chain.omega2 == wc)
        throw ResonanceError("jeff_single_exact: end mode resonant with the mediator", 1);
    return 0.5 * chain.links[0] * chain.links[1] *
           (1.0 / (chain.omega1 - wc) + 1.0 / (chain.omega2 - wc));
}

namespace {

// [(E − H_c)^{-1}]_{1M} for the tridiagonal mediator block, via a Thomas sweep
// on (E − H_c) x = e_M; returns x_1.
double resolvent_corner(const MediatorChain& chain, double e) {
    const int m = chain.size();
    std::vector<double> diag(m), off(m > 0 ? m - 1 : 0);
    double scale = std::abs(e);
    for (int n = 0; n < m; ++n) {
        diag[n] = e - chain.mediators[n];
        scale = std::max(scale, std::abs(chain.mediators[n]));
    }
    for (int n = 0; n + 1 < m; ++n) off[n] = -chain.links[n + 1];

    // Forward elimination from the last row upward so that the pivot order
    // follows the chain from c_M back to c_1 and x_1 falls out last.
    std::vector<double> c(m), d(m);
    const double tiny = 1e-14 * scale;
    double piv = diag[m - 1];
    if (std::abs(piv) <= tiny)
        throw ResonanceError("jeff_chain_exact: in-band resonance at mediator " + std::to_string(m), m);
    c[m - 1] = (m > 1 ? off[m - 2] : 0.0) / piv;
    d[m - 1] = 1.0 / piv;
    for (int n = m - 2; n >= 0; --n) {
        piv = diag[n] - off[n] * c[n + 1];
        if (std::abs(piv) <= tiny)
            throw ResonanceError("jeff_chain_exact: in-band resonance at mediator " + std::to_string(n + 1),
                                 n + 1);
        c[n] = (n > 0 ? off[n - 1] : 0.0) / piv;
        d[n] = (0.0 - off[n] * d[n + 1]) / piv;
    }
    return d[0];
}

double self_energy(const MediatorChain& chain, double e) {
    return chain.links.front() * resolvent_corner(chain, e) * chain.links.back();
}

} // namespace

double jeff_chain_exact(const MediatorChain& chain, std::optional<double> probe) {
    chain.validate();
    if (chain.size() == 0) return chain.links[0];
    if (probe) return self_energy(chain, *probe);
    return 0.5 * (self_energy(chain, chain.omega1) + self_energy(chain, chain.omega2));
}

double jeff_chain_classical(const MediatorChain& chain, std::optional<double> probe) {
    chain.validate();
    const int m = chain.size();
    if (m == 0) return chain.links[0];
    const double w = probe ? *probe : chain.mean_end_frequency();
    const double w1 = chain.omega1, w2 = chain.omega2;
    auto freq = [&](int node) { // 0 = b1, 1..M = mediators, M+1 = b2
        return node == 0 ? w1 : node == m + 1 ? w2 : chain.mediators[node - 1];
    };
    auto k = [&](int link) { // link n joins node n and n+1
        return -2.0 * chain.links[link] / std::sqrt(freq(link) * freq(link + 1));
    };

    // A is not symmetric; solve A x = e_M and Aᵀ y = e_1 style corners by a
    // dense Gaussian elimination (M is small).
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (int n = 0; n < m; ++n) {
        const double wc = chain.mediators[n];
        a[n][n] = wc * wc - w * w;
        if (n + 1 < m) {
            a[n][n + 1] = -wc * wc * k(n + 1);
            const double wn = chain.mediators[n + 1];
            a[n + 1][n] = -wn * wn * k(n + 1);
        }
    }
    auto solve_column = [&](int col) {
        auto aa = a;
        std::vector<double> rhs(m, 0.0);
        rhs[col] = 1.0;
        for (int p = 0; p < m; ++p) {
            if (std::abs(aa[p][p]) < 1e-14 * w * w)
                throw ResonanceError("jeff_chain_classical: singular dynamic matrix at mediator " +
                                         std::to_string(p + 1),
                                     p + 1);
            for (int r = p + 1; r < m; ++r) {
                const double f = aa[r][p] / aa[p][p];
                if (f == 0.0) continue;
                for (int c = p; c < m; ++c) aa[r][c] -= f * aa[p][c];
                rhs[r] -= f * rhs[p];
            }
        }
        std::vector<double> x(m);
        for (int r = m - 1; r >= 0; --r) {
            double s = rhs[r];
            for (int c = r + 1; c < m; ++c) s -= aa[r][c] * x[c];
            x[r] = s / aa[r][r];
        }
        return x;
    };
    const double inv_1m = solve_column(m - 1)[0];
    const double inv_m1 = solve_column(0)[m - 1];
    const double wc1 = chain.mediators.front(), wcm = chain.mediators.back();
    const double lam12 = w1 * w1 * k(0) * inv_1m * wcm * wcm * k(m);
    const double lam21 = w2 * w2 * k(m) * inv_m1 * wc1 * wc1 * k(0);
    const double prod = lam12 * lam21;
    const double mag = prod > 0 ? std::sqrt(prod) / (2.0 * std::sqrt(w1 * w2)) : 0.0;
    return lam12 > 0 ? -mag : mag;
}

ChainComparison compare_chain(const MediatorChain& chain) {
    ChainComparison c;
    c.exact = jeff_chain_exact(chain);
    c.product = jeff_product(chain).j;
    c.relative_gap = c.exact != 0.0 ? std::abs(std::abs(c.exact) - c.product) / std::abs(c.exact)
                                    : (c.product == 0.0 ? 0.0 : INFINITY);
    c.sign_differs = c.exact < 0.0 && c.product > 0.0;
    return c;
}

} // namespace xtalk
