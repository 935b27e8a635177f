#include "xtalk/special.hpp"
#include "xtalk/errors.hpp"

#include <cmath>
#include <limits>

namespace xtalk {

namespace {

constexpr double kEuler = 0.57721566490153286061;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.14159265358979323846;

void check_positive(double x, const char* who) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError(std::string(who) + ": argument must be positive and finite");
}

// Σ (x²/4)^k / (k!)² and Σ H_k (x²/4)^k / (k!)², sign-alternating when `alt`.
struct PowerSums {
    double plain = 0.0;
    double harmonic = 0.0;
};

PowerSums power_sums(double x, bool alt) {
    const double q = 0.25 * x * x;
    PowerSums s;
    double term = 1.0, h = 0.0;
    s.plain = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        if (alt) term = -term;
        h += 1.0 / k;
        s.plain += term;
        s.harmonic += h * term;
        if (std::abs(term) * h < kEps * 1e-3 * (std::abs(s.plain) + std::abs(s.harmonic)))
            break;
    }
    return s;
}

double k0_series(double x) {
    const PowerSums s = power_sums(x, false);
    return -(std::log(0.5 * x) + kEuler) * s.plain + s.harmonic;
}

// Steed's method with Temme's normalisation (CF2), order zero; returns e^x K0(x).
double k0_scaled_cf2(double x) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 100000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    return std::sqrt(kPi / (2.0 * x)) / s;
}

// Asymptotic series e^x K0(x) ≈ √(π/2x) Σ_k (−1)^k t_k,
// t_k = Π_{m≤k}(2m−1)² / (k! (8x)^k); truncated at the smallest term.
double k0_scaled_asymptotic(double x) {
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += (k % 2 ? -term : term);
        if (term < kEps * 1e-2) break;
    }
    return std::sqrt(kPi / (2.0 * x)) * sum;
}

// Hankel asymptotic P0, Q0 for large x.
void pq0(double x, double& p, double& q) {
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
        if (next >= term) break;
        term = next;
        // k odd feeds Q with sign (−1)^((k+1)/2); k even feeds P with (−1)^(k/2).
        if (k % 2) q += (((k + 1) / 2) % 2 ? -term : term);
        else p += ((k / 2) % 2 ? -term : term);
        if (term < kEps * 1e-2) break;
    }
}

constexpr double kSeriesLimit = 12.0;

} // namespace

double i0(double x) {
    return power_sums(x, false).plain;
}

double k0_scaled(double x) {
    check_positive(x, "k0");
    if (x <= 2.0) return std::exp(x) * k0_series(x);
    if (x < 25.0) return k0_scaled_cf2(x);
    return k0_scaled_asymptotic(x);
}

double k0(double x) {
    check_positive(x, "k0");
    if (x <= 2.0) return k0_series(x);
    return std::exp(-x) * k0_scaled(x);
}

double j0(double x) {
    x = std::abs(x);
    if (x <= kSeriesLimit) return power_sums(x, true).plain;
    double p, q;
    pq0(x, p, q);
    const double chi = x - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double y0(double x) {
    check_positive(x, "y0");
    if (x <= kSeriesLimit) {
        const PowerSums s = power_sums(x, true);
        return (2.0 / kPi) * ((std::log(0.5 * x) + kEuler) * s.plain - s.harmonic);
    }
    double p, q;
    pq0(x, p, q);
    const double chi = x - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

std::complex<double> hankel1_0(double x) {
    check_positive(x, "hankel1_0");
    return {j0(x), y0(x)};
}

} // namespace xtalk
