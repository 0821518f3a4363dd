#include "enclosure/special_functions.hpp"

#include <cmath>

namespace enclosure::special {
namespace {

// Below this argument the closed forms cancel badly and the even/odd
// power series are used instead (all coefficients positive).
constexpr long double kSeriesCutoff = 1.0L;

template <typename Coef>
long double power_series(long double s, int first_power, Coef coef) {
    const long double s2 = s * s;
    long double term_power = std::pow(s, first_power);
    long double sum = 0.0L;
    for (int k = 0; k < 40; ++k) {
        const long double term = coef(k) * term_power;
        sum += term;
        if (term < 1e-22L * sum) break;
        term_power *= s2;
    }
    return sum;
}

long double factorial(int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// phi = sum_{k>=1} 2k s^{2k+1} / (2k+1)!
long double phi_series(long double s) {
    return power_series(s, 3, [](int j) {
        const int k = j + 1;
        return 2.0L * k / factorial(2 * k + 1);
    });
}

// Psi = sum_{k>=2} 2(2k-1)(k-1) s^{2k} / (2k)!
long double Psi_series(long double s) {
    return power_series(s, 4, [](int j) {
        const int k = j + 2;
        return 2.0L * (2 * k - 1) * (k - 1) / factorial(2 * k);
    });
}

// s phi - Psi = sum_{k>=2} (2k-2) s^{2k} / (2k)!
long double source_series(long double s) {
    return power_series(s, 4, [](int j) {
        const int k = j + 2;
        return (2.0L * k - 2.0L) / factorial(2 * k);
    });
}

}  // namespace

double phi_scaled(double s_in) {
    const long double s = s_in;
    if (s < kSeriesCutoff) return static_cast<double>(phi_series(s) * std::exp(-s));
    const long double e2 = std::exp(-2.0L * s);
    return static_cast<double>(s * (1.0L + e2) / 2.0L - (1.0L - e2) / 2.0L);
}

double Psi_scaled(double s_in) {
    const long double s = s_in;
    if (s < kSeriesCutoff) return static_cast<double>(Psi_series(s) * std::exp(-s));
    const long double e1 = std::exp(-s);
    const long double e2 = e1 * e1;
    return static_cast<double>((s * s + 2.0L) * (1.0L + e2) / 2.0L - s * (1.0L - e2) - 2.0L * e1);
}

double source_factor_scaled(double s_in) {
    const long double s = s_in;
    if (s < kSeriesCutoff) return static_cast<double>(source_series(s) * std::exp(-s));
    const long double e1 = std::exp(-s);
    const long double e2 = e1 * e1;
    return static_cast<double>(s * (1.0L - e2) / 2.0L - (1.0L + e2) + 2.0L * e1);
}

double phi(double s) {
    return s < kSeriesCutoff ? static_cast<double>(phi_series(s)) : phi_scaled(s) * std::exp(s);
}

double Psi(double s) {
    return s < kSeriesCutoff ? static_cast<double>(Psi_series(s)) : Psi_scaled(s) * std::exp(s);
}

double source_factor(double s) {
    return s < kSeriesCutoff ? static_cast<double>(source_series(s)) : source_factor_scaled(s) * std::exp(s);
}

}  // namespace enclosure::special
