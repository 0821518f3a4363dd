#include "enclosure/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace enclosure {

GaussLegendre::GaussLegendre(int n) : nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n)) {
    // Newton iteration on P_n from the Chebyshev initial guess; nodes are
    // symmetric so only half are computed.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        long double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        long double p0 = 1.0L, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0L);
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = static_cast<double>(-x);
        nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(x);
        weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
        weights[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(w);
    }
}

const GaussLegendre& GaussLegendre::order32() {
    static const GaussLegendre rule(32);
    return rule;
}

}  // namespace enclosure
