#include "optpart/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "optpart/check.hpp"

namespace optpart {

namespace {

constexpr double pi = std::numbers::pi;

// max_i w_i (pi / l_i)^2 over the subintervals cut by the interior
// breakpoints t (sorted, within (0, L)); weights alternate r, 1, r, ...
double alternating_max(const std::vector<double>& t, double r, double L) {
    double worst = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i <= t.size(); ++i) {
        const double next = (i < t.size()) ? t[i] : L;
        const double len = next - prev;
        if (len <= 0.0) return std::numeric_limits<double>::infinity();
        const double w = (i % 2 == 0) ? r : 1.0;
        worst = std::max(worst, w * pi * pi / (len * len));
        prev = next;
    }
    return worst;
}

// Golden-section minimization of f over (lo, hi); f is unimodal in each
// single breakpoint, so this is exact up to the bracket tolerance.
template <class F>
double golden_min(F&& f, double lo, double hi, double xtol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double c_k1_closed(double r, int k, double L) {
    ensure(r > 0.0, "c_k1_closed: weight r must be positive");
    ensure(k >= 1, "c_k1_closed: k must be at least 1");
    ensure(L > 0.0, "c_k1_closed: interval length must be positive");
    const double n_a = std::ceil((k + 1) / 2.0);
    const double n_b = std::floor((k + 1) / 2.0);
    const double s = n_a * std::sqrt(r) + n_b;
    return pi * pi * s * s / (L * L);
}

double c_k1_bruteforce(double r, int k, double L, int grid_n) {
    ensure(r > 0.0, "c_k1_bruteforce: weight r must be positive");
    ensure(k >= 1, "c_k1_bruteforce: k must be at least 1");
    ensure(L > 0.0, "c_k1_bruteforce: interval length must be positive");
    ensure(grid_n >= 50, "c_k1_bruteforce: need at least 50 grid candidates");

    std::vector<double> best(k);
    double best_val = std::numeric_limits<double>::infinity();

    if (k <= 3) {
        // exhaustive over ordered k-tuples of grid candidates
        std::vector<int> idx(k);
        std::vector<double> t(k);
        auto scan = [&](auto&& self, int depth, int start) -> void {
            if (depth == k) {
                const double v = alternating_max(t, r, L);
                if (v < best_val) {
                    best_val = v;
                    best = t;
                }
                return;
            }
            for (int c = start; c < grid_n; ++c) {
                t[depth] = L * (c + 1) / (grid_n + 1);
                self(self, depth + 1, c + 1);
            }
        };
        scan(scan, 0, 0);
    } else {
        // equal spacing start; refinement does the rest
        for (int i = 0; i < k; ++i) best[i] = L * (i + 1) / (k + 1);
        best_val = alternating_max(best, r, L);
    }

    // Nested min-max refinement.  With the left end of interval i fixed at a,
    // the best achievable max over intervals i..k is the minimum over the next
    // breakpoint t of max{w_i pi^2/(t-a)^2, tail(i+1, t)}: the first term
    // falls in t and the tail rises, so the pointwise max is unimodal and a
    // golden-section search per level finds the exact crossing.
    const double xtol = 1e-11 * L;
    auto tail = [&](auto&& self, int i, double a) -> double {
        const double w = (i % 2 == 0) ? r : 1.0;
        if (i == k) return w * pi * pi / ((L - a) * (L - a));
        auto level = [&](double t) {
            return std::max(w * pi * pi / ((t - a) * (t - a)), self(self, i + 1, t));
        };
        const double margin = 1e-6 * (L - a);
        const double t_star = golden_min(level, a + margin, L - margin, xtol);
        return level(t_star);
    };
    if (k <= 4) best_val = std::min(best_val, tail(tail, 0, 0.0));

    // cyclic coordinate polish of the exhaustive-stage breakpoints; this can
    // only lower the reported value further
    std::vector<double> t = best;
    for (int cycle = 0; cycle < 50; ++cycle) {
        const double before = alternating_max(t, r, L);
        for (int i = 0; i < k; ++i) {
            const double lo = (i == 0) ? 0.0 : t[i - 1];
            const double hi = (i == k - 1) ? L : t[i + 1];
            const double margin = 1e-9 * L;
            t[i] = golden_min(
                [&](double x) {
                    std::vector<double> probe = t;
                    probe[i] = x;
                    return alternating_max(probe, r, L);
                },
                lo + margin, hi - margin, xtol);
        }
        const double after = alternating_max(t, r, L);
        if (before - after < 1e-13 * after) break;
    }
    return std::min(best_val, alternating_max(t, r, L));
}

std::optional<int> fucik_1d_membership(double lambda, double mu, double L, double tol) {
    ensure(lambda > 0.0 && mu > 0.0, "fucik_1d_membership: lambda and mu must be positive");
    ensure(L > 0.0, "fucik_1d_membership: interval length must be positive");
    const double half_lam = pi / std::sqrt(lambda);
    const double half_mu = pi / std::sqrt(mu);
    for (int m = 1; m <= 64; ++m) {
        const int n_first = (m + 1) / 2, n_second = m / 2;
        const double start_lam = n_first * half_lam + n_second * half_mu;
        const double start_mu = n_first * half_mu + n_second * half_lam;
        if (std::abs(start_lam - L) <= tol || std::abs(start_mu - L) <= tol) return m;
    }
    return std::nullopt;
}

}  // namespace optpart
