// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written by a different route than the
// production code: dense linear algebra instead of masked iterative solvers,
// stack-based flood fill instead of the union scan, and so on.
#pragma once
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "optpart/geometry.hpp"

namespace oracle {

using optpart::Field;
using optpart::Grid;
using optpart::Mask;

// number of 4-connected components of a mask, BFS flood fill
inline int flood_count(const Mask& m) {
    const Grid& g = *m.grid;
    std::vector<char> seen(g.num_points(), 0);
    int comps = 0;
    int nbr[4];
    for (int start = 0; start < g.num_points(); ++start) {
        if (!m.on[start] || seen[start]) continue;
        ++comps;
        std::queue<int> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const int id = q.front();
            q.pop();
            const int n = g.neighbors(id, nbr);
            for (int t = 0; t < n; ++t)
                if (m.on[nbr[t]] && !seen[nbr[t]]) {
                    seen[nbr[t]] = 1;
                    q.push(nbr[t]);
                }
        }
    }
    return comps;
}

// forward-difference Dirichlet energy, written straight from the definition:
// every lattice edge once per axis, plus the ghost edges to the zero exterior
inline double energy_by_edges(const Field& u) {
    const Grid& g = *u.grid;
    const double hx = g.h[0], hy = g.h[1];
    double acc = 0.0;
    auto val = [&](int i, int j) -> double {
        if (g.periodic) i = (i % g.points[0] + g.points[0]) % g.points[0];
        if (i < 0 || i >= g.points[0]) return 0.0;
        if (g.dim == 2 && (j < 0 || j >= g.points[1])) return 0.0;
        const int id = g.index(i, g.dim == 2 ? j : 0);
        return g.in_domain(id) ? u.values[id] : 0.0;
    };
    const int ni = g.periodic ? g.points[0] : g.points[0] + 1;
    for (int j = 0; j < (g.dim == 2 ? g.points[1] : 1); ++j)
        for (int i = 0; i < ni; ++i) {
            const double d = val(i, j) - val(i - 1, j);
            acc += d * d / (hx * hx);
        }
    if (g.dim == 2)
        for (int j = 0; j <= g.points[1]; ++j)
            for (int i = 0; i < g.points[0]; ++i) {
                const double d = val(i, j) - val(i, j - 1);
                acc += d * d / (hy * hy);
            }
    return acc * g.cell_volume();
}

// dense LU with partial pivoting; fine for the few-hundred-point masks used
// in tests
inline void lu_solve(std::vector<std::vector<double>> A, std::vector<double> b,
                     std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    std::vector<int> piv(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
        std::swap(A[c], A[p]);
        std::swap(b[c], b[p]);
        piv[c] = p;
        for (int r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            if (f == 0.0) continue;
            for (int cc = c; cc < n; ++cc) A[r][cc] -= f * A[c][cc];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
}

// smallest eigenvalue of the masked 5-point (or 3-point) Laplacian by dense
// inverse power iteration; independent of the library's solver path
inline double lambda1_dense(const Grid& g, const Mask& m) {
    std::vector<int> pts;
    std::vector<int> where(g.num_points(), -1);
    for (int id = 0; id < g.num_points(); ++id)
        if (m.on[id]) {
            where[id] = static_cast<int>(pts.size());
            pts.push_back(id);
        }
    const int n = static_cast<int>(pts.size());
    if (n == 0) return std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    int nbr[4];
    for (int d = 0; d < n; ++d) {
        const auto ij = g.coords(pts[d]);
        double diag = 2.0 / (g.h[0] * g.h[0]);
        if (g.dim == 2) diag += 2.0 / (g.h[1] * g.h[1]);
        A[d][d] = diag;
        const int cnt = g.neighbors(pts[d], nbr);
        for (int t = 0; t < cnt; ++t) {
            if (where[nbr[t]] < 0) continue;  // Dirichlet ghost
            const auto kj = g.coords(nbr[t]);
            const double hh = (ij[1] == kj[1]) ? g.h[0] : g.h[1];
            A[d][where[nbr[t]]] = -1.0 / (hh * hh);
        }
    }

    std::vector<double> v(n, 1.0), w;
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        lu_solve(A, v, w);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        for (int d = 0; d < n; ++d) v[d] = w[d] / norm;
        // Rayleigh quotient of the normalized iterate
        double num = 0.0;
        for (int d = 0; d < n; ++d) {
            double row = 0.0;
            for (int c = 0; c < n; ++c) row += A[d][c] * v[c];
            num += v[d] * row;
        }
        if (it > 5 && std::abs(num - lambda) <= 1e-12 * num) {
            lambda = num;
            break;
        }
        lambda = num;
    }
    return lambda;
}

// trapezoid-rule integral of u^2, written with explicit corner/face weights
inline double mass_by_weights(const Field& u) {
    const Grid& g = *u.grid;
    double acc = 0.0;
    for (int id = 0; id < g.num_points(); ++id) {
        const auto ij = g.coords(id);
        double w = 1.0;
        if (!g.periodic) {
            if (ij[0] == 0 || ij[0] == g.points[0] - 1) w *= 0.5;
            if (g.dim == 2 && (ij[1] == 0 || ij[1] == g.points[1] - 1)) w *= 0.5;
        }
        const double v = g.in_domain(id) ? u.values[id] : 0.0;
        acc += w * v * v;
    }
    return acc * g.cell_volume();
}

// winner-takes-all reference: index of the strictly largest value, -1 on a
// tie at the top or when everything is zero -- callers decide the tie rule
inline int argmax_strict(const std::vector<double>& vals) {
    int best = -1;
    double top = 0.0;
    bool tie = false;
    for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
        if (vals[i] > top) {
            top = vals[i];
            best = i;
            tie = false;
        } else if (vals[i] == top && top > 0.0) {
            tie = true;
        }
    }
    return tie ? -1 : best;
}

// plain exhaustive minimization of the alternating-weight max over breakpoint
// grids, no refinement; used as a coarse independent bound for the 1D curves
inline double breakpoints_exhaustive(double r, int k, double L, int n) {
    const double pi = 3.14159265358979323846;
    std::vector<int> idx(k);
    double best = std::numeric_limits<double>::infinity();
    auto value = [&](const std::vector<int>& sel) {
        double worst = 0.0, prev = 0.0;
        for (int i = 0; i <= k; ++i) {
            const double next = (i < k) ? L * sel[i] / (n + 1) : L;
            const double len = next - prev;
            if (len <= 0.0) return std::numeric_limits<double>::infinity();
            const double w = (i % 2 == 0) ? r : 1.0;
            worst = std::max(worst, w * pi * pi / (len * len));
            prev = next;
        }
        return worst;
    };
    auto rec = [&](auto&& self, int depth, int lo) -> void {
        if (depth == k) {
            best = std::min(best, value(idx));
            return;
        }
        for (int c = lo; c <= n; ++c) {
            idx[depth] = c;
            self(self, depth + 1, c + 1);
        }
    };
    rec(rec, 0, 1);
    return best;
}

}  // namespace oracle
