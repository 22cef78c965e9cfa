#include "optpart/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace optpart {

LaplaceOperator::LaplaceOperator(const Grid& g, const Mask& m) : grid_(&g) {
    ensure(m.grid == &g, "LaplaceOperator: mask belongs to another grid");
    const int np = g.num_points();
    for (int id = 0; id < np; ++id)
        if (m.on[id]) ensure(g.in_domain(id), "LaplaceOperator: mask touches the boundary layer");

    // Order the dofs by lattice index; on the circle start just past a gap so
    // consecutive dofs are lattice neighbours and the matrix stays
    // tridiagonal (a full cover has no gap and keeps its wrap coupling).
    if (g.periodic) {
        int gap = -1;
        for (int id = 0; id < np; ++id)
            if (!m.on[id]) { gap = id; break; }
        const int start = gap < 0 ? 0 : gap + 1;
        for (int t = 0; t < np; ++t) {
            const int id = (start + t) % np;
            if (m.on[id]) pts_.push_back(id);
        }
    } else {
        for (int id = 0; id < np; ++id)
            if (m.on[id]) pts_.push_back(id);
    }

    std::vector<int> dof(np, -1);
    for (int d = 0; d < size(); ++d) dof[pts_[d]] = d;

    diag_ = 2.0 / (g.h[0] * g.h[0]) + (g.dim == 2 ? 2.0 / (g.h[1] * g.h[1]) : 0.0);
    nbr_.resize(pts_.size());
    w_.resize(pts_.size());
    nnbr_.resize(pts_.size());
    int tmp[4];
    for (int d = 0; d < size(); ++d) {
        const int id = pts_[d];
        const int n = g.neighbors(id, tmp);
        int cnt = 0;
        for (int t = 0; t < n; ++t) {
            const int nb = dof[tmp[t]];
            if (nb < 0) continue;
            const auto a = g.coords(id);
            const auto b = g.coords(tmp[t]);
            const double hh = (a[1] == b[1]) ? g.h[0] : g.h[1];
            nbr_[d][cnt] = nb;
            w_[d][cnt] = 1.0 / (hh * hh);
            ++cnt;
        }
        nnbr_[d] = cnt;
    }

    if (g.dim == 1) {
        tridiagonal_ = true;
        for (int d = 0; d < size(); ++d)
            for (int t = 0; t < nnbr_[d]; ++t)
                if (std::abs(nbr_[d][t] - d) > 1) tridiagonal_ = false;  // wrap coupling
    }
}

void LaplaceOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int n = size();
    y.assign(n, 0.0);
    for (int d = 0; d < n; ++d) {
        double acc = diag_ * x[d];
        for (int t = 0; t < nnbr_[d]; ++t) acc -= w_[d][t] * x[nbr_[d][t]];
        y[d] = acc;
    }
}

void LaplaceOperator::solve_tridiagonal(const std::vector<double>& b, std::vector<double>& x) const {
    ensure(tridiagonal_, "solve_tridiagonal: operator is not tridiagonal");
    const int n = size();
    x.assign(n, 0.0);
    if (n == 0) return;

    // Thomas elimination.  The off-diagonal entry exists only between dofs
    // that are lattice neighbours, so disconnected runs decouple on their own.
    const double off = -1.0 / (grid_->h[0] * grid_->h[0]);
    std::vector<double> cp(n, 0.0), dp(n, 0.0);

    auto coupled = [&](int d, int e) {  // does dof d couple with dof e?
        for (int t = 0; t < nnbr_[d]; ++t)
            if (nbr_[d][t] == e) return true;
        return false;
    };

    double denom = diag_;
    cp[0] = (n > 1 && coupled(0, 1)) ? off / denom : 0.0;
    dp[0] = b[0] / denom;
    for (int d = 1; d < n; ++d) {
        const double a = coupled(d, d - 1) ? off : 0.0;
        denom = diag_ - a * cp[d - 1];
        cp[d] = (d + 1 < n && coupled(d, d + 1)) ? off / denom : 0.0;
        dp[d] = (b[d] - a * dp[d - 1]) / denom;
    }
    x[n - 1] = dp[n - 1];
    for (int d = n - 2; d >= 0; --d) x[d] = dp[d] - cp[d] * x[d + 1];
}

Field LaplaceOperator::embed(const std::vector<double>& x) const {
    Field u = make_field(*grid_);
    for (int d = 0; d < size(); ++d) u.values[pts_[d]] = x[d];
    return u;
}

std::vector<double> LaplaceOperator::restrict_to(const Field& u) const {
    std::vector<double> x(pts_.size());
    for (int d = 0; d < size(); ++d) x[d] = u.values[pts_[d]];
    return x;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Jacobi-preconditioned conjugate gradients for A x = b, warm-started from x.
int conjugate_gradient(const LaplaceOperator& A, const std::vector<double>& b,
                       std::vector<double>& x, double rel_tol, int max_iter) {
    const int n = A.size();
    std::vector<double> r(n), z, p, Ap(n);
    A.apply(x, Ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return 0;
    }
    const double prec = 1.0 / A.diagonal();
    z = r;
    for (int i = 0; i < n; ++i) z[i] *= prec;
    p = z;
    double rz = dot(r, z);
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) break;
        A.apply(p, Ap);
        const double alpha = rz / dot(p, Ap);
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        for (int i = 0; i < n; ++i) z[i] = r[i] * prec;
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return it;
}

}  // namespace

EigenResult principal_eigenpair(const Grid& g, const Mask& m, double tol,
                                const Field* weight, const Field* warm_start) {
    ensure(m.grid == &g, "principal_eigenpair: mask belongs to another grid");
    ensure(tol > 0.0, "principal_eigenpair: tol must be positive");
    if (m.empty()) {
        EigenResult r;
        r.eigenfunction = make_field(g);
        return r;  // lambda = +infinity
    }

    // A disconnected mask carries the smallest eigenvalue of its pieces, and
    // solving piecewise keeps the inverse iteration away from the nearly
    // degenerate gaps a multi-piece operator would have.
    {
        auto comps = connected_components(m);
        if (comps.size() > 1) {
            EigenResult best;
            for (const auto& comp : comps) {
                EigenResult r = principal_eigenpair(g, comp, tol, weight, warm_start);
                if (r.lambda < best.lambda) best = std::move(r);
            }
            return best;
        }
    }

    if (weight != nullptr) {
        ensure(weight->grid == &g, "principal_eigenpair: weight on another grid");
        for (int id = 0; id < g.num_points(); ++id)
            if (m.on[id])
                ensure(weight->values[id] > 0.0,
                       "principal_eigenpair: weight must be strictly positive on the mask");
    }

    LaplaceOperator A(g, m);
    const int n = A.size();

    // The fully covered circle is the one singular case: constant kernel.
    if (g.periodic && n == g.num_points()) {
        std::vector<double> ones(n, 1.0);
        Field u = A.embed(ones);
        const double scale = std::sqrt(weight ? mass(u, *weight) : mass(u));
        for (auto& v : u.values) v /= scale;
        return EigenResult{0.0, std::move(u), 0, 0.0};
    }

    std::vector<double> wdiag;
    if (weight) {
        wdiag.resize(n);
        for (int d = 0; d < n; ++d) wdiag[d] = weight->values[A.lattice_points()[d]];
    }
    auto apply_w = [&](const std::vector<double>& x, std::vector<double>& y) {
        y = x;
        if (weight)
            for (int d = 0; d < n; ++d) y[d] *= wdiag[d];
    };

    std::vector<double> v(n, 1.0);
    if (warm_start != nullptr && warm_start->grid == &g) {
        v = A.restrict_to(*warm_start);
        if (!(std::sqrt(dot(v, v)) > 0.0)) v.assign(n, 1.0);
    }

    std::vector<double> Mv, Av(n), z = v;
    double lambda = 0.0, res = std::numeric_limits<double>::infinity();
    const int max_outer = 500;
    int outer = 0;
    for (; outer < max_outer; ++outer) {
        apply_w(v, Mv);
        if (A.tridiagonal()) {
            A.solve_tridiagonal(Mv, z);
        } else {
            const double inner_tol = std::max(tol * 1e-2, std::min(1e-4, res * 1e-2));
            conjugate_gradient(A, Mv, z, inner_tol, 10 * n + 100);
        }
        std::vector<double> Mz;
        apply_w(z, Mz);
        const double nz = std::sqrt(dot(z, Mz));
        ensure(nz > 0.0, "principal_eigenpair: iteration collapsed");
        for (int d = 0; d < n; ++d) z[d] /= nz;
        v = z;

        A.apply(v, Av);
        apply_w(v, Mv);
        lambda = dot(v, Av) / dot(v, Mv);
        double rnorm = 0.0, mnorm = 0.0;
        for (int d = 0; d < n; ++d) {
            const double rr = Av[d] - lambda * Mv[d];
            rnorm += rr * rr;
            mnorm += Mv[d] * Mv[d];
        }
        res = std::sqrt(rnorm) / (lambda * std::sqrt(mnorm));
        if (res <= tol) break;
    }
    if (res > tol) throw SolverError("principal_eigenpair: no convergence", res);

    // Sign fix, positivity clamp, quadrature normalization.
    double sum = 0.0;
    for (double s : v) sum += s;
    if (sum < 0.0)
        for (auto& s : v) s = -s;
    for (auto& s : v)
        if (s < 0.0) s = 0.0;
    Field u = A.embed(v);
    const double scale = std::sqrt(weight ? mass(u, *weight) : mass(u));
    ensure(scale > 0.0, "principal_eigenpair: zero mass after clamp");
    for (auto& s : u.values) s /= scale;

    // Report lambda and the residual of the field actually returned.
    std::vector<double> vf = A.restrict_to(u);
    A.apply(vf, Av);
    apply_w(vf, Mv);
    const double lam = dot(vf, Av) / dot(vf, Mv);
    double rnorm = 0.0, mnorm = 0.0;
    for (int d = 0; d < n; ++d) {
        const double rr = Av[d] - lam * Mv[d];
        rnorm += rr * rr;
        mnorm += Mv[d] * Mv[d];
    }
    return EigenResult{lam, std::move(u), outer + 1, std::sqrt(rnorm) / (lam * std::sqrt(mnorm))};
}

double interval_lambda1(double len) {
    ensure(len > 0.0, "interval_lambda1: length must be positive");
    const double f = std::numbers::pi / len;
    return f * f;
}

double rectangle_lambda1(double a, double b) {
    ensure(a > 0.0 && b > 0.0, "rectangle_lambda1: sides must be positive");
    const double pi = std::numbers::pi;
    return pi * pi * (1.0 / (a * a) + 1.0 / (b * b));
}

double arc_lambda1(double theta) {
    ensure(theta > 0.0, "arc_lambda1: arc length must be positive");
    const double f = std::numbers::pi / theta;
    return f * f;
}

}  // namespace optpart
