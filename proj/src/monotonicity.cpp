#include "optpart/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace optpart {

namespace {

constexpr double pi = std::numbers::pi;

// ---------- arc partitions of the circle ----------

double arc_objective(const std::vector<double>& theta) {
    double s = 0.0;
    for (double t : theta) s += pi / t;
    return 2.0 * s / static_cast<double>(theta.size());
}

// ---------- ball quadrature ----------

// A cell belongs to B(x0, r) when its center does.  Radii are snapped to
// (m + 1/2) h so the indicator changes by whole cell rings between samples,
// which keeps the finite differences of Phi out of the partial-cell noise.
std::vector<double> snap_radii(const Grid& g, const std::array<double, 2>& x0,
                               const std::vector<double>& radii) {
    const double h = std::max(g.h[0], g.dim == 2 ? g.h[1] : g.h[0]);
    const double cap = g.inradius_from(x0[0], x0[1]);
    std::vector<double> out;
    double prev = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        ensure(radii[i] > 0.0, "phi series: radii must be positive");
        if (i > 0) ensure(radii[i] > radii[i - 1], "phi series: radii must be increasing");
        ensure(radii[i] <= cap + 1e-12, "phi series: radius exceeds distance to the boundary");
        const double m = std::max(0.0, std::round(radii[i] / h - 0.5));
        const double snapped = (m + 0.5) * h;
        if (snapped > prev) {
            out.push_back(snapped);
            prev = snapped;
        }
    }
    ensure(!out.empty(), "phi series: no usable radii after snapping");
    return out;
}

double ball_sum(const Grid& g, const std::vector<double>& cell_values,
                const std::array<double, 2>& x0, double r) {
    const double r2 = r * r;
    double acc = 0.0;
    for (int id = 0; id < g.num_points(); ++id) {
        const auto ij = g.coords(id);
        const double dx = g.x(ij[0]) - x0[0];
        const double dy = (g.dim == 2 ? g.y(ij[1]) : 0.0) - x0[1];
        if (dx * dx + dy * dy < r2) acc += cell_values[id];
    }
    return acc * g.cell_volume();
}

void check_segregated(const std::vector<Field>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j)
            for (int id = 0; id < fields[i].grid->num_points(); ++id)
                ensure(fields[i].values[id] * fields[j].values[id] == 0.0,
                       "phi_disjoint: fields must have pairwise disjoint supports");
}

PhiSeries phi_product_of_energies(const std::vector<Field>& fields,
                                  const std::array<double, 2>& x0,
                                  const std::vector<double>& radii, double expo,
                                  PhiVariant variant) {
    const Grid& g = *fields.front().grid;
    PhiSeries s;
    s.variant = variant;
    s.center = x0;
    s.exponent = expo;
    s.components = static_cast<int>(fields.size());
    s.radii = snap_radii(g, x0, radii);

    std::vector<std::vector<double>> dens;
    for (const auto& f : fields) dens.push_back(dirichlet_energy_density(f));

    for (double r : s.radii) {
        double phi = 1.0;
        for (const auto& d : dens) phi *= ball_sum(g, d, x0, r) / std::pow(r, expo);
        s.values.push_back(phi);
    }
    return s;
}

// ---------- small PCG used by the competition solver ----------

template <class Op>
int pcg(Op&& apply, const std::vector<double>& diag, const std::vector<double>& b,
        std::vector<double>& x, double rel_tol, int max_iter) {
    const int n = static_cast<int>(b.size());
    std::vector<double> r(n), z(n), p(n), Ap;
    apply(x, Ap);
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - Ap[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
        rz += r[i] * z[i];
    }
    p = z;
    int it = 0;
    for (; it < max_iter; ++it) {
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
        if (std::sqrt(rnorm) <= rel_tol * bnorm) break;
        apply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return it;
}

// screening potential of component i: sum_{j != i} a_ij u_j, on lattice dofs
std::vector<double> screening(const LaplaceOperator& A, const std::vector<Field>& u,
                              const std::vector<std::vector<double>>& a, int i) {
    std::vector<double> c(A.size(), 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (static_cast<int>(j) == static_cast<int>(i)) continue;
        const double aij = a[i][j];
        if (aij == 0.0) continue;
        for (int d = 0; d < A.size(); ++d) c[d] += aij * u[j].values[A.lattice_points()[d]];
    }
    return c;
}

// Dirichlet lift: boundary values move to the right-hand side through the
// stencil edges that leave the domain.
std::vector<double> boundary_load(const Grid& g, const LaplaceOperator& A, const Field& bdata) {
    std::vector<double> b(A.size(), 0.0);
    int nbr[4];
    for (int d = 0; d < A.size(); ++d) {
        const int id = A.lattice_points()[d];
        const auto ij = g.coords(id);
        const int n = g.neighbors(id, nbr);
        for (int t = 0; t < n; ++t)
            if (!g.in_domain(nbr[t])) {
                const auto kj = g.coords(nbr[t]);
                const double hh = (ij[1] == kj[1]) ? g.h[0] : g.h[1];
                b[d] += bdata.values[nbr[t]] / (hh * hh);
            }
    }
    return b;
}

}  // namespace

std::optional<double> beta_known(int k, int N) {
    ensure(k >= 2, "beta_known: need k >= 2");
    ensure(N >= 2, "beta_known: need N >= 2");
    if (k == 2) return static_cast<double>(N);
    if (N == 2) return static_cast<double>(k);
    return std::nullopt;
}

double beta_circle_opt(int k, int n) {
    ensure(k >= 2, "beta_circle_opt: need k >= 2");
    ensure(n >= 8 * k, "beta_circle_opt: circle grid too coarse for k arcs");

    // uneven start, snapped to whole grid cells: arc i gets mass ~ (i+1)
    const double step = 2.0 * pi / n;
    std::vector<int> cells(k);
    int used = 0;
    const double total = k * (k + 1) / 2.0;
    for (int i = 0; i < k; ++i) {
        cells[i] = std::max(1, static_cast<int>(std::round(n * (i + 1) / total)));
        used += cells[i];
    }
    cells[k - 1] += n - used;  // make the arcs close up exactly
    ensure(cells[k - 1] >= 1, "beta_circle_opt: degenerate start");
    std::vector<double> theta(k);
    for (int i = 0; i < k; ++i) theta[i] = cells[i] * step;

    // projected gradient on the simplex {sum theta = 2 pi} with backtracking;
    // the objective is convex, so this lands on the equal-arc optimum
    double f = arc_objective(theta);
    double eta = 0.1;
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> grad(k);
        double mean = 0.0;
        for (int i = 0; i < k; ++i) {
            grad[i] = -2.0 * pi / (k * theta[i] * theta[i]);
            mean += grad[i];
        }
        mean /= k;
        double gnorm = 0.0;
        for (int i = 0; i < k; ++i) {
            grad[i] -= mean;
            gnorm = std::max(gnorm, std::abs(grad[i]));
        }
        if (gnorm < 1e-12) break;
        bool stepped = false;
        while (eta > 1e-16) {
            std::vector<double> trial(k);
            bool feasible = true;
            for (int i = 0; i < k; ++i) {
                trial[i] = theta[i] - eta * grad[i];
                feasible = feasible && trial[i] > 0.0;
            }
            const double ft = feasible ? arc_objective(trial) : std::numeric_limits<double>::infinity();
            if (ft < f) {
                theta = std::move(trial);
                f = ft;
                eta *= 1.5;
                stepped = true;
                break;
            }
            eta *= 0.5;
        }
        if (!stepped) break;
    }

    const double closed = static_cast<double>(k);  // equal arcs: (2/k) * k * (k/2)
    if (std::abs(f - closed) > 1e-6 * closed)
        throw SolverError("beta_circle_opt: descent did not reach the equal-arc value",
                          std::abs(f - closed));
    return closed;
}

BetaReport beta_table_check(const std::vector<double>& values) {
    BetaReport rep;
    rep.values = values;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1]) rep.nondecreasing = false;
    if (values.size() >= 2 && !(values[1] > values[0])) rep.strict_above_two = false;
    rep.pass = rep.nondecreasing && rep.strict_above_two;
    return rep;
}

BetaReport beta_monotone_check(int k_max) {
    ensure(k_max >= 2, "beta_monotone_check: need k_max >= 2");
    std::vector<double> values;
    for (int k = 2; k <= k_max; ++k) values.push_back(beta_circle_opt(k, std::max(720, 8 * k)));
    return beta_table_check(values);
}

PhiSeries phi_disjoint(const std::vector<Field>& fields, const std::array<double, 2>& x0,
                       const std::vector<double>& radii, double beta) {
    ensure(fields.size() >= 2, "phi_disjoint: need at least two fields");
    const Grid& g = *fields.front().grid;
    for (const auto& f : fields) {
        ensure(f.grid == &g, "phi_disjoint: fields on different grids");
        for (double v : f.values) ensure(v >= 0.0, "phi_disjoint: fields must be nonnegative");
    }
    ensure(beta > 0.0, "phi_disjoint: beta must be positive");
    check_segregated(fields);
    return phi_product_of_energies(fields, x0, radii, beta, PhiVariant::disjoint_k);
}

PhiSeries phi_acf(const Field& w1, const Field& w2, const std::array<double, 2>& x0,
                  const std::vector<double>& radii) {
    ensure(w1.grid != nullptr && w1.grid == w2.grid, "phi_acf: fields must share a grid");
    ensure(w1.grid->dim == 2, "phi_acf: plane version only");
    // in the plane the kernel |x - x0|^(N-2) is identically one, so the
    // kernel-weighted energies reduce to the plain ones at quadratic scaling
    PhiSeries s = phi_disjoint({w1, w2}, x0, radii, 2.0);
    s.variant = PhiVariant::acf_kernel;
    return s;
}

MonotoneReport check_monotone(const PhiSeries& series, double slack, int from_index) {
    ensure(series.radii.size() >= 3, "check_monotone: need at least three radii");
    ensure(series.radii.size() == series.values.size(), "check_monotone: malformed series");
    ensure(slack >= 0.0, "check_monotone: slack must be nonnegative");
    const int n = static_cast<int>(series.values.size());
    MonotoneReport rep;
    rep.slack = slack;
    rep.from_index = from_index >= 0 ? std::min(from_index, n - 1) : n / 3;

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = rep.from_index; j < n; ++j) {
        const double v = series.values[j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (j + 1 < n && v > 0.0) {
            const double drop = (v - series.values[j + 1]) / v;
            rep.worst_drop = std::max(rep.worst_drop, drop);
            if (series.values[j + 1] < v * (1.0 - slack)) rep.monotone = false;
        }
    }
    rep.constant = hi > 0.0 && (hi - lo) / hi < slack;
    if (hi == 0.0) rep.constant = true;  // identically zero tail
    return rep;
}

CompetitionState solve_competition(const Grid& g, const std::vector<std::vector<double>>& a,
                                   const std::vector<Field>& boundary_data, double tol) {
    const int k = static_cast<int>(a.size());
    ensure(k >= 1, "solve_competition: empty coupling matrix");
    for (const auto& row : a) {
        ensure(static_cast<int>(row.size()) == k, "solve_competition: coupling matrix must be square");
        for (double v : row) ensure(v >= 0.0, "solve_competition: couplings must be nonnegative");
    }
    ensure(static_cast<int>(boundary_data.size()) == k,
           "solve_competition: one boundary field per component");
    for (const auto& b : boundary_data) {
        ensure(b.grid == &g, "solve_competition: boundary data on another grid");
        for (double v : b.values) ensure(v >= 0.0, "solve_competition: boundary data must be nonnegative");
    }
    ensure(tol > 0.0, "solve_competition: tolerance must be positive");

    Mask dom = domain_mask(g);
    LaplaceOperator A(g, dom);
    const int n = A.size();

    std::vector<std::vector<double>> load(k), u(k, std::vector<double>(n, 0.0));
    std::vector<double> bmax(k, 0.0);
    for (int i = 0; i < k; ++i) {
        load[i] = boundary_load(g, A, boundary_data[i]);
        for (int id = 0; id < g.num_points(); ++id)
            if (!g.in_domain(id)) bmax[i] = std::max(bmax[i], boundary_data[i].values[id]);
    }

    auto nonlinear_residual = [&]() {
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            std::vector<double> Au;
            A.apply(u[i], Au);
            std::vector<double> c(n, 0.0);
            for (int j = 0; j < k; ++j) {
                if (j == i || a[i][j] == 0.0) continue;
                for (int d = 0; d < n; ++d) c[d] += a[i][j] * u[j][d];
            }
            double num = 0.0, den = 0.0;
            for (int d = 0; d < n; ++d) {
                const double res = Au[d] + c[d] * u[i][d] - load[i][d];
                num += res * res;
                den += load[i][d] * load[i][d];
            }
            worst = std::max(worst, den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
        }
        return worst;
    };

    // component fields carry boundary values on the frame so that callers see
    // the Dirichlet data; lattice dofs are updated from u after every sweep
    CompetitionState st;
    st.grid = &g;
    st.a = a;
    st.fields.assign(k, make_field(g));
    auto publish = [&]() {
        for (int i = 0; i < k; ++i) {
            st.fields[i] = boundary_data[i];
            for (int id = 0; id < g.num_points(); ++id)
                if (g.in_domain(id)) st.fields[i].values[id] = 0.0;
            for (int d = 0; d < n; ++d) st.fields[i].values[A.lattice_points()[d]] = u[i][d];
        }
    };

    // (A + diag(c)) u_i = load_i needs the screening evaluated on whole fields
    publish();
    double res = nonlinear_residual();
    int bad_streak = 0;
    const int max_sweeps = 500;
    for (int sweep = 0; sweep < max_sweeps && res > tol; ++sweep) {
        for (int i = 0; i < k; ++i) {
            const std::vector<double> c = screening(A, st.fields, a, i);
            std::vector<double> diag(n);
            for (int d = 0; d < n; ++d) diag[d] = A.diagonal() + c[d];
            auto apply_shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
                A.apply(x, y);
                for (int d = 0; d < n; ++d) y[d] += c[d] * x[d];
            };
            pcg(apply_shifted, diag, load[i], u[i], std::min(1e-2, tol), 4 * n + 100);
            for (double& v : u[i]) v = std::max(v, 0.0);
            publish();
        }
        const double prev = res;
        res = nonlinear_residual();
        st.sweeps = sweep + 1;
        if (res > prev) {
            if (++bad_streak >= 10)
                throw SolverError("solve_competition: residual increased for 10 sweeps", res);
        } else {
            bad_streak = 0;
        }
    }
    st.residual = res;
    st.converged = res <= tol;
    if (!st.converged)
        throw SolverError("solve_competition: no convergence within the sweep budget", res);

    // discrete maximum principle: interior values cannot exceed boundary data
    for (int i = 0; i < k; ++i)
        for (int d = 0; d < n; ++d)
            if (u[i][d] > bmax[i] * (1.0 + 1e-10) + 1e-14)
                throw SolverError("solve_competition: maximum principle violated", u[i][d] - bmax[i]);
    return st;
}

PhiSeries phi_competition(const CompetitionState& state, int h, double hprime,
                          const std::array<double, 2>& x0, const std::vector<double>& radii) {
    ensure(state.grid != nullptr, "phi_competition: state without grid");
    const Grid& g = *state.grid;
    ensure(g.dim == 2, "phi_competition: plane version only");
    const int k = static_cast<int>(state.fields.size());
    ensure(h >= 2 && h <= k, "phi_competition: need 2 <= h <= number of components");
    const auto beta = beta_known(h, 2);
    ensure(hprime < *beta, "phi_competition: hprime must stay below the partition exponent");
    ensure(hprime > 0.0, "phi_competition: hprime must be positive");

    PhiSeries s;
    s.variant = PhiVariant::competition;
    s.center = x0;
    s.exponent = hprime;
    s.components = h;
    s.radii = snap_radii(g, x0, radii);

    // factor i: gradient energy plus the interaction mass u_i^2 sum a_ij u_j;
    // radii stay below the inradius, so boundary-lift edges never enter
    std::vector<std::vector<double>> dens(h);
    for (int i = 0; i < h; ++i) {
        dens[i] = dirichlet_energy_density(state.fields[i]);
        for (int id = 0; id < g.num_points(); ++id) {
            double coupling = 0.0;
            for (int j = 0; j < k; ++j)
                if (j != i) coupling += state.a[i][j] * state.fields[j].values[id];
            const double ui = state.fields[i].values[id];
            dens[i][id] += ui * ui * coupling;
        }
    }
    for (double r : s.radii) {
        double phi = 1.0;
        for (int i = 0; i < h; ++i) phi *= ball_sum(g, dens[i], x0, r) / std::pow(r, hprime);
        s.values.push_back(phi);
    }
    return s;
}

GrowthReport growth_diagnostic(const CompetitionState& state, const std::array<double, 2>& x0,
                               const std::vector<double>& radii) {
    ensure(state.grid != nullptr, "growth_diagnostic: state without grid");
    const Grid& g = *state.grid;
    const int k = static_cast<int>(state.fields.size());
    GrowthReport rep;
    rep.reference = static_cast<double>(k) * k;
    rep.note = "advisory only: log-log slope on a finite box, no asymptotic claim";

    const std::vector<double> snapped = snap_radii(g, x0, radii);
    std::vector<std::vector<double>> dens(k);
    for (int i = 0; i < k; ++i) {
        dens[i] = dirichlet_energy_density(state.fields[i]);
        for (int id = 0; id < g.num_points(); ++id) {
            double coupling = 0.0;
            for (int j = 0; j < k; ++j)
                if (j != i) coupling += state.a[i][j] * state.fields[j].values[id];
            const double ui = state.fields[i].values[id];
            dens[i][id] += ui * ui * coupling;
        }
    }

    std::vector<double> lr, lv;
    for (double r : snapped) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i) prod *= ball_sum(g, dens[i], x0, r);
        if (prod > 0.0) {
            lr.push_back(std::log(r));
            lv.push_back(std::log(prod));
        }
    }
    if (lr.size() < 2) {
        rep.degenerate = true;
        rep.note = "degenerate: product of factors vanishes on the sampled balls";
        return rep;
    }
    const double n = static_cast<double>(lr.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) {
        sx += lr[t];
        sy += lv[t];
        sxx += lr[t] * lr[t];
        sxy += lr[t] * lv[t];
    }
    rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

}  // namespace optpart
