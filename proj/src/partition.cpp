#include "optpart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace optpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Amplitude given to component i before the winner-takes-all comparison.
// Stationarity of the free functional fixes t^(2q-2) = a*lambda with
// q = p/(p-1), i.e. an exponent of (p-1)/2; the p = 1 schedule uses the
// limiting weighting 1/sqrt(lambda).
double nehari_factor(double p, double a, double lambda) {
    if (p == 1.0) return 1.0 / std::sqrt(lambda);
    return std::pow(a * lambda, 0.5 * (p - 1.0));
}

double objective_value(const std::vector<double>& lambdas, const std::vector<double>& weights,
                       double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] < kInf)) return kInf;
        acc += std::pow(weights[i] * lambdas[i], p);
    }
    return acc / static_cast<double>(lambdas.size());
}

// Deterministic seed layouts.  Components are laid out left to right (or by
// angle) in an order that alternates the weight classes, largest class first,
// so that differently weighted components sit next to each other.
std::vector<int> class_alternating_order(const std::vector<double>& weights) {
    const int k = static_cast<int>(weights.size());
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < k; ++i) {
        bool placed = false;
        for (auto& grp : groups)
            if (weights[grp.front()] == weights[i]) {
                grp.push_back(i);
                placed = true;
                break;
            }
        if (!placed) groups.push_back({i});
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    std::vector<int> order;
    std::vector<std::size_t> pos(groups.size(), 0);
    while (static_cast<int>(order.size()) < k) {
        for (std::size_t gidx = 0; gidx < groups.size(); ++gidx) {
            if (pos[gidx] < groups[gidx].size()) order.push_back(groups[gidx][pos[gidx]++]);
        }
    }
    return order;
}

std::vector<std::vector<Mask>> seed_layouts(const Grid& g, int k,
                                            const std::vector<double>& weights, int max_seeds) {
    const std::vector<int> order = class_alternating_order(weights);
    std::vector<std::vector<Mask>> layouts;

    auto strips = [&](bool vertical) {
        std::vector<Mask> masks(k, make_mask(g));
        const double L = vertical ? g.lengths[0] : g.lengths[1];
        for (int id = 0; id < g.num_points(); ++id) {
            if (!g.in_domain(id)) continue;
            const auto ij = g.coords(id);
            const double c = vertical ? g.x(ij[0]) : g.y(ij[1]);
            int slot = static_cast<int>(std::floor(c / L * k));
            slot = std::clamp(slot, 0, k - 1);
            masks[order[slot]].on[id] = 1;
        }
        return masks;
    };

    layouts.push_back(strips(true));
    if (g.dim == 2) {
        layouts.push_back(strips(false));
        // angular sectors about the domain center
        std::vector<Mask> sect(k, make_mask(g));
        const auto c = g.center();
        const double two_pi = 2.0 * std::numbers::pi;
        for (int id = 0; id < g.num_points(); ++id) {
            if (!g.in_domain(id)) continue;
            const auto ij = g.coords(id);
            double th = std::atan2(g.y(ij[1]) - c[1], g.x(ij[0]) - c[0]);
            if (th < 0.0) th += two_pi;
            int slot = static_cast<int>(std::floor(th / two_pi * k));
            slot = std::clamp(slot, 0, k - 1);
            sect[order[slot]].on[id] = 1;
        }
        layouts.push_back(std::move(sect));
    }
    if (static_cast<int>(layouts.size()) > max_seeds) layouts.resize(max_seeds);
    return layouts;
}

// Refill an emptied component with half of the largest remaining mask,
// split across the longer axis of its bounding box.
void restart_from_split(const Grid& g, std::vector<Mask>& masks, int empty_idx,
                        std::vector<std::string>& events) {
    int donor = -1, donor_count = 0;
    for (int j = 0; j < static_cast<int>(masks.size()); ++j) {
        const int c = masks[j].count();
        if (c > donor_count) {
            donor = j;
            donor_count = c;
        }
    }
    if (donor < 0 || donor_count < 2) {
        events.push_back("component " + std::to_string(empty_idx) +
                         " emptied and no donor large enough to split");
        return;
    }
    int i0 = g.points[0], i1 = -1, j0 = g.points[1], j1 = -1;
    for (int id = 0; id < g.num_points(); ++id) {
        if (!masks[donor].on[id]) continue;
        const auto ij = g.coords(id);
        i0 = std::min(i0, ij[0]);
        i1 = std::max(i1, ij[0]);
        j0 = std::min(j0, ij[1]);
        j1 = std::max(j1, ij[1]);
    }
    const bool split_x = (i1 - i0) >= (j1 - j0);
    const int mid = split_x ? (i0 + i1 + 1) / 2 : (j0 + j1 + 1) / 2;
    for (int id = 0; id < g.num_points(); ++id) {
        if (!masks[donor].on[id]) continue;
        const auto ij = g.coords(id);
        if ((split_x ? ij[0] : ij[1]) >= mid) {
            masks[donor].on[id] = 0;
            masks[empty_idx].on[id] = 1;
        }
    }
    events.push_back("component " + std::to_string(empty_idx) + " restarted from a split of component " +
                     std::to_string(donor));
}

// One-ring extension: outside its mask a component competes with the largest
// value it attains on neighbouring mask cells (the discrete slope proxy).
Field extend_one_ring(const Field& u, const Mask& m) {
    const Grid& g = *u.grid;
    Field ext = u;
    int nbr[4];
    for (int id = 0; id < g.num_points(); ++id) {
        if (!g.in_domain(id) || m.on[id]) continue;
        double best = 0.0;
        const int n = g.neighbors(id, nbr);
        for (int t = 0; t < n; ++t)
            if (m.on[nbr[t]]) best = std::max(best, u.values[nbr[t]]);
        ext.values[id] = best;
    }
    return ext;
}

// Damped Gauss-Seidel relaxation of the eigen-equation inside the mask;
// smooths reassignment noise when inner solves are loose.
void smooth_in_mask(Field& u, const Mask& m, double lambda, int sweeps) {
    const Grid& g = *u.grid;
    const double diag = 2.0 / (g.h[0] * g.h[0]) + (g.dim == 2 ? 2.0 / (g.h[1] * g.h[1]) : 0.0);
    if (diag - lambda <= 0.0) return;
    int nbr[4];
    for (int s = 0; s < sweeps; ++s) {
        for (int id = 0; id < g.num_points(); ++id) {
            if (!m.on[id]) continue;
            double acc = 0.0;
            const int n = g.neighbors(id, nbr);
            for (int t = 0; t < n; ++t) {
                if (!m.on[nbr[t]]) continue;
                const auto a = g.coords(id);
                const auto b = g.coords(nbr[t]);
                const double hh = (a[1] == b[1]) ? g.h[0] : g.h[1];
                acc += u.values[nbr[t]] / (hh * hh);
            }
            u.values[id] = acc / (diag - lambda);
        }
    }
}

// Demote one cell of every touching pair so the final masks share a one-cell
// Dirichlet layer, mirroring the common zero set of the continuum optimum.
void carve_shared_layer(const Grid& g, std::vector<Mask>& masks, const std::vector<Field>& u) {
    const int k = static_cast<int>(masks.size());
    std::vector<int> owner(g.num_points(), -1);
    for (int i = 0; i < k; ++i)
        for (int id = 0; id < g.num_points(); ++id)
            if (masks[i].on[id]) owner[id] = i;
    std::vector<std::uint8_t> demote(g.num_points(), 0);
    int nbr[4];
    for (int id = 0; id < g.num_points(); ++id) {
        const int i = owner[id];
        if (i < 0) continue;
        const int n = g.neighbors(id, nbr);
        for (int t = 0; t < n; ++t) {
            const int j = owner[nbr[t]];
            if (j < 0 || j == i) continue;
            const double vi = u[i].values[id];
            const double vj = u[j].values[nbr[t]];
            if (vi < vj)
                demote[id] = 1;
            else if (vj < vi)
                demote[nbr[t]] = 1;
            else
                demote[i < j ? nbr[t] : id] = 1;  // tie: keep the lower index side
        }
    }
    for (int id = 0; id < g.num_points(); ++id)
        if (demote[id] && owner[id] >= 0) masks[owner[id]].on[id] = 0;
}

struct AlternationState {
    std::vector<Mask> masks;
    std::vector<Field> eigenfunctions;
    std::vector<double> lambdas;
    double objective = kInf;
};

PartitionResult run_alternation(const Grid& g, int k, double p, const std::vector<double>& weights,
                                const PartitionOptions& opts, std::vector<Mask> masks) {
    PartitionResult out;
    out.p = p;
    out.weights = weights;

    auto weight_of = [&](int i) -> const Field* {
        if (opts.component_weights.empty()) return nullptr;
        return opts.component_weights[i];
    };

    AlternationState best;
    std::vector<Field> warm(k);
    std::vector<double> lambdas(k, kInf);
    std::vector<Field> phi(k);
    int no_progress = 0;

    for (int iter = 0; iter < opts.max_outer; ++iter) {
        out.outer_iterations = iter + 1;
        for (int i = 0; i < k; ++i)
            if (masks[i].empty()) restart_from_split(g, masks, i, out.events);

        for (int i = 0; i < k; ++i) {
            EigenResult er = principal_eigenpair(g, masks[i], opts.eigen_tol, weight_of(i),
                                                 warm[i].grid ? &warm[i] : nullptr);
            lambdas[i] = er.lambda;
            phi[i] = std::move(er.eigenfunction);
            warm[i] = phi[i];
        }
        const double obj = objective_value(lambdas, weights, p);

        const double prev_best = best.objective;
        if (obj <= prev_best * (1.0 + 1e-12) || !(prev_best < kInf)) {
            if (obj < best.objective) best = AlternationState{masks, phi, lambdas, obj};
            out.history.push_back(std::min(obj, prev_best));
            const double rel_drop = (prev_best < kInf && prev_best > 0.0)
                                        ? (prev_best - obj) / prev_best
                                        : kInf;
            if (rel_drop < opts.objective_tol)
                ++no_progress;
            else
                no_progress = 0;
            if (no_progress >= opts.stable_steps) {
                out.converged = true;
                break;
            }
        } else {
            out.events.push_back("objective increased at step " + std::to_string(iter) +
                                 "; keeping the best masks");
            out.converged = true;
            break;
        }

        // Rescale, extend by one ring, reassign winner-takes-all.
        std::vector<Field> u(k);
        for (int i = 0; i < k; ++i) {
            const double t = nehari_factor(p, weights[i], lambdas[i]);
            u[i] = phi[i];
            for (auto& v : u[i].values) v *= t;
            if (opts.smoothing_sweeps > 0) smooth_in_mask(u[i], masks[i], lambdas[i], opts.smoothing_sweeps);
            u[i] = extend_one_ring(u[i], masks[i]);
        }
        std::vector<Field> seg = segregate(u);
        std::vector<Mask> next(k, make_mask(g));
        for (int i = 0; i < k; ++i)
            for (int id = 0; id < g.num_points(); ++id)
                if (seg[i].values[id] > 0.0) next[i].on[id] = 1;

        // segregation invariant: the new masks are pairwise disjoint
        for (int id = 0; id < g.num_points(); ++id) {
            int cnt = 0;
            for (int i = 0; i < k; ++i) cnt += next[i].on[id] ? 1 : 0;
            ensure(cnt <= 1, "optimize_partition: reassignment produced overlapping masks");
        }
        if (next == masks) {
            out.converged = true;
            break;
        }
        masks = std::move(next);
    }

    // Final state: best accepted masks, optionally with the shared zero layer.
    std::vector<Mask> final_masks = best.masks;
    if (opts.carve_interface) {
        std::vector<Field> u(k);
        for (int i = 0; i < k; ++i) {
            const double t = nehari_factor(p, weights[i], best.lambdas[i]);
            u[i] = best.eigenfunctions[i];
            for (auto& v : u[i].values) v *= t;
        }
        carve_shared_layer(g, final_masks, u);
    }
    out.masks = final_masks;
    out.lambdas.assign(k, kInf);
    out.fields.assign(k, Field{});
    for (int i = 0; i < k; ++i) {
        EigenResult er = principal_eigenpair(g, final_masks[i], opts.eigen_tol, weight_of(i),
                                             best.eigenfunctions[i].grid ? &best.eigenfunctions[i] : nullptr);
        out.lambdas[i] = er.lambda;
        out.fields[i] = std::move(er.eigenfunction);
        const double t = nehari_factor(p, weights[i], out.lambdas[i]);
        for (auto& v : out.fields[i].values) v *= t;
    }
    out.objective = objective_value(out.lambdas, weights, p);
    return out;
}

}  // namespace

PartitionResult optimize_partition(const Grid& g, int k, double p, std::vector<double> weights,
                                   const PartitionOptions& opts) {
    ensure(k >= 2, "optimize_partition: need at least two components");
    ensure(p > 0.0, "optimize_partition: exponent p must be positive");
    if (weights.empty()) weights.assign(k, 1.0);
    ensure(static_cast<int>(weights.size()) == k, "optimize_partition: one weight per component");
    for (double a : weights) ensure(a > 0.0, "optimize_partition: weights must be positive");
    if (!opts.component_weights.empty())
        ensure(static_cast<int>(opts.component_weights.size()) == k,
               "optimize_partition: one mass weight per component");

    std::vector<std::vector<Mask>> seeds;
    if (!opts.initial_masks.empty()) {
        ensure(static_cast<int>(opts.initial_masks.size()) == k,
               "optimize_partition: initial_masks must have one mask per component");
        for (const auto& m : opts.initial_masks)
            ensure(m.grid == &g, "optimize_partition: initial mask on another grid");
        seeds.push_back(opts.initial_masks);
    } else {
        seeds = seed_layouts(g, k, weights, std::max(1, opts.max_seeds));
    }

    PartitionResult best;
    best.objective = kInf;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        PartitionResult r = run_alternation(g, k, p, weights, opts, seeds[s]);
        if (r.objective < best.objective * (1.0 - 1e-12) || !(best.objective < kInf)) {
            if (seeds.size() > 1)
                r.events.push_back("seed layout " + std::to_string(s) + " selected");
            best = std::move(r);
        }
    }
    return best;
}

double evaluate_partition(const std::vector<Mask>& masks, double p,
                          const std::vector<double>& weights, double eigen_tol) {
    ensure(!masks.empty(), "evaluate_partition: no masks");
    const Grid& g = *masks.front().grid;
    for (const auto& m : masks) ensure(m.grid == &g, "evaluate_partition: masks on different grids");
    ensure(weights.size() == masks.size(), "evaluate_partition: one weight per mask");
    ensure(p > 0.0, "evaluate_partition: exponent p must be positive");
    for (int id = 0; id < g.num_points(); ++id) {
        int cnt = 0;
        for (const auto& m : masks) cnt += m.on[id] ? 1 : 0;
        ensure(cnt <= 1, "evaluate_partition: masks overlap");
    }
    std::vector<double> lambdas;
    for (const auto& m : masks) lambdas.push_back(principal_eigenpair(g, m, eigen_tol).lambda);
    return objective_value(lambdas, weights, p);
}

std::vector<Field> segregate(const std::vector<Field>& fields) {
    ensure(!fields.empty(), "segregate: no fields");
    const Grid& g = *fields.front().grid;
    for (const auto& f : fields) {
        ensure(f.grid == &g, "segregate: fields on different grids");
        for (double v : f.values) ensure(v >= 0.0, "segregate: fields must be nonnegative");
    }
    std::vector<Field> out = fields;
    const int k = static_cast<int>(fields.size());
    for (int id = 0; id < g.num_points(); ++id) {
        int winner = -1;
        double top = 0.0;
        for (int i = 0; i < k; ++i) {
            const double v = fields[i].values[id];
            if (v > top) {
                top = v;
                winner = i;
            }
        }
        for (int i = 0; i < k; ++i)
            if (i != winner) out[i].values[id] = 0.0;
    }
    return out;
}

PartitionResult postprocess_connect(const PartitionResult& in, const Grid& g, double eigen_tol) {
    PartitionResult out = in;
    for (std::size_t i = 0; i < out.masks.size(); ++i) {
        auto comps = connected_components(out.masks[i]);
        if (comps.size() <= 1) continue;
        int keep = 0;
        double best = kInf;
        std::vector<EigenResult> ers(comps.size());
        for (std::size_t c = 0; c < comps.size(); ++c) {
            ers[c] = principal_eigenpair(g, comps[c], eigen_tol);
            if (ers[c].lambda < best) {
                best = ers[c].lambda;
                keep = static_cast<int>(c);
            }
        }
        const double scale = out.lambdas.empty() ? 1.0
                             : nehari_factor(out.p, out.weights[i], ers[keep].lambda);
        out.masks[i] = comps[keep];
        out.lambdas[i] = ers[keep].lambda;
        out.fields[i] = ers[keep].eigenfunction;
        for (auto& v : out.fields[i].values) v *= scale;
        out.events.push_back("component " + std::to_string(i) + " reduced to its best connected piece (" +
                             std::to_string(comps.size()) + " pieces found)");
    }
    out.objective = objective_value(out.lambdas, out.weights, out.p);
    return out;
}

ExtremalityReport extremality_check(const Grid& g, const std::vector<Field>& fields,
                                    const std::vector<double>& lambdas, double tol) {
    const int k = static_cast<int>(fields.size());
    ensure(k >= 2, "extremality_check: need at least two fields");
    ensure(static_cast<int>(lambdas.size()) == k, "extremality_check: one lambda per field");
    for (const auto& f : fields) ensure(f.grid == &g, "extremality_check: field on another grid");
    for (int id = 0; id < g.num_points(); ++id)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                ensure(fields[i].values[id] * fields[j].values[id] == 0.0,
                       "extremality_check: fields must have disjoint supports");

    Mask dom = domain_mask(g);
    LaplaceOperator A(g, dom);
    auto apply_lattice = [&](const std::vector<double>& vals) {
        std::vector<double> x(A.size()), y;
        for (int d = 0; d < A.size(); ++d) x[d] = vals[A.lattice_points()[d]];
        A.apply(x, y);
        return y;
    };

    ExtremalityReport rep;
    rep.tol = tol;
    rep.ineq1_max.assign(k, -kInf);
    rep.ineq2_min.assign(k, kInf);

    std::vector<std::vector<double>> Au(k);
    for (int i = 0; i < k; ++i) Au[i] = apply_lattice(fields[i].values);

    for (int i = 0; i < k; ++i) {
        for (int d = 0; d < A.size(); ++d) {
            const int id = A.lattice_points()[d];
            const double r1 = Au[i][d] - lambdas[i] * fields[i].values[id];
            rep.ineq1_max[i] = std::max(rep.ineq1_max[i], r1);
            double lhs = Au[i][d];
            double rhs = lambdas[i] * fields[i].values[id];
            for (int j = 0; j < k; ++j) {
                if (j == i) continue;
                lhs -= Au[j][d];
                rhs -= lambdas[j] * fields[j].values[id];
            }
            rep.ineq2_min[i] = std::min(rep.ineq2_min[i], lhs - rhs);
        }
    }
    rep.pass = true;
    for (int i = 0; i < k; ++i)
        if (rep.ineq1_max[i] > tol || rep.ineq2_min[i] < -tol) rep.pass = false;
    return rep;
}

std::vector<int> multiplicity_map(const std::vector<Mask>& masks, int radius) {
    ensure(!masks.empty(), "multiplicity_map: no masks");
    ensure(radius >= 1, "multiplicity_map: radius must be at least one cell");
    const Grid& g = *masks.front().grid;
    for (const auto& m : masks) ensure(m.grid == &g, "multiplicity_map: masks on different grids");

    const int nx = g.points[0], ny = g.points[1];
    std::vector<int> mult(g.num_points(), 0);
    for (int id = 0; id < g.num_points(); ++id) {
        const auto ij = g.coords(id);
        int count = 0;
        for (const auto& m : masks) {
            bool meets = false;
            for (int dj = -radius; dj <= radius && !meets; ++dj) {
                for (int di = -radius; di <= radius && !meets; ++di) {
                    int i = ij[0] + di, j = ij[1] + dj;
                    if (g.periodic)
                        i = (i % nx + nx) % nx;
                    else if (i < 0 || i >= nx)
                        continue;
                    if (g.dim == 2) {
                        if (j < 0 || j >= ny) continue;
                    } else if (dj != 0) {
                        continue;
                    }
                    if (m.on[g.index(i, g.dim == 2 ? j : 0)]) meets = true;
                }
            }
            if (meets) ++count;
        }
        mult[id] = count;
    }
    return mult;
}

double local_exponent_fit(const Field& V, const std::array<double, 2>& pt,
                          const std::vector<double>& radii) {
    ensure(V.grid != nullptr, "local_exponent_fit: field without grid");
    ensure(radii.size() >= 2, "local_exponent_fit: need at least two radii");
    const Grid& g = *V.grid;
    const double half = 0.5 * std::max(g.h[0], g.dim == 2 ? g.h[1] : g.h[0]);

    std::vector<double> lr, lv;
    for (double r : radii) {
        ensure(r > 0.0, "local_exponent_fit: radii must be positive");
        double sup = 0.0;
        for (int id = 0; id < g.num_points(); ++id) {
            const auto ij = g.coords(id);
            const double dx = g.x(ij[0]) - pt[0];
            const double dy = (g.dim == 2 ? g.y(ij[1]) : 0.0) - pt[1];
            const double dist = std::hypot(dx, dy);
            if (std::abs(dist - r) <= half) sup = std::max(sup, std::abs(V.values[id]));
        }
        if (sup > 0.0) {
            lr.push_back(std::log(r));
            lv.push_back(std::log(sup));
        }
    }
    ensure(lr.size() >= 2, "local_exponent_fit: field vanishes on the sampled circles");

    const double n = static_cast<double>(lr.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) {
        sx += lr[t];
        sy += lv[t];
        sxx += lr[t] * lr[t];
        sxy += lr[t] * lv[t];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace optpart
