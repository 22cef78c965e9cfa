#include "optpart/fucik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace optpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<const Field*> mass_weights(const FucikOptions& opts, int h, int k) {
    std::vector<const Field*> w;
    if (!opts.weights) return w;
    w.reserve(k);
    for (int i = 0; i < k; ++i)
        w.push_back(i < h ? &opts.weights->pweight : &opts.weights->qweight);
    return w;
}

// Exponent schedule approaching the min-max problem.  A warm starting guess
// is already near the balanced configuration, where the low-p stages would
// drag the interface away again, so they are skipped.
std::vector<double> homotopy_stages(bool warm) {
    if (warm) return {32.0};
    return {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
}

PartitionResult run_homotopy(const Grid& g, const std::vector<double>& weights, int h,
                             const FucikOptions& opts, const std::vector<Mask>& start,
                             bool* all_converged) {
    const int k = static_cast<int>(weights.size());
    PartitionOptions popt;
    popt.max_outer = opts.max_outer;
    popt.eigen_tol = opts.eigen_tol;
    popt.component_weights = mass_weights(opts, h, k);

    const std::vector<double> stages = homotopy_stages(!start.empty());
    std::vector<Mask> masks = start;
    PartitionResult res;
    *all_converged = true;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        popt.initial_masks = masks;
        popt.carve_interface = (s + 1 == stages.size());
        res = optimize_partition(g, k, stages[s], weights, popt);
        if (!res.converged) *all_converged = false;
        masks = res.masks;
    }
    return postprocess_connect(res, g, opts.eigen_tol);
}

// weighted eigenvalue of each component under the multiplicative weights a
std::vector<double> weighted_eigs(const std::vector<double>& a, const std::vector<double>& lam) {
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i] * lam[i];
    return w;
}

// Equalization pass: repeatedly grow the component whose weighted eigenvalue
// is largest by one interface cell, shrinking whichever neighbour it touches,
// until the relative spread drops below tol.  Keeps the best state seen in
// case the single-cell granularity makes the spread oscillate.
struct PolishOutcome {
    double gap = kInf;
    int moves = 0;
    bool balanced = false;
};

PolishOutcome polish_balance(const Grid& g, PartitionResult& part,
                             const std::vector<double>& a, int h, const FucikOptions& opts) {
    const int k = static_cast<int>(part.masks.size());
    auto mass_w = mass_weights(opts, h, k);
    auto weight_of = [&](int i) -> const Field* { return mass_w.empty() ? nullptr : mass_w[i]; };

    auto gap_of = [&](const std::vector<double>& wl) {
        const double hi = *std::max_element(wl.begin(), wl.end());
        const double lo = *std::min_element(wl.begin(), wl.end());
        return (hi - lo) / hi;
    };

    std::vector<double> wl = weighted_eigs(a, part.lambdas);
    PolishOutcome out;
    out.gap = gap_of(wl);

    PartitionResult best = part;
    double best_gap = out.gap;
    int nbr[4];

    while (out.gap > opts.balance_tol && out.moves < opts.max_balance_moves) {
        const int grow = static_cast<int>(std::max_element(wl.begin(), wl.end()) - wl.begin());

        // candidate: free domain cell next to the growing mask, preferring the
        // spot where the eigenfunction (hence the normal slope) is largest
        int pick = -1;
        double pick_val = -1.0;
        for (int id = 0; id < g.num_points(); ++id) {
            if (!g.in_domain(id)) continue;
            bool owned = false;
            for (int i = 0; i < k && !owned; ++i) owned = part.masks[i].on[id];
            if (owned) continue;
            const int n = g.neighbors(id, nbr);
            double adj = -1.0;
            for (int t = 0; t < n; ++t)
                if (part.masks[grow].on[nbr[t]])
                    adj = std::max(adj, part.fields[grow].values[nbr[t]]);
            if (adj > pick_val) {
                pick_val = adj;
                pick = id;
            }
        }
        if (pick < 0 || pick_val < 0.0) break;  // nowhere to grow

        part.masks[grow].on[pick] = 1;
        std::vector<int> touched{grow};
        const int n = g.neighbors(pick, nbr);
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < k; ++j)
                if (j != grow && part.masks[j].on[nbr[t]]) {
                    part.masks[j].on[nbr[t]] = 0;
                    if (std::find(touched.begin(), touched.end(), j) == touched.end())
                        touched.push_back(j);
                }

        for (int i : touched) {
            EigenResult er = principal_eigenpair(g, part.masks[i], opts.eigen_tol, weight_of(i),
                                                 &part.fields[i]);
            part.lambdas[i] = er.lambda;
            part.fields[i] = std::move(er.eigenfunction);
        }
        wl = weighted_eigs(a, part.lambdas);
        out.gap = gap_of(wl);
        ++out.moves;
        if (out.gap < best_gap) {
            best_gap = out.gap;
            best = part;
        }
    }
    if (best_gap < out.gap) {
        part = std::move(best);
        out.gap = best_gap;
    }
    out.balanced = out.gap <= opts.balance_tol;
    if (out.moves > 0)
        part.events.push_back("balance polish: " + std::to_string(out.moves) + " interface moves");
    return out;
}

// Per-component scale that matches values one cell away from the separating
// walls, so the glued composite has continuous slope across each wall.
std::vector<double> wall_scales(const Grid& g, const std::vector<Mask>& masks,
                                const std::vector<Field>& fields) {
    const int k = static_cast<int>(masks.size());
    std::vector<int> owner(g.num_points(), -1);
    for (int i = 0; i < k; ++i)
        for (int id = 0; id < g.num_points(); ++id)
            if (masks[i].on[id]) owner[id] = i;

    std::vector<double> sum(k, 0.0);
    std::vector<int> cnt(k, 0);
    int nbr[4];
    for (int id = 0; id < g.num_points(); ++id) {
        if (!g.in_domain(id) || owner[id] >= 0) continue;
        // free cell: a wall if it touches at least two distinct components
        const int n = g.neighbors(id, nbr);
        int seen[4], nseen = 0;
        for (int t = 0; t < n; ++t) {
            const int o = owner[nbr[t]];
            if (o < 0) continue;
            bool dup = false;
            for (int s = 0; s < nseen; ++s) dup = dup || seen[s] == o;
            if (!dup) seen[nseen++] = o;
        }
        if (nseen < 2) continue;
        for (int t = 0; t < n; ++t) {
            const int o = owner[nbr[t]];
            if (o < 0) continue;
            sum[o] += fields[o].values[nbr[t]];
            cnt[o] += 1;
        }
    }
    std::vector<double> scale(k, 1.0);
    for (int i = 0; i < k; ++i)
        if (cnt[i] > 0 && sum[i] > 0.0) scale[i] = sum[i] / cnt[i];
    return scale;
}

Field composite_solution(const Grid& g, const std::vector<Mask>& masks,
                         const std::vector<Field>& fields, int h) {
    const auto scale = wall_scales(g, masks, fields);
    Field u = make_field(g);
    for (int i = 0; i < static_cast<int>(masks.size()); ++i) {
        const double s = (i < h ? 1.0 : -1.0) / scale[i];
        for (int id = 0; id < g.num_points(); ++id) u.values[id] += s * fields[i].values[id];
    }
    return u;
}

}  // namespace

WeightContext set_weights(const Grid& g, const Field& pweight, const Field& qweight) {
    ensure(pweight.grid == &g && qweight.grid == &g, "set_weights: weights on another grid");
    for (int id = 0; id < g.num_points(); ++id) {
        if (!g.in_domain(id)) continue;
        ensure(pweight.values[id] > 0.0, "set_weights: pweight must be strictly positive");
        ensure(qweight.values[id] > 0.0, "set_weights: qweight must be strictly positive");
    }
    WeightContext ctx;
    ctx.grid = &g;
    ctx.pweight = pweight;
    ctx.qweight = qweight;
    return ctx;
}

FucikPoint c_of_r(const Grid& g, double r, const FucikOptions& opts) {
    ensure(r > 0.0, "c_of_r: slope r must be positive");
    if (opts.weights) ensure(opts.weights->grid == &g, "c_of_r: weight context on another grid");

    const std::vector<double> a{r, 1.0};
    bool stages_ok = true;
    PartitionResult part = run_homotopy(g, a, 1, opts, opts.initial_masks, &stages_ok);
    const PolishOutcome polish = polish_balance(g, part, a, 1, opts);

    FucikPoint pt;
    pt.r = r;
    const auto wl = weighted_eigs(a, part.lambdas);
    pt.c = *std::max_element(wl.begin(), wl.end());
    pt.lambda = pt.c / r;
    pt.mu = pt.c;
    pt.balance_gap = polish.gap;
    pt.lambdas = part.lambdas;
    pt.masks = part.masks;
    pt.fields = part.fields;
    pt.outer_iterations = part.outer_iterations + polish.moves;
    pt.converged = stages_ok && polish.balanced;

    const Field u = composite_solution(g, part.masks, part.fields, 1);
    pt.pde_residual = residual_check(u, part.lambdas[0], part.lambdas[1]);
    return pt;
}

FucikCurve trace_curve(const Grid& g, const std::vector<double>& r_list, const FucikOptions& opts) {
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        ensure(r_list[i] > 0.0, "trace_curve: slopes must be positive");
        if (i > 0) ensure(r_list[i] > r_list[i - 1], "trace_curve: slopes must be sorted increasing");
    }
    FucikCurve curve;
    curve.grid = &g;
    curve.samples.resize(r_list.size());

    if (opts.threads > 1 && r_list.size() > 1) {
        // independent cold-started samples, striped across threads
        const int nt = std::min<int>(opts.threads, static_cast<int>(r_list.size()));
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t]() {
                FucikOptions local = opts;
                local.initial_masks.clear();
                for (std::size_t i = t; i < r_list.size(); i += nt)
                    curve.samples[i] = c_of_r(g, r_list[i], local);
            });
        for (auto& th : pool) th.join();
        return curve;
    }

    FucikOptions local = opts;
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        curve.samples[i] = c_of_r(g, r_list[i], local);
        if (opts.warm_start) local.initial_masks = curve.samples[i].masks;
    }
    return curve;
}

CurveReport check_curve_properties(const FucikCurve& curve, double tol) {
    ensure(curve.grid != nullptr, "check_curve_properties: curve without a grid");
    const Grid& g = *curve.grid;
    CurveReport rep;
    rep.lambda1_domain = principal_eigenpair(g, domain_mask(g), 1e-10).lambda;

    const auto& s = curve.samples;
    // (a) reciprocal symmetry and monotonicity of c
    bool found_pair = false;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (std::abs(s[i].r * s[j].r - 1.0) > 1e-9) continue;
            found_pair = true;
            const double rel = std::abs(s[i].lambda - s[j].mu) / s[j].mu;
            rep.symmetry_max_rel = std::max(rep.symmetry_max_rel, rel);
            if (rel > tol) rep.symmetry_ok = false;
        }
    rep.symmetry_checked = found_pair;
    if (!found_pair && s.size() >= 2)
        rep.warnings.push_back("no reciprocal (r, 1/r) pairs present; symmetry check skipped");

    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].c < s[i - 1].c * (1.0 - 1e-12)) rep.monotone_c = false;

    // (b) strictly above the first eigenvalue, with the gap shrinking as r -> 0
    double prev_gap = -kInf;
    for (const auto& pt : s) {
        if (!(pt.c > rep.lambda1_domain)) rep.above_lambda1 = false;
        const double gap = pt.c - rep.lambda1_domain;
        if (gap < prev_gap * (1.0 - 1e-12)) rep.asymptote_ok = false;
        prev_gap = gap;
    }

    // (c) two nonempty connected nodal masks
    for (const auto& pt : s) {
        if (pt.masks.size() != 2) {
            rep.nodal_ok = false;
            continue;
        }
        for (const auto& m : pt.masks)
            if (m.empty() || connected_components(m).size() != 1) rep.nodal_ok = false;
    }
    return rep;
}

double residual_check(const Field& u, double lambda, double mu) {
    ensure(u.grid != nullptr, "residual_check: field without grid");
    ensure(lambda > 0.0 && mu > 0.0, "residual_check: lambda and mu must be positive");
    const Grid& g = *u.grid;

    Mask dom = domain_mask(g);
    LaplaceOperator A(g, dom);
    std::vector<double> x(A.size()), Ax;
    for (int d = 0; d < A.size(); ++d) x[d] = u.values[A.lattice_points()[d]];
    A.apply(x, Ax);

    double num = 0.0, pos = 0.0, neg = 0.0;
    for (int d = 0; d < A.size(); ++d) {
        const double v = x[d];
        const double up = std::max(v, 0.0), un = std::max(-v, 0.0);
        const double res = Ax[d] - (lambda * up - mu * un);
        num += res * res;
        pos += up * up;
        neg += un * un;
    }
    const double den = lambda * std::sqrt(pos) + mu * std::sqrt(neg);
    ensure(den > 0.0, "residual_check: field is identically zero");
    return std::sqrt(num) / den;
}

GeneralizedValue c_hk(const Grid& g, int h, int k, double r, const FucikOptions& opts) {
    ensure(k >= 2, "c_hk: need at least two components");
    ensure(h >= 1 && h <= k, "c_hk: need 1 <= h <= k");
    ensure(r > 0.0, "c_hk: slope r must be positive");
    if (opts.weights) ensure(opts.weights->grid == &g, "c_hk: weight context on another grid");

    std::vector<double> a(k, 1.0);
    for (int i = 0; i < h; ++i) a[i] = r;

    bool stages_ok = true;
    PartitionResult part = run_homotopy(g, a, h, opts, opts.initial_masks, &stages_ok);
    const PolishOutcome polish = polish_balance(g, part, a, h, opts);

    GeneralizedValue out;
    out.r = r;
    const auto wl = weighted_eigs(a, part.lambdas);
    out.c = *std::max_element(wl.begin(), wl.end());

    // certification: every near-interface point must see exactly two
    // components, one weighted and one unweighted
    const std::vector<int> mult = multiplicity_map(part.masks, 1);
    bool ok = true;
    std::string why;
    for (int id = 0; id < g.num_points() && ok; ++id) {
        if (mult[id] < 2) continue;
        if (mult[id] > 2) {
            ok = false;
            why = "interface point of multiplicity " + std::to_string(mult[id]);
            break;
        }
        // identify the two components meeting the radius-1 neighbourhood
        int seen[2] = {-1, -1};
        int nbr[4];
        for (int i = 0; i < k; ++i) {
            bool meets = part.masks[i].on[id] != 0;
            const int n = g.neighbors(id, nbr);
            for (int t = 0; t < n && !meets; ++t) meets = part.masks[i].on[nbr[t]] != 0;
            // diagonal neighbours belong to the radius-1 box as well
            if (!meets && g.dim == 2) {
                const auto ij = g.coords(id);
                for (int dj = -1; dj <= 1 && !meets; dj += 2)
                    for (int di = -1; di <= 1 && !meets; di += 2) {
                        const int ii = ij[0] + di, jj = ij[1] + dj;
                        if (ii < 0 || ii >= g.points[0] || jj < 0 || jj >= g.points[1]) continue;
                        meets = part.masks[i].on[g.index(ii, jj)] != 0;
                    }
            }
            if (meets) {
                if (seen[0] < 0)
                    seen[0] = i;
                else if (seen[1] < 0)
                    seen[1] = i;
            }
        }
        if (seen[1] >= 0) {
            const bool w0 = seen[0] < h, w1 = seen[1] < h;
            if (w0 == w1) {
                ok = false;
                why = "interface between two components of the same weight class";
            }
        }
    }
    if (!stages_ok) {
        ok = false;
        why = "homotopy stage left unconverged";
    }
    if (!polish.balanced && ok) {
        ok = false;
        why = "weighted eigenvalues not equalized within tolerance";
    }

    out.certified = ok;
    if (ok) {
        const Field u = composite_solution(g, part.masks, part.fields, h);
        out.pde_residual = residual_check(u, out.c / r, out.c);
        out.note = "certified: all interfaces have multiplicity two";
    } else {
        out.pde_residual = std::numeric_limits<double>::quiet_NaN();
        out.note = "no Fucik point certified: " + why;
    }
    out.partition = std::move(part);
    return out;
}

}  // namespace optpart
