#include "optpart/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace optpart {

const char* to_string(GridKind k) {
    switch (k) {
        case GridKind::interval: return "interval";
        case GridKind::rectangle: return "rectangle";
        case GridKind::disk_in_rectangle: return "disk";
        case GridKind::circle: return "circle";
    }
    return "?";
}

int Grid::neighbors(int id, int out[4]) const {
    const int nx = points[0];
    const int i = id % nx, j = id / nx;
    int n = 0;
    if (periodic) {
        out[n++] = index(i == 0 ? nx - 1 : i - 1);
        out[n++] = index(i == nx - 1 ? 0 : i + 1);
        return n;
    }
    if (i > 0) out[n++] = index(i - 1, j);
    if (i < nx - 1) out[n++] = index(i + 1, j);
    if (dim == 2) {
        if (j > 0) out[n++] = index(i, j - 1);
        if (j < points[1] - 1) out[n++] = index(i, j + 1);
    }
    return n;
}

std::array<double, 2> Grid::center() const {
    return {lengths[0] / 2.0, dim == 2 ? lengths[1] / 2.0 : 0.0};
}

double Grid::inradius_from(double cx, double cy) const {
    switch (kind) {
        case GridKind::interval:
            return std::min(cx, lengths[0] - cx);
        case GridKind::rectangle:
            return std::min(std::min(cx, lengths[0] - cx), std::min(cy, lengths[1] - cy));
        case GridKind::disk_in_rectangle: {
            const double R = std::min(lengths[0], lengths[1]) / 2.0;
            const auto c = center();
            return R - std::hypot(cx - c[0], cy - c[1]);
        }
        case GridKind::circle:
            return lengths[0] / 2.0;  // no boundary; half circumference
    }
    return 0.0;
}

Grid build_grid(GridKind kind, const std::vector<double>& lengths,
                const std::vector<int>& points_per_axis) {
    Grid g;
    g.kind = kind;
    g.dim = (kind == GridKind::rectangle || kind == GridKind::disk_in_rectangle) ? 2 : 1;
    g.periodic = (kind == GridKind::circle);

    ensure(static_cast<int>(lengths.size()) >= g.dim, "build_grid: missing lengths");
    ensure(static_cast<int>(points_per_axis.size()) >= g.dim, "build_grid: missing points");
    for (int a = 0; a < g.dim; ++a) {
        ensure(lengths[a] > 0.0, "build_grid: lengths must be positive");
        ensure(points_per_axis[a] >= 3, "build_grid: need at least 3 points per axis");
        g.lengths[a] = lengths[a];
        g.points[a] = points_per_axis[a];
        g.h[a] = g.periodic ? lengths[a] / points_per_axis[a]
                            : lengths[a] / (points_per_axis[a] - 1);
    }
    if (g.dim == 1) g.points[1] = 1;

    g.domain.assign(g.num_points(), 0);
    const int nx = g.points[0], ny = g.points[1];
    const auto c = g.center();
    const double R = std::min(g.lengths[0], g.lengths[1]) / 2.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            bool inside = true;
            if (!g.periodic) {
                if (i == 0 || i == nx - 1) inside = false;
                if (g.dim == 2 && (j == 0 || j == ny - 1)) inside = false;
            }
            if (kind == GridKind::disk_in_rectangle && inside) {
                const double dx = g.x(i) - c[0], dy = g.y(j) - c[1];
                inside = dx * dx + dy * dy < R * R;
            }
            g.domain[g.index(i, j)] = inside ? 1 : 0;
        }
    }
    return g;
}

bool Mask::empty() const {
    return std::find(on.begin(), on.end(), std::uint8_t{1}) == on.end();
}

int Mask::count() const {
    return static_cast<int>(std::count(on.begin(), on.end(), std::uint8_t{1}));
}

Mask make_mask(const Grid& g) { return Mask{&g, std::vector<std::uint8_t>(g.num_points(), 0)}; }

Mask domain_mask(const Grid& g) { return Mask{&g, g.domain}; }

Mask mask_from_predicate(const Grid& g, const std::function<bool(double, double)>& pred) {
    Mask m = make_mask(g);
    for (int id = 0; id < g.num_points(); ++id) {
        if (!g.in_domain(id)) continue;
        const auto ij = g.coords(id);
        if (pred(g.x(ij[0]), g.dim == 2 ? g.y(ij[1]) : 0.0)) m.on[id] = 1;
    }
    return m;
}

Field make_field(const Grid& g) { return Field{&g, std::vector<double>(g.num_points(), 0.0)}; }

Field field_from_function(const Grid& g, const Mask& support,
                          const std::function<double(double, double)>& f) {
    ensure(support.grid == &g, "field_from_function: mask belongs to another grid");
    Field u = make_field(g);
    for (int id = 0; id < g.num_points(); ++id) {
        if (!support.on[id]) continue;
        const auto ij = g.coords(id);
        u.values[id] = f(g.x(ij[0]), g.dim == 2 ? g.y(ij[1]) : 0.0);
    }
    return u;
}

std::vector<Mask> connected_components(const Mask& m) {
    ensure(m.grid != nullptr, "connected_components: mask without grid");
    const Grid& g = *m.grid;
    std::vector<std::uint8_t> seen(m.on.size(), 0);
    std::vector<Mask> comps;
    int nbr[4];
    for (int start = 0; start < g.num_points(); ++start) {
        if (!m.on[start] || seen[start]) continue;
        Mask comp = make_mask(g);
        std::queue<int> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const int id = q.front();
            q.pop();
            comp.on[id] = 1;
            const int n = g.neighbors(id, nbr);
            for (int t = 0; t < n; ++t) {
                const int v = nbr[t];
                if (m.on[v] && !seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

double dirichlet_energy(const Field& u) {
    ensure(u.grid != nullptr, "dirichlet_energy: field without grid");
    const Grid& g = *u.grid;
    const int nx = g.points[0], ny = g.points[1];
    const std::vector<double>& v = u.values;
    double acc = 0.0;
    if (g.dim == 1) {
        const double ih2 = 1.0 / (g.h[0] * g.h[0]);
        if (g.periodic) {
            for (int i = 0; i < nx; ++i) {
                const double d = v[(i + 1) % nx] - v[i];
                acc += d * d * ih2;
            }
        } else {
            double prev = 0.0;  // ghost value left of the lattice
            for (int i = 0; i < nx; ++i) {
                const double d = v[i] - prev;
                acc += d * d * ih2;
                prev = v[i];
            }
            acc += prev * prev * ih2;  // last point to the right ghost
        }
        return acc * g.h[0];
    }
    const double ihx2 = 1.0 / (g.h[0] * g.h[0]);
    const double ihy2 = 1.0 / (g.h[1] * g.h[1]);
    for (int j = 0; j < ny; ++j) {
        double prev = 0.0;
        for (int i = 0; i < nx; ++i) {
            const double d = v[g.index(i, j)] - prev;
            acc += d * d * ihx2;
            prev = v[g.index(i, j)];
        }
        acc += prev * prev * ihx2;
    }
    for (int i = 0; i < nx; ++i) {
        double prev = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double d = v[g.index(i, j)] - prev;
            acc += d * d * ihy2;
            prev = v[g.index(i, j)];
        }
        acc += prev * prev * ihy2;
    }
    return acc * g.h[0] * g.h[1];
}

std::vector<double> dirichlet_energy_density(const Field& u) {
    ensure(u.grid != nullptr, "dirichlet_energy_density: field without grid");
    const Grid& g = *u.grid;
    const int nx = g.points[0], ny = g.points[1];
    const std::vector<double>& v = u.values;
    std::vector<double> dens(g.num_points(), 0.0);

    auto add_edge = [&](int a, int b, double invh2) {
        const double d = v[a] - v[b];
        const double e = d * d * invh2;
        dens[a] += 0.5 * e;
        dens[b] += 0.5 * e;
    };
    auto add_ghost = [&](int a, double invh2) {
        dens[a] += v[a] * v[a] * invh2;
    };

    const double ihx2 = 1.0 / (g.h[0] * g.h[0]);
    if (g.dim == 1) {
        if (g.periodic) {
            for (int i = 0; i < nx; ++i) add_edge(i, (i + 1) % nx, ihx2);
        } else {
            add_ghost(0, ihx2);
            for (int i = 0; i + 1 < nx; ++i) add_edge(i, i + 1, ihx2);
            add_ghost(nx - 1, ihx2);
        }
        return dens;
    }
    const double ihy2 = 1.0 / (g.h[1] * g.h[1]);
    for (int j = 0; j < ny; ++j) {
        add_ghost(g.index(0, j), ihx2);
        for (int i = 0; i + 1 < nx; ++i) add_edge(g.index(i, j), g.index(i + 1, j), ihx2);
        add_ghost(g.index(nx - 1, j), ihx2);
    }
    for (int i = 0; i < nx; ++i) {
        add_ghost(g.index(i, 0), ihy2);
        for (int j = 0; j + 1 < ny; ++j) add_edge(g.index(i, j), g.index(i, j + 1), ihy2);
        add_ghost(g.index(i, ny - 1), ihy2);
    }
    return dens;
}

namespace {

// Trapezoid weight of a lattice point (1 inside, 1/2 on faces, 1/4 at corners).
double trapezoid_weight(const Grid& g, int id) {
    if (g.periodic) return 1.0;
    const auto ij = g.coords(id);
    double w = (ij[0] == 0 || ij[0] == g.points[0] - 1) ? 0.5 : 1.0;
    if (g.dim == 2 && (ij[1] == 0 || ij[1] == g.points[1] - 1)) w *= 0.5;
    return w;
}

}  // namespace

double mass(const Field& u) {
    ensure(u.grid != nullptr, "mass: field without grid");
    const Grid& g = *u.grid;
    double acc = 0.0;
    for (int id = 0; id < g.num_points(); ++id) acc += trapezoid_weight(g, id) * u.values[id] * u.values[id];
    return acc * g.cell_volume();
}

double mass(const Field& u, const Field& weight) {
    ensure(u.grid != nullptr && weight.grid == u.grid, "mass: weight on another grid");
    const Grid& g = *u.grid;
    for (int id = 0; id < g.num_points(); ++id)
        if (g.in_domain(id))
            ensure(weight.values[id] > 0.0, "mass: weight must be strictly positive");
    double acc = 0.0;
    for (int id = 0; id < g.num_points(); ++id)
        acc += trapezoid_weight(g, id) * weight.values[id] * u.values[id] * u.values[id];
    return acc * g.cell_volume();
}

double inner(const Field& u, const Field& v) {
    ensure(u.grid != nullptr && v.grid == u.grid, "inner: fields on different grids");
    const Grid& g = *u.grid;
    double acc = 0.0;
    for (int id = 0; id < g.num_points(); ++id)
        acc += trapezoid_weight(g, id) * u.values[id] * v.values[id];
    return acc * g.cell_volume();
}

double rayleigh(const Field& u) { return rayleigh(u, nullptr); }

double rayleigh(const Field& u, const Field* weight) {
    const double m = weight ? mass(u, *weight) : mass(u);
    ensure(m > 0.0, "rayleigh: zero mass");
    return dirichlet_energy(u) / m;
}

}  // namespace optpart
