#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "optpart/check.hpp"

namespace optpart {

enum class GridKind { interval, rectangle, disk_in_rectangle, circle };

const char* to_string(GridKind k);

// Uniform lattice over an interval, an axis-aligned rectangle, a disk inside
// its bounding rectangle, or the periodic circle S^1.
//
// Conventions:
//  - lattice point (i,j) sits at (i*h[0], j*h[1]);
//  - Dirichlet kinds include their boundary ring in the lattice, spacing is
//    h = length/(points-1); the boundary ring is excluded from `domain`;
//  - the circle has no boundary, spacing is h = length/points and index
//    arithmetic wraps;
//  - the disk keeps the rectangle lattice and marks points outside the
//    inscribed disk as out-of-domain (they act as permanent Dirichlet zeros).
struct Grid {
    GridKind kind = GridKind::interval;
    std::array<double, 2> lengths{0.0, 0.0};
    std::array<int, 2> points{0, 1};
    std::array<double, 2> h{0.0, 0.0};
    bool periodic = false;
    int dim = 1;
    std::vector<std::uint8_t> domain;  // admissible points for masks/fields

    int num_points() const { return points[0] * points[1]; }
    int index(int i, int j = 0) const { return j * points[0] + i; }
    std::array<int, 2> coords(int id) const { return {id % points[0], id / points[0]}; }
    double x(int i) const { return i * h[0]; }
    double y(int j) const { return j * h[1]; }
    bool in_domain(int id) const { return domain[static_cast<std::size_t>(id)] != 0; }
    double cell_volume() const { return dim == 1 ? h[0] : h[0] * h[1]; }

    // 4-neighbourhood (2 in one dimension, periodic wrap on the circle).
    // Fills `out` with lattice ids and returns how many were written.
    int neighbors(int id, int out[4]) const;

    std::array<double, 2> center() const;
    // Distance from (cx,cy) to the nearest Dirichlet boundary.
    double inradius_from(double cx, double cy) const;
};

Grid build_grid(GridKind kind, const std::vector<double>& lengths,
                const std::vector<int>& points_per_axis);

// Indicator of a subregion; true only at admissible lattice points.
struct Mask {
    const Grid* grid = nullptr;
    std::vector<std::uint8_t> on;

    bool empty() const;
    int count() const;
    bool operator==(const Mask& other) const { return grid == other.grid && on == other.on; }
};

// Scalar lattice function, extended by zero outside its support.
struct Field {
    const Grid* grid = nullptr;
    std::vector<double> values;
};

Mask make_mask(const Grid& g);
Mask domain_mask(const Grid& g);
// pred receives the lattice point coordinates (x, y); y is 0 in one dimension.
Mask mask_from_predicate(const Grid& g, const std::function<bool(double, double)>& pred);

Field make_field(const Grid& g);
Field field_from_function(const Grid& g, const Mask& support,
                          const std::function<double(double, double)>& f);

// Maximal 4-connected pieces of a mask, ordered by their first lattice index.
std::vector<Mask> connected_components(const Mask& m);

// \int |grad u|^2 by forward differences with Dirichlet zero ghost values
// (no ghosts on the periodic circle).
double dirichlet_energy(const Field& u);

// Pointwise split of the same sum: half of every interior edge term goes to
// each endpoint, ghost edge terms go to their single real endpoint.  The sum
// of the density times cell_volume reproduces dirichlet_energy exactly.
std::vector<double> dirichlet_energy_density(const Field& u);

// \int u^2 (optionally weighted) by the trapezoid rule.
double mass(const Field& u);
double mass(const Field& u, const Field& weight);

// \int u v by the trapezoid rule.
double inner(const Field& u, const Field& v);

// Rayleigh quotient energy/mass; throws on zero mass.
double rayleigh(const Field& u);
double rayleigh(const Field& u, const Field* weight);

}  // namespace optpart
