#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "optpart/spectral.hpp"

namespace optpart {

// ---- partition exponents on the circle ----

// Literature values: beta(2, N) = N and beta(k, 2) = k.  Anything else is
// genuinely open and reported as nullopt rather than extrapolated.
std::optional<double> beta_known(int k, int N);

// Minimum of (2/k) * sum_i pi/theta_i over arc decompositions of the circle
// (sum theta_i = 2*pi).  Runs a projected-gradient descent from an uneven
// n-cell start and checks it against the equal-arc closed form before
// returning the latter.
double beta_circle_opt(int k, int n);

struct BetaReport {
    std::vector<double> values;  // beta(2,2) .. beta(k_max,2)
    bool nondecreasing = true;
    bool strict_above_two = true;  // beta(3,2) > beta(2,2) when applicable
    bool pass = false;
};

// Validation logic on an explicit table, so corrupted tables are testable.
BetaReport beta_table_check(const std::vector<double>& values);
BetaReport beta_monotone_check(int k_max);

// ---- monotonicity functionals ----

enum class PhiVariant { acf_kernel, disjoint_k, competition };

struct PhiSeries {
    PhiVariant variant = PhiVariant::disjoint_k;
    std::array<double, 2> center{0.0, 0.0};
    double exponent = 0.0;  // beta (segregated variants) or hprime (competition)
    int components = 0;
    std::vector<double> radii;   // snapped to half-integer multiples of h
    std::vector<double> values;  // Phi(r), nonnegative
};

PhiSeries phi_disjoint(const std::vector<Field>& fields, const std::array<double, 2>& x0,
                       const std::vector<double>& radii, double beta);

// Kernel-weighted two-phase functional; in the plane the kernel is 1 and the
// values coincide with phi_disjoint at beta = 2.
PhiSeries phi_acf(const Field& w1, const Field& w2, const std::array<double, 2>& x0,
                  const std::vector<double>& radii);

struct MonotoneReport {
    bool monotone = true;    // Phi(r_{j+1}) >= Phi(r_j) * (1 - slack) past from_index
    bool constant = false;   // total relative variation below slack
    double worst_drop = 0.0; // largest relative decrease seen
    int from_index = 0;
    double slack = 0.0;
};

// from_index < 0 selects the default: one third of the series.
MonotoneReport check_monotone(const PhiSeries& series, double slack, int from_index = -1);

// ---- competition-diffusion system ----

struct CompetitionState {
    const Grid* grid = nullptr;
    std::vector<Field> fields;          // one nonnegative component per row of a
    std::vector<std::vector<double>> a; // coupling matrix, off-diagonal >= 0
    double residual = 0.0;              // relative residual of the full nonlinear system
    int sweeps = 0;
    bool converged = false;
};

// Gauss-Seidel outer iteration: each component solves its linear screened
// problem against the frozen others, components in index order.  Boundary
// data enters as Dirichlet values read off the non-domain lattice points.
CompetitionState solve_competition(const Grid& g, const std::vector<std::vector<double>>& a,
                                   const std::vector<Field>& boundary_data, double tol);

PhiSeries phi_competition(const CompetitionState& state, int h, double hprime,
                          const std::array<double, 2>& x0, const std::vector<double>& radii);

struct GrowthReport {
    bool degenerate = false;
    double exponent = 0.0;   // fitted log-log slope of the product of factors
    double reference = 0.0;  // k^2 guide line in the plane
    std::string note;
};

// Advisory only: finite boxes cannot see asymptotics, so nothing is asserted.
GrowthReport growth_diagnostic(const CompetitionState& state, const std::array<double, 2>& x0,
                               const std::vector<double>& radii);

}  // namespace optpart
