#pragma once
#include <optional>
#include <string>
#include <vector>

#include "optpart/spectral.hpp"

namespace optpart {

struct PartitionOptions {
    int max_outer = 400;            // cap on alternation steps per seed
    double eigen_tol = 1e-10;
    double objective_tol = 1e-9;    // relative decrease considered "no progress"
    int stable_steps = 3;           // stop after this many no-progress steps
    int smoothing_sweeps = 0;       // Gauss-Seidel sweeps on each field before reassignment
    int max_seeds = 3;              // how many deterministic seed layouts to try
    bool carve_interface = true;    // leave a shared one-cell zero layer between masks
    std::vector<Mask> initial_masks;              // overrides the seed layouts when set
    std::vector<const Field*> component_weights;  // optional mass weight per component
};

struct PartitionResult {
    std::vector<Mask> masks;
    std::vector<Field> fields;      // rescaled eigenfunctions, supports inside the masks
    std::vector<double> lambdas;
    std::vector<double> weights;
    double p = 1.0;
    double objective = 0.0;
    std::vector<double> history;    // accepted objective values, non-increasing
    int outer_iterations = 0;
    bool converged = false;
    std::vector<std::string> events;
};

struct ExtremalityReport {
    std::vector<double> ineq1_max;  // max of (A u_i - lambda_i u_i), should be <= tol
    std::vector<double> ineq2_min;  // min of (A uhat_i - (lambda_i u_i - sum_j lambda_j u_j)), >= -tol
    double tol = 0.0;
    bool pass = false;
};

// Minimize (1/k) sum_i (a_i lambda_1(omega_i))^p over k disjoint masks by
// alternating eigen-solves with winner-takes-all reassignment of the
// rescaled eigenfunctions.  Deterministic: fixed seed layouts, fixed
// tie-breaking, no randomness.
PartitionResult optimize_partition(const Grid& g, int k, double p,
                                   std::vector<double> weights,
                                   const PartitionOptions& opts = {});

// Objective of a given family of disjoint masks (+infinity when a mask is
// empty); throws if the masks overlap.
double evaluate_partition(const std::vector<Mask>& masks, double p,
                          const std::vector<double>& weights, double eigen_tol = 1e-10);

// Winner-takes-all: at every lattice point only the component with the
// largest value keeps it (ties go to the lowest index), the rest are zeroed.
std::vector<Field> segregate(const std::vector<Field>& fields);

// Keep, for every mask, only its connected piece of smallest eigenvalue.
PartitionResult postprocess_connect(const PartitionResult& in, const Grid& g,
                                    double eigen_tol = 1e-10);

// Pointwise residuals of the two differential inequalities satisfied by an
// extremal k-tuple: -Lap u_i <= lambda_i u_i, and for
// uhat_i = u_i - sum_{j!=i} u_j, -Lap uhat_i >= lambda_i u_i - sum_j lambda_j u_j.
ExtremalityReport extremality_check(const Grid& g, const std::vector<Field>& fields,
                                    const std::vector<double>& lambdas, double tol);

// How many masks meet every neighbourhood of each lattice point (Chebyshev
// radius `radius` in cells).  Interface points see 2, junctions 3 or more.
std::vector<int> multiplicity_map(const std::vector<Mask>& masks, int radius);

// Least-squares slope of log(sup_{|x-pt|=r} |V|) against log r over the given
// radii; each circle is sampled on the lattice annulus of width one cell.
double local_exponent_fit(const Field& V, const std::array<double, 2>& pt,
                          const std::vector<double>& radii);

}  // namespace optpart
