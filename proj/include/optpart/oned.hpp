#pragma once
#include <optional>

namespace optpart {

// Value of the k-th interval partition curve at weight r: k+1 subintervals
// alternate between an r-weighted and an unweighted first eigenvalue, and the
// lengths that equalize all terms give the infimum in closed form.
double c_k1_closed(double r, int k, double L);

// Same infimum found numerically: coarse exhaustive scan over breakpoint
// placements followed by cyclic golden-section refinement of each breakpoint.
double c_k1_bruteforce(double r, int k, double L, int grid_n);

// If some alternating concatenation of half-periods pi/sqrt(lambda) and
// pi/sqrt(mu) fills [0, L] within tol, returns the number of nodal intervals
// (both starting signs are tried, counts up to 64); otherwise nullopt.
std::optional<int> fucik_1d_membership(double lambda, double mu, double L, double tol);

}  // namespace optpart
