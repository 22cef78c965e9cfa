#pragma once
#include <limits>
#include <vector>

#include "optpart/geometry.hpp"

namespace optpart {

// Principal Dirichlet eigenpair of -Laplace on the points of a mask.
// lambda is +infinity for an empty mask (the H^1_0 space is trivial there).
struct EigenResult {
    double lambda = std::numeric_limits<double>::infinity();
    Field eigenfunction;
    int iterations = 0;
    double residual = 0.0;
};

// Five-point (three-point in 1d) stencil of -Laplace restricted to the
// mask-true points; everything outside the mask acts as a Dirichlet zero.
class LaplaceOperator {
  public:
    LaplaceOperator(const Grid& g, const Mask& m);

    int size() const { return static_cast<int>(pts_.size()); }
    const std::vector<int>& lattice_points() const { return pts_; }
    double diagonal() const { return diag_; }
    bool tridiagonal() const { return tridiagonal_; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    // Direct solve of (A x = b) for one-dimensional masks (chains of runs).
    void solve_tridiagonal(const std::vector<double>& b, std::vector<double>& x) const;

    Field embed(const std::vector<double>& x) const;
    std::vector<double> restrict_to(const Field& u) const;

  private:
    const Grid* grid_;
    std::vector<int> pts_;              // lattice ids, ordered (rotated past a gap on the circle)
    std::vector<std::array<int, 4>> nbr_;  // dof indices, -1 when Dirichlet
    std::vector<std::array<double, 4>> w_;
    std::vector<int> nnbr_;
    double diag_ = 0.0;
    bool tridiagonal_ = false;
};

// Smallest eigenpair by inverse power iteration; inner solves use the banded
// factorization in one dimension and diagonally preconditioned conjugate
// gradients otherwise.  `weight` turns the problem into A u = lambda W u with
// W = diag(weight); `warm_start` seeds the iteration (all-ones by default).
// Throws SolverError when the residual fails to reach `tol`.
EigenResult principal_eigenpair(const Grid& g, const Mask& m, double tol = 1e-10,
                                const Field* weight = nullptr,
                                const Field* warm_start = nullptr);

// First Dirichlet eigenvalues of the model shapes.
double interval_lambda1(double len);
double rectangle_lambda1(double a, double b);
double arc_lambda1(double theta);

}  // namespace optpart
