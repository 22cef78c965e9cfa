#pragma once
#include <string>
#include <vector>

#include "optpart/partition.hpp"

namespace optpart {

// Mass weights applied to the positive and negative part of the composite
// solution (weighted Rayleigh quotients downstream).  Build via set_weights.
struct WeightContext {
    const Grid* grid = nullptr;
    Field pweight;  // multiplies the r-weighted components
    Field qweight;  // multiplies the unweighted components
};

WeightContext set_weights(const Grid& g, const Field& pweight, const Field& qweight);

struct FucikOptions {
    double eigen_tol = 1e-10;
    double balance_tol = 1e-2;    // target relative spread of the weighted eigenvalues
    int max_outer = 400;          // alternation cap per homotopy stage
    int max_balance_moves = 400;  // cap on single-cell interface moves in the polish
    bool warm_start = true;       // chain masks along an r sweep
    int threads = 1;              // >1 traces samples in parallel with cold starts
    const WeightContext* weights = nullptr;
    std::vector<Mask> initial_masks;  // starting guess; skips the early homotopy stages
};

// One sample of the first curve: c = max{r lam1(w1), lam1(w2)} at the best
// partition found, reported as the plane point (lambda, mu) = (c/r, c).
struct FucikPoint {
    double r = 0.0;
    double c = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double balance_gap = 0.0;    // |r lam1 - lam2| / c after polishing
    double pde_residual = 0.0;   // residual_check on u = u1 - u2
    std::vector<double> lambdas; // raw principal eigenvalues of the two parts
    std::vector<Mask> masks;
    std::vector<Field> fields;
    int outer_iterations = 0;
    bool converged = false;
};

struct FucikCurve {
    const Grid* grid = nullptr;
    std::string domain;
    std::vector<FucikPoint> samples;  // sorted by r
};

struct CurveReport {
    bool symmetry_checked = false;
    double symmetry_max_rel = 0.0;  // worst |lambda(r) - mu(1/r)| / mu(1/r)
    bool symmetry_ok = true;
    bool monotone_c = true;         // c non-decreasing in r
    bool above_lambda1 = true;      // c > lam1 of the whole domain, strictly
    double lambda1_domain = 0.0;
    bool asymptote_ok = true;       // gap c - lam1 shrinks as r decreases
    bool nodal_ok = true;           // two nonempty connected nodal masks per sample
    std::vector<std::string> warnings;
    bool pass() const {
        return symmetry_ok && monotone_c && above_lambda1 && asymptote_ok && nodal_ok;
    }
};

// Generalized value with h r-weighted components among k.  The sample is
// certified as a spectrum point only when every interface cell sits between
// exactly one weighted and one unweighted component.
struct GeneralizedValue {
    double r = 0.0;
    double c = 0.0;
    bool certified = false;
    double pde_residual = 0.0;  // only meaningful when certified
    PartitionResult partition;
    std::string note;
};

FucikPoint c_of_r(const Grid& g, double r, const FucikOptions& opts = {});
FucikCurve trace_curve(const Grid& g, const std::vector<double>& r_list,
                       const FucikOptions& opts = {});
CurveReport check_curve_properties(const FucikCurve& curve, double tol);

// Relative discrete residual of -Lap u = lambda u+ - mu u- over interior points.
double residual_check(const Field& u, double lambda, double mu);

GeneralizedValue c_hk(const Grid& g, int h, int k, double r, const FucikOptions& opts = {});

}  // namespace optpart
