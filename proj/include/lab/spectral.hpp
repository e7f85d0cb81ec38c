#pragma once

#include <complex>
#include <vector>

#include "lab/evolve.hpp"
#include "lab/spacetime.hpp"

namespace lab {

/// Discretized stationary family P(sigma) = P0 + sigma P1 + sigma^2 P2 per
/// mode, obtained from the time-domain operator by d_t -> -i sigma.  Dense
/// row-major n x n complex blocks; boundary rows use the same one-sided
/// collar stencils as the evolution.
struct OperatorFamily {
    Grid grid;
    int ell = 0;
    std::vector<cdouble> P0, P1, P2;  // n*n each
    std::vector<double> A;            // P2 = -diag(A), kept for checks

    int n() const { return grid.n; }
    /// Dense P(sigma).
    std::vector<cdouble> at(cdouble sigma) const;
    /// d/dsigma P(sigma) = P1 + 2 sigma P2.
    std::vector<cdouble> dat(cdouble sigma) const;
    void apply(cdouble sigma, std::span<const cdouble> x, std::span<cdouble> y) const;
};

OperatorFamily assemble_family(const Slicing& slicing, Grid grid, int ell);

struct Resonance {
    cdouble sigma;
    double collar_mass = 0.0;    // |phi|^2 fraction in the outflow collars
    double interior_mass = 0.0;  // fraction below the inner horizon
    int rank = 1;                // cluster multiplicity unless contour-counted
    std::vector<cdouble> mode;   // unit discrete L2
    bool deflated = false;
};

struct ScanWindow {
    double re_lo = -1.0, re_hi = 1.0;
    double im_lo = -0.3, im_hi = 0.1;
    double collar_deflation = 0.9;
};

/// Radial landmarks used for mode-mass bookkeeping.
struct MassRegions {
    double collar_inner_hi = 0.0;  // nodes below this count as inner collar
    double collar_outer_lo = 0.0;  // nodes above this count as outer collar
    double inner_horizon = 0.0;
    double exterior_lo = 0.0, exterior_hi = 0.0;

    static MassRegions from(const HorizonStructure& h, double delta);
};

/// Companion linearization of the quadratic family solved densely (LAPACK),
/// restricted to the window; modes with collar mass above the deflation
/// threshold are tagged and excluded from the returned list.
std::vector<Resonance> resonance_scan(const OperatorFamily& fam, const ScanWindow& win,
                                      const MassRegions& regions,
                                      std::vector<Resonance>* deflated = nullptr);

struct ZeroModeReport {
    cdouble sigma;
    std::vector<cdouble> mode;      // right eigenvector, unit L2
    std::vector<cdouble> dual;      // left null vector of P(sigma)
    double exterior_flatness = 0.0; // max |phi - mean| / |mean| on the exterior
    cdouble simple_pairing;         // <dP(sigma) phi, psi>, nonzero iff simple
    double dual_roughness = 0.0;    // discrete second-difference norm of psi
};

/// Structure of the zero-frequency resonance: constancy on the exterior,
/// dual state, simpleness certificate.
ZeroModeReport zero_mode_structure(const OperatorFamily& fam, cdouble sigma_guess,
                                   const MassRegions& regions);

/// Trace contour integral (1/2 pi i) tr oint P^{-1} P' dsigma, rounded to the
/// nearest integer; throws if farther than 0.05 from an integer.
int pole_rank(const OperatorFamily& fam, cdouble center, double radius,
              int quad_nodes = 64);

struct PerturbationResult {
    cdouble sigma_base;               // refined unperturbed resonance
    std::vector<cdouble> eps;         // perturbation strengths
    std::vector<cdouble> sigma;       // tracked resonance per eps
    cdouble slope_formula;            // -<R phi, psi> / <P'(sigma) phi, psi>
    cdouble slope_fd;                 // Richardson finite-difference slope
    double quad_fit_residual = 0.0;   // residual of the quadratic-in-eps fit
};

/// First-order perturbation of a simple resonance by a multiplication
/// operator supported in (r_lo, r_hi).  eps may be complex.
PerturbationResult perturb_resonance(const OperatorFamily& fam, cdouble sigma0,
                                     double bump_center, double bump_width,
                                     const std::vector<cdouble>& eps_list);

/// Newton refinement of an isolated nonlinear eigenvalue from a guess;
/// returns (sigma, right vector, left vector).
struct RefinedMode {
    cdouble sigma;
    std::vector<cdouble> right, left;
};
RefinedMode refine_mode(const OperatorFamily& fam,
                        const std::vector<cdouble>& extra_potential, cdouble eps,
                        cdouble sigma_guess, int max_iter = 40, double tol = 1e-12);

}  // namespace lab
