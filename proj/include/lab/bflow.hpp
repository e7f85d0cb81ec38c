#pragma once

#include <array>
#include <vector>

#include "lab/spacetime.hpp"

namespace lab {

/// Point on the compactified phase space of the radial reduction:
/// base (tau = e^{-t}, r), fiber (sb, xi) dual to (t, r), conserved angular
/// parameter eta (total angular momentum magnitude).
struct FlowState {
    double tau = 0.0;
    double r = 0.0;
    double sb = 0.0;
    double xi = 0.0;
    double eta = 0.0;
};

/// Fiber scale: 1/|zeta| for |zeta| >= 4, smooth positive extension below,
/// bounded by 1/2.
double fiber_scale(double sb, double xi, double eta);

class HamiltonFlow {
  public:
    explicit HamiltonFlow(const Slicing& slicing) : slicing_(&slicing) {}

    /// Principal symbol p = -G(zeta, zeta); null covectors give 0, spacelike
    /// covectors positive values.
    double hamiltonian(const FlowState& s) const;
    /// Rescaled Hamilton vector field (fiber_scale * H_p), tangent to tau=0.
    std::array<double, 4> rescaled_rhs(const FlowState& s) const;

    struct Trajectory {
        std::vector<double> param;  // flow parameter
        std::vector<FlowState> state;
        std::vector<double> p;      // conserved along the flow
        double p_drift = 0.0;
    };
    /// Adaptive Dormand-Prince 5(4) integration of the rescaled field.
    /// Throws on step-size collapse (reporting the location); requires the
    /// start to be null to tolerance.
    Trajectory integrate(FlowState start, double T, double tol = 1e-10) const;

    /// Solve p = 0 for xi near a guess at fixed (tau, r, sb, eta).
    double null_xi(const FlowState& s, double xi_guess) const;

    const Slicing& slicing() const { return *slicing_; }

  private:
    const Slicing* slicing_;
};

struct RadialSetReport {
    int horizon_index = 0;
    double r_j = 0.0;
    double kappa_j = 0.0;
    int xi_sign = 0;               // sign of the conormal branch with beta0 > 0
    std::array<double, 4> eigenvalues{};  // linearization of the rescaled flow
    double beta0 = 0.0;            // H_p(rho_hat)/rho_hat at L
    double beta_tilde = 0.0;       // -(H_p tau / tau)/beta0
    double beta_tilde_spread = 0.0;  // max-min over sampled representatives
    double beta_q = 0.0;           // min H_p(rho0)/rho0 over a punctured nbhd
    double beta_q_radius = 0.0;    // neighborhood radius that worked
    bool future_is_beta0_branch = false;  // red-shift horizons: yes
    double tau_eigenvalue = 0.0;   // transversal rate (analytically -2)
};

/// Locates the conormal fixed point over horizon j, linearizes the rescaled
/// flow (central differences with Richardson), extracts the expansion rates
/// and the quadratic-defining-function bound.
RadialSetReport radial_set_linearize(const HamiltonFlow& flow, int j,
                                     int n_samples = 50);

/// Borderline regularity (m-1)/2 + beta_tilde * weight for m = 2.
double threshold_regularity(const RadialSetReport& rep, double weight);

}  // namespace lab
