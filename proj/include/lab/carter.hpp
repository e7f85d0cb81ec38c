#pragma once

#include <complex>
#include <vector>

#include "lab/jets.hpp"
#include "lab/spacetime.hpp"

namespace lab {

/// Multi-index over (t*, r, theta, phi*).
struct DerivIndex {
    int kt = 0, kr = 0, kth = 0, kph = 0;
    int total() const { return kt + kr + kth + kph; }
};

/// Closed-form witness: finite sum of c t^p r^q cos^u(th) sin^v(th) e^{i m ph},
/// with exact derivatives to total order 4 (and beyond).
class TestFunction {
  public:
    struct Term {
        cdouble coef;
        int p = 0, q = 0, m = 0;
        // angular factor as a polynomial in (cos, sin): exponents -> coef
        std::vector<std::pair<std::pair<int, int>, double>> ang;
    };

    void add_term(cdouble coef, int p, int q, int u, int v, int m);
    cdouble deriv(const DerivIndex& d, double t, double r, double th,
                  double ph) const;
    cdouble value(double t, double r, double th, double ph) const {
        return deriv({}, t, r, th, ph);
    }
    std::complex<long double> value_ld(long double t, long double r, long double th,
                                       long double ph) const;

    static TestFunction random(std::uint64_t seed, int n_terms = 3);

  private:
    std::vector<Term> terms_;
};

/// A second-order operator in the chart (t*, r, theta, phi*): sum of
/// coefficient(r, theta) x derivative terms.  Coefficients are produced by a
/// shared template so the exact-jet path and the plain-value path use the
/// same formulas.
struct OperatorTerm {
    Jet2 coef;          // jet at the evaluation point (exact path)
    long double value;  // plain long-double value (FD path)
    DerivIndex idx;
};

struct KerrChart {
    BlackHoleParams params;     // Kerr family
    HorizonStructure horizons;  // for the shift windows
    Slicing window;             // only W(r) is used

    KerrChart(BlackHoleParams p, HorizonStructure h, Slicing w)
        : params(p), horizons(std::move(h)), window(std::move(w)) {}
    static KerrChart build(const BlackHoleParams& p);
};

/// The two operators of interest at a point, with coefficient jets centered
/// there: rho^2 Box_g and the (modified) Carter operator.
std::vector<OperatorTerm> rho2_box_terms(const KerrChart& chart, double r,
                                         double th);
std::vector<OperatorTerm> carter_terms(const KerrChart& chart, double r, double th);

/// Exact-derivative application of a term list to a witness at a point.
cdouble apply_operator(const std::vector<OperatorTerm>& op, const TestFunction& f,
                       double t, double r, double th, double ph);

/// Carter operator on a witness (axis excluded by margin).
cdouble apply_carter(const KerrChart& chart, const TestFunction& f, double t,
                     double r, double th, double ph);

/// Commutator [rho^2 Box, C] f at a point via exact derivatives; returns the
/// relative residual against the scale of the two orderings.
struct CommutatorSample {
    cdouble ab, ba;
    double residual_rel() const {
        double scale = std::max({std::abs(ab), std::abs(ba), 1e-30});
        return std::abs(ab - ba) / scale;
    }
};
CommutatorSample commutator_once(const KerrChart& chart, const TestFunction& f,
                                 double t, double r, double th, double ph);

/// Max relative commutator residual over seeded witnesses and points.
struct CommutatorReport {
    double max_residual = 0.0;
    int points = 0, seeds = 0;
};
CommutatorReport commutator_residual(const BlackHoleParams& params, int n_seeds,
                                     int n_points, std::uint64_t seed0 = 1);

/// Same composition evaluated with order-8 long-double finite differences in
/// place of every derivative of the witness (step h); cross-validates the
/// exact path.
/// The default step sits where order-8 truncation and long-double roundoff
/// amplification are both below 1e-6 of the operator scale.
CommutatorSample commutator_fd(const KerrChart& chart, const TestFunction& f,
                               double t, double r, double th, double ph,
                               double h = 5e-3);

/// Commutator of rho^2 Box with D_{t*} or D_{phi*} (stationarity and
/// axisymmetry): exact-derivative residual.
double killing_commutator_residual(const KerrChart& chart, const TestFunction& f,
                                   double t, double r, double th, double ph,
                                   bool phi_direction);

struct AngularWitnessReport {
    std::vector<double> eigenvalues;  // sorted ascending
    bool real_spectrum = true;
    double max_dev_from_l_l1 = 0.0;   // a = 0, m = 0 reference
    int count_below_cut = 0;
    double weyl_cut = 0.0;
};

/// Spectrum of the angular part of the Carter operator per azimuthal index m
/// on a theta-grid (flux-conservative, symmetric); gamma = Lambda a^2 / 3.
AngularWitnessReport mode_regularity_witness(const BlackHoleParams& params, int m,
                                             int n_grid = 400, int n_eigs = 24,
                                             double weyl_cut = 1.0e4);

}  // namespace lab
