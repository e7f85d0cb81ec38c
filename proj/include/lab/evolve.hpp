#pragma once

#include <vector>

#include "lab/spacetime.hpp"
#include "lab/util.hpp"

namespace lab {

struct ModeSpec {
    int ell = 0;
    int m = 0;  // diagnostic only; the evolution is axisymmetric per mode
};

enum class OuterBoundary {
    Outflow,    // collar beyond the outermost horizon, one-sided stencils
    Radiating,  // far-field Sommerfeld condition (vacuum tail runs)
};

/// Per-mode wave operator sampled on a uniform grid, in first-order-in-time
/// form.  The second-order equation is
///   A u_tt + 2B u_tr + C u_rr + b1 u_t + c1 u_r + V u = 0,
/// with b1 = B' + 2B/r, c1 = C' + 2C/r, V = l(l+1)/r^2.
class WaveOperator1D {
  public:
    WaveOperator1D(const Slicing& slicing, Grid grid, int ell,
                   OuterBoundary outer = OuterBoundary::Outflow,
                   double ko_eps = 0.01);

    const Grid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    int ell() const { return ell_; }
    double ko_eps() const { return ko_; }
    OuterBoundary outer() const { return outer_; }

    /// First-order reduction in space and time with v = u_r, w = u_t:
    ///   u_t = w,  v_t = w_r,  w_t = -(2B w_r + C v_r + b1 w + c1 v + V u)/A,
    /// dissipation on all three components.  (The reduction keeps the system
    /// strongly hyperbolic where the shift exceeds unity, |B| > 1, which a
    /// direct second-order-form discretization does not.)  Serial and OpenMP
    /// paths produce bitwise-identical results.
    void rhs(const cdouble* u, const cdouble* v, const cdouble* w, cdouble* du,
             cdouble* dv, cdouble* dw) const;
    void rhs_serial(const cdouble* u, const cdouble* v, const cdouble* w, cdouble* du,
                    cdouble* dv, cdouble* dw) const;
    /// v = D1 u with the scheme's own stencils.
    void gradient(const cdouble* u, cdouble* v) const;

    /// Apply the spatial part split by time-derivative count:
    ///   out0 = (C d_rr + c1 d_r + V) u      (no time derivatives)
    ///   out1 = (2B d_r + b1) u              (coefficient of u_t)
    /// The full operator is A u_tt + out1[u_t] + out0[u].
    void apply_spatial0(const cdouble* u, cdouble* out) const;
    void apply_spatial1(const cdouble* u, cdouble* out) const;

    /// Characteristic speeds (B±1)/A at node i.
    std::pair<double, double> char_speeds(int i) const;
    double max_char_speed() const;
    /// Throws (naming the node) unless both ends are pure outflow; the
    /// radiating outer boundary skips the outer check.
    void check_outflow() const;

    const std::vector<double>& A() const { return A_; }
    const std::vector<double>& B() const { return B_; }
    const std::vector<double>& C() const { return C_; }
    const std::vector<double>& b1() const { return b1_; }
    const std::vector<double>& c1() const { return c1_; }
    const std::vector<double>& V() const { return V_; }

  private:
    Grid grid_;
    int ell_ = 0;
    double ko_ = 0.01;
    OuterBoundary outer_ = OuterBoundary::Outflow;
    std::vector<double> A_, B_, C_, b1_, c1_, V_;
};

struct InitialData {
    enum class Type { TimeSymmetric, Ingoing };
    double center = 0.0;
    double width = 0.5;       // support half-width of the bump
    double amplitude = 1.0;
    Type type = Type::TimeSymmetric;

    /// Throws unless the support lies strictly inside (lo, hi).
    void validate_support(double lo, double hi) const;
    double value(double r) const;
    double deriv(double r) const;
};

struct EvolveConfig {
    double T = 100.0;
    double cfl = 0.5;
    double probe_dt = 0.5;
    double snap_dt = 0.0;  // 0 disables snapshots
    std::vector<double> probe_radii;
    double window_lo = 0.0, window_hi = 0.0;      // sup-probe window
    double snap_lo = 0.0, snap_hi = 0.0;          // 0,0 = full domain
    double t0 = 0.0;                              // initial time label
    bool parallel = true;
};

struct ProbeSeries {
    double r = 0.0;          // snapped to the nearest grid node
    std::vector<cdouble> u;
    std::vector<cdouble> w;
};

struct Snapshot {
    double t = 0.0;
    int i0 = 0;  // grid index of the first stored node
    std::vector<cdouble> u, w;
};

struct EvolveResult {
    std::vector<double> times;       // probe sample times
    std::vector<ProbeSeries> probes;
    std::vector<double> sup_u;       // max |u| over the window, per sample
    std::vector<double> sup_w;
    std::vector<Snapshot> snapshots;
    double dt = 0.0;
    long steps = 0;
};

/// Method-of-lines evolution: classical RK4, NaN scan each step.
EvolveResult evolve(const WaveOperator1D& op, const InitialData& data,
                    const EvolveConfig& cfg);

/// As above but starting from explicit fields (linearity / restart tests).
EvolveResult evolve_from(const WaveOperator1D& op, std::vector<cdouble> u0,
                         std::vector<cdouble> w0, const EvolveConfig& cfg);

struct DecayFit {
    std::vector<double> t_mid;     // centers of the sliding windows
    std::vector<double> p_local;   // local power index -dlog|u|/dlog t
    double exponent = 0.0;         // tail fit over [t_lo, t_hi]
    double ci95 = 0.0;
    double residual = 0.0;
    bool envelope_used = false;
    bool spans_decade = false;
};

/// Least-squares power-law fit of |values| against t over [t_lo, t_hi].
/// Series with sign changes/oscillation are fitted on their envelope.
DecayFit fit_decay(std::span<const double> t, std::span<const double> values,
                   double t_lo, double t_hi);

struct LiftedBound {
    std::vector<double> t;
    std::vector<double> bound;   // pointwise upper bound for |u|
    double exponent = 0.0;       // fitted decay rate of the bound
    double max_violation = 0.0;  // max (|u| - bound), <= 0 up to rounding
};

/// Converts decay of t-weighted time derivatives into a sup bound:
/// |u(t)| <= |u(T)| + t^{-1/2} || s u'(s) ||_{L2(t,T)}.
LiftedBound lift_linfty_bound(std::span<const double> t,
                              std::span<const double> u_abs,
                              std::span<const double> du_abs, double fit_lo,
                              double fit_hi);

}  // namespace lab
