#pragma once

#include <optional>
#include <vector>

#include "lab/util.hpp"

namespace lab {

enum class Family { RN, Kerr };

/// Physical black-hole parameters. `lambda` is the cosmological constant,
/// `spin` the angular momentum (Kerr only).
struct BlackHoleParams {
    double mass = 1.0;
    double charge = 0.0;
    double spin = 0.0;
    double lambda = 0.0;
    Family family = Family::RN;

    /// Throws std::invalid_argument for extremal or unphysical parameters.
    void validate() const;
};

/// Radial profile value: mu for the RN family, mu-tilde for Kerr.
double eval_mu(const BlackHoleParams& p, double r);
double eval_mu_prime(const BlackHoleParams& p, double r);
double eval_mu_second(const BlackHoleParams& p, double r);

/// Parameters of the inner modification (artificial simple root at r0) and
/// the outer de Sitter gluing.
struct ExtensionParams {
    double r0 = 0.0;       // artificial root
    double rQm = 0.0;      // inner edge of the admissible-perturbation annulus
    double rQp = 0.0;      // blend join; profile equals the base one beyond it
    double delta = 0.0;    // collar width
    double rmp = 0.0;      // gluing onset radius (beyond the trapped set)
    double kappa0 = 1.0;   // artificial surface gravity
    bool quintic_blend = false;  // upgrade the blend join to C^3

    static ExtensionParams defaults_for(double r1, double r2);
    void validate(double r1) const;
};

struct HorizonStructure {
    std::vector<double> radii;   // sorted ascending
    std::vector<double> kappas;  // surface gravities, > 0 for simple roots
    std::vector<int> signs;      // -sgn mu'(r_j)

    int count() const { return static_cast<int>(radii.size()); }
};

/// All positive simple roots of mu (or of the extended profile when `ext`
/// is given), with surface gravities and signs. Throws on (near-)degenerate
/// roots and when the expected root count for the given parameters is absent.
HorizonStructure find_horizons(const BlackHoleParams& p,
                               const ExtensionParams* ext = nullptr);

/// Surface gravity at a simple root: |mu'|/2 (RN) or |mu'|/(2(r^2+a^2)) (Kerr).
double surface_gravity(const BlackHoleParams& p, double rj);

/// Photon-sphere radius of the RN exterior (locates the trapped set).
double photon_sphere_radius(const BlackHoleParams& p);

/// The extended radial profile: Hermite blend creating the artificial root
/// at r0, base profile in [rQp, rmp], cosmological profile glued in beyond
/// rmp through a quintic smoothstep.
class RadialProfile {
  public:
    /// Base (lambda = 0) profile of `p` with extension `ext`. When `glue`
    /// is false the cosmological term is dropped entirely (vacuum profile).
    RadialProfile(const BlackHoleParams& p, const ExtensionParams& ext, bool glue);
    /// Unmodified profile (no artificial root, no gluing).
    explicit RadialProfile(const BlackHoleParams& p);

    double mu(double r) const;
    double dmu(double r) const;
    double d2mu(double r) const;

    bool has_extension() const { return ext_.has_value(); }
    bool glued() const { return glue_; }
    const ExtensionParams& extension() const { return *ext_; }
    const BlackHoleParams& params() const { return params_; }
    bool quintic_blend_used() const { return quintic_used_; }

    /// Sign-change scan for roots on [lo, hi] at the given resolution.
    std::vector<double> scan_roots(double lo, double hi, double step) const;

  private:
    void build_blend();
    double blend_H(double r) const;
    double blend_H_prime(double r) const;
    double blend_H_second(double r) const;
    double blend(double r) const;
    double dblend(double r) const;
    double d2blend(double r) const;

    BlackHoleParams params_;
    BlackHoleParams params_vac_;    // lambda = 0 copy
    BlackHoleParams params_outer_;  // glued-in cosmological profile (spin dropped)
    std::optional<ExtensionParams> ext_;
    bool glue_ = false;
    bool quintic_used_ = false;
};

/// Which sheet the chart uses at each root (the sign of mu*F' there).
enum class SheetConvention {
    Paper,      // s_j = -sgn mu'(r_j) at every root
    Evolution,  // ingoing sheet everywhere except the outermost root
};

/// Stationary chart data: the shift profile W (= mu F' globally), the slice
/// tilt Ftilde', and the induced metric coefficient evaluators
///   A = g^{-1}(dt*, dt*),  B = g^{-1}(dt*, dr),  C = g^{-1}(dr, dr) = -mu.
/// Identity A C - B^2 = -1 holds pointwise.
class Slicing {
  public:
    struct Coeffs {
        double A, B, C;
        double dA, dB, dC;
        double mu, dmu;
        double W;
    };

    Slicing() = default;
    Slicing(RadialProfile profile, HorizonStructure horizons, SheetConvention sheet,
            double domain_lo, double domain_hi);

    Coeffs coeffs(double r) const;
    double W(double r) const;
    double dW(double r) const;
    double Ftilde_prime(double r) const;
    /// Slice-tilt amplitude; piecewise in r so the chart outside the inner
    /// horizon never depends on the artificial-extension details.
    double tilt(double r) const;
    double dtilt(double r) const;
    /// F' = W / mu (integrand of the horizon-penetrating shift).
    double F_prime(double r) const;
    /// F with the log singularities subtracted analytically near each root;
    /// anchored so F = 0 on the outer static plateau.
    double F(double r) const;

    const RadialProfile& profile() const { return profile_; }
    const HorizonStructure& horizons() const { return horizons_; }
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    const std::vector<int>& sheet_signs() const { return sheet_; }

    /// Largest A over a verification grid (diagnostic) and the minimum.
    struct CausalReport {
        double min_A_bands = 0.0;       // over the two horizon bands
        double min_A_global = 0.0;      // over the whole domain
        double worst_r_bands = 0.0;
        double worst_r_global = 0.0;
        double max_det_error = 0.0;     // |A C - B^2 + 1|
        bool min_dr_timelike_ok = true; // -dr timelike with consistent orientation
    };
    CausalReport verify_causal(int n_grid = 4001) const;

  private:
    struct Plateau {
        double lo, hi;  // W identically sheet value here
        int sign;
    };

    RadialProfile profile_;
    HorizonStructure horizons_;
    std::vector<int> sheet_;
    std::vector<Plateau> plateaus_;
    // W transition between plateau k and k+1 over [t_lo, t_hi].
    struct Transition {
        double lo, hi;
        int from, to;
    };
    std::vector<Transition> transitions_;
    double lo_ = 0.0, hi_ = 0.0;
    double c_in_ = 1.0, c_out_ = 1.0;   // tilt amplitudes
    double ct_lo_ = 0.0, ct_hi_ = 0.0;  // tilt transition interval (below r1)
    int taper_N_ = 5;  // smoothstep order for W transitions
};

/// Chart verified with the sign convention of the underlying construction
/// (one sheet per root), band causal checks included. This is the chart the
/// flow diagnostics use; the evolution uses the Evolution sheet.
struct CoordinateMaps {
    Slicing slicing;
    Slicing::CausalReport report;
};

CoordinateMaps build_coordinate_maps(const BlackHoleParams& p,
                                     const ExtensionParams& ext, bool glue = true);

/// Extended metric for time evolution: globally spacelike stationary slices.
struct ExtendedMetric {
    Slicing slicing;
    Slicing::CausalReport report;

    const RadialProfile& profile() const { return slicing.profile(); }
    const HorizonStructure& horizons() const { return slicing.horizons(); }
};

ExtendedMetric build_extended_metric(const BlackHoleParams& p,
                                     const ExtensionParams& ext);

/// Vacuum exterior metric on [r_lo, r_hi] (no inner extension; used by the
/// large-domain tail runs). r_lo must lie inside the event horizon.
ExtendedMetric build_exterior_metric(const BlackHoleParams& p, double r_lo,
                                     double r_hi);

}  // namespace lab
