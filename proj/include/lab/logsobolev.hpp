#pragma once

#include <string>
#include <vector>

#include "lab/evolve.hpp"
#include "lab/util.hpp"

namespace lab {

/// Norm descriptor: Fourier weight <xi>^s <log<xi>>^l on a tapered window,
/// with boundary weight exponents (wr, wj) applied through x = exp(-t).
struct NormSpec {
    double s = 0.0;   // regularity
    double l = 0.0;   // log-regularity
    double wr = 0.0;  // weight
    double wj = 0.0;  // log-weight
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::string id;

    std::string label() const;
};

/// Smoothed version of min(x, 1/2): identity on [0, 1/4], constant 1/2 from
/// 1/2 on, monotone quintic bridge in between.
double xtilde(double x);

/// Scalar factor realizing the (wr, wj) weights at time t through x = e^{-t}.
double weight_factor(const NormSpec& spec, double t);

/// Windowed log-Sobolev norm of the field values sampled on [i0, i0+len) of
/// a uniform grid with spacing h.  Uses the plateau taper and a direct DFT;
/// normalization is fixed by Parseval against sum |taper*u|^2 h.
double log_sobolev_norm(std::span<const cdouble> u, double h, const NormSpec& spec,
                        double t = 0.0);

/// Norm of a window extracted from a full field.
double windowed_norm(std::span<const cdouble> field, const Grid& grid,
                     const NormSpec& spec, double t = 0.0);

/// L-infinity embedding constant for H^{1/2 + (1/2+eps) log}:
/// C(eps) = sqrt( (1/2pi) Int <xi>^{-1} <log<xi>>^{-1-2 eps} dxi ).
/// Throws for eps <= 0 (the integral diverges).
double embedding_constant(double eps, double quad_tol = 1e-10);

struct InterpolationReport {
    struct Row {
        double alpha;
        double empirical_c;  // sup of ratio over the grid
        double bound;        // AM-GM style bound it must not exceed
        bool ok;
    };
    std::vector<Row> rows;
    // part (2): decomposition sup-bounds for the two cutoff symbols
    double sup_b1 = 0.0, sup_b2 = 0.0;
    double bound_b1 = 0.0, bound_b2 = 0.0;
    double max_decomp_error = 0.0;  // identity residual of the splitting
    bool all_ok = false;
};

/// Grid check of the pointwise interpolation inequalities for the symbol
/// (X^{1-alpha} P^alpha / (v X + w P))^l on X, P >= log 2.
InterpolationReport check_interpolation_inequalities(double l, double v, double w,
                                                     double grid_max = 1e6,
                                                     int grid_points = 160);

struct NormSeries {
    NormSpec spec;
    std::vector<double> t;
    std::vector<double> value;       // full-resolution norm
    std::vector<double> value_half;  // Richardson companion (every other node)
};

/// Time series of windowed norms near the inner horizon, computed from
/// snapshots; each spec gets a full- and half-resolution series.
std::vector<NormSeries> horizon_regularity_sweep(const EvolveResult& run,
                                                 const Grid& grid,
                                                 const std::vector<NormSpec>& specs);

/// Default spec table used by the norms subcommand and the acceptance suite.
std::vector<NormSpec> default_norm_specs(double window_lo, double window_hi,
                                         double eps = 0.1);

}  // namespace lab
