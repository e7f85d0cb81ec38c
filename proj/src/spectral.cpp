#include "lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace lab {

namespace {

void pin_blas_threads() {
    // Single-threaded BLAS by default for reproducible outputs; the dense
    // eigensolves can be threaded through LAB_BLAS_THREADS when wall-clock
    // matters more than bit-stability.
    static bool done = false;
    if (!done) {
        int t = 1;
        if (const char* env = std::getenv("LAB_BLAS_THREADS")) t = std::atoi(env);
        if (openblas_set_num_threads) openblas_set_num_threads(t > 0 ? t : 1);
        done = true;
    }
}

using lapack_cd = lapack_complex_double;

inline lapack_cd* lp(cdouble* p) { return reinterpret_cast<lapack_cd*>(p); }

// Dense row-major complex solve A X = B (B overwritten with X).
void zsolve(std::vector<cdouble> a, cdouble* b, int n, int nrhs) {
    std::vector<lapack_int> ipiv(n);
    lapack_int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, nrhs, lp(a.data()), n,
                                    ipiv.data(), lp(b), nrhs);
    require(info == 0, "zgesv failed (ill-conditioned solve on contour?)");
}

double l2norm(std::span<const cdouble> v) {
    double a = 0;
    for (auto& z : v) a += std::norm(z);
    return std::sqrt(a);
}

void normalize(std::vector<cdouble>& v) {
    double nn = l2norm(v);
    if (nn > 0)
        for (auto& z : v) z /= nn;
}

cdouble dot(std::span<const cdouble> a, std::span<const cdouble> b) {
    // <a, b> = sum a_i conj(b_i)
    cdouble s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

}  // namespace

OperatorFamily assemble_family(const Slicing& slicing, Grid grid, int ell) {
    OperatorFamily fam;
    fam.grid = grid;
    fam.ell = ell;
    const int n = grid.n;
    fam.P0.assign(std::size_t(n) * n, 0.0);
    fam.P1.assign(std::size_t(n) * n, 0.0);
    fam.P2.assign(std::size_t(n) * n, 0.0);
    fam.A.resize(n);

    const double h = grid.h();
    std::vector<double> B(n), C(n), b1(n), c1(n), V(n);
    for (int i = 0; i < n; ++i) {
        double r = grid.r(i);
        auto k = slicing.coeffs(r);
        require(k.A > 0.0, "assemble_family: slices not spacelike at node " +
                               std::to_string(i));
        fam.A[i] = k.A;
        B[i] = k.B;
        C[i] = k.C;
        b1[i] = k.dB + 2.0 * k.B / r;
        c1[i] = k.dC + 2.0 * k.C / r;
        V[i] = double(ell) * double(ell + 1) / (r * r);
    }

    // derivative stencils matching the evolution's node classes
    auto d1_row = [&](int i, auto&& emit) {
        if (i >= 2 && i <= n - 3) {
            emit(i - 2, 1.0 / (12 * h));
            emit(i - 1, -8.0 / (12 * h));
            emit(i + 1, 8.0 / (12 * h));
            emit(i + 2, -1.0 / (12 * h));
        } else if (i == 0) {
            emit(0, -1.5 / h);
            emit(1, 2.0 / h);
            emit(2, -0.5 / h);
        } else if (i == n - 1) {
            emit(n - 1, 1.5 / h);
            emit(n - 2, -2.0 / h);
            emit(n - 3, 0.5 / h);
        } else {
            emit(i - 1, -0.5 / h);
            emit(i + 1, 0.5 / h);
        }
    };
    auto d2_row = [&](int i, auto&& emit) {
        double ih2 = 1.0 / (h * h);
        if (i >= 2 && i <= n - 3) {
            emit(i - 2, -ih2 / 12);
            emit(i - 1, 16 * ih2 / 12);
            emit(i, -30 * ih2 / 12);
            emit(i + 1, 16 * ih2 / 12);
            emit(i + 2, -ih2 / 12);
        } else if (i == 0) {
            emit(0, 2 * ih2);
            emit(1, -5 * ih2);
            emit(2, 4 * ih2);
            emit(3, -ih2);
        } else if (i == n - 1) {
            emit(n - 1, 2 * ih2);
            emit(n - 2, -5 * ih2);
            emit(n - 3, 4 * ih2);
            emit(n - 4, -ih2);
        } else {
            emit(i - 1, ih2);
            emit(i, -2 * ih2);
            emit(i + 1, ih2);
        }
    };

    for (int i = 0; i < n; ++i) {
        auto row0 = fam.P0.data() + std::size_t(i) * n;
        auto row1 = fam.P1.data() + std::size_t(i) * n;
        // P0 = C d2 + c1 d1 + V
        d2_row(i, [&](int j, double wgt) { row0[j] += C[i] * wgt; });
        d1_row(i, [&](int j, double wgt) { row0[j] += c1[i] * wgt; });
        row0[i] += V[i];
        // P1 = -i (2B d1 + b1)
        d1_row(i, [&](int j, double wgt) {
            row1[j] += cdouble(0, -1) * (2.0 * B[i]) * wgt;
        });
        row1[i] += cdouble(0, -1) * b1[i];
        // P2 = -A
        fam.P2[std::size_t(i) * n + i] = -fam.A[i];
    }
    return fam;
}

std::vector<cdouble> OperatorFamily::at(cdouble sigma) const {
    std::vector<cdouble> m(P0.size());
    cdouble s2 = sigma * sigma;
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = P0[k] + sigma * P1[k] + s2 * P2[k];
    return m;
}

std::vector<cdouble> OperatorFamily::dat(cdouble sigma) const {
    std::vector<cdouble> m(P0.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = P1[k] + 2.0 * sigma * P2[k];
    return m;
}

void OperatorFamily::apply(cdouble sigma, std::span<const cdouble> x,
                           std::span<cdouble> y) const {
    const int nn = n();
    cdouble s2 = sigma * sigma;
    for (int i = 0; i < nn; ++i) {
        cdouble acc = 0;
        const cdouble* r0 = P0.data() + std::size_t(i) * nn;
        const cdouble* r1 = P1.data() + std::size_t(i) * nn;
        for (int j = 0; j < nn; ++j) acc += (r0[j] + sigma * r1[j]) * x[j];
        acc += s2 * P2[std::size_t(i) * nn + i] * x[i];
        y[i] = acc;
    }
}

std::vector<Resonance> resonance_scan(const OperatorFamily& fam, const ScanWindow& win,
                                      const MassRegions& regions,
                                      std::vector<Resonance>* deflated) {
    pin_blas_threads();
    const int n = fam.n();
    const int N = 2 * n;
    // companion form: sigma [x; y] = [[0, I], [-P2^-1 P0, -P2^-1 P1]] [x; y]
    std::vector<cdouble> M(std::size_t(N) * N, 0.0);
    for (int i = 0; i < n; ++i) M[std::size_t(i) * N + n + i] = 1.0;
    for (int i = 0; i < n; ++i) {
        cdouble inv = -1.0 / fam.P2[std::size_t(i) * n + i];
        for (int j = 0; j < n; ++j) {
            M[std::size_t(n + i) * N + j] = inv * fam.P0[std::size_t(i) * n + j];
            M[std::size_t(n + i) * N + n + j] = inv * fam.P1[std::size_t(i) * n + j];
        }
    }
    std::vector<cdouble> evals(N), vr(std::size_t(N) * N);
    lapack_int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'V', N, lp(M.data()), N,
                                    lp(evals.data()), nullptr, N, lp(vr.data()), N);
    require(info == 0, "resonance_scan: zgeev failed");

    const auto& g = fam.grid;
    std::vector<Resonance> out;
    for (int k = 0; k < N; ++k) {
        cdouble s = evals[k];
        if (s.real() < win.re_lo || s.real() > win.re_hi || s.imag() < win.im_lo ||
            s.imag() > win.im_hi)
            continue;
        Resonance res;
        res.sigma = s;
        res.mode.resize(n);
        for (int i = 0; i < n; ++i) res.mode[i] = vr[std::size_t(i) * N + k];
        normalize(res.mode);
        double collar = 0.0, interior = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = g.r(i);
            double m2 = std::norm(res.mode[i]);
            total += m2;
            if (r < regions.collar_inner_hi || r > regions.collar_outer_lo)
                collar += m2;
            if (r < regions.inner_horizon) interior += m2;
        }
        res.collar_mass = collar / total;
        res.interior_mass = interior / total;
        res.deflated = res.collar_mass > win.collar_deflation;
        if (res.deflated) {
            if (deflated) deflated->push_back(std::move(res));
        } else {
            out.push_back(std::move(res));
        }
    }
    // cluster multiplicity as the default rank surrogate
    for (auto& r : out) {
        int mult = 0;
        for (auto& q : out)
            if (std::abs(q.sigma - r.sigma) < 1e-6) ++mult;
        r.rank = mult;
    }
    std::sort(out.begin(), out.end(),
              [](const Resonance& a, const Resonance& b) {
                  return std::abs(a.sigma) < std::abs(b.sigma);
              });
    return out;
}

ZeroModeReport zero_mode_structure(const OperatorFamily& fam, cdouble sigma_guess,
                                   const MassRegions& regions) {
    pin_blas_threads();
    const int n = fam.n();
    ZeroModeReport rep;
    rep.sigma = sigma_guess;
    // inverse iteration on P(sigma) and P(sigma)^H from a flat start
    auto Pm = fam.at(sigma_guess);
    std::vector<cdouble> PH(Pm.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            PH[std::size_t(i) * n + j] = std::conj(Pm[std::size_t(j) * n + i]);
    std::vector<cdouble> phi(n, 1.0), psi(n, 1.0);
    normalize(phi);
    normalize(psi);
    for (int it = 0; it < 8; ++it) {
        zsolve(Pm, phi.data(), n, 1);
        normalize(phi);
        zsolve(PH, psi.data(), n, 1);
        normalize(psi);
    }
    rep.mode = phi;
    rep.dual = psi;
    // exterior flatness
    const auto& g = fam.grid;
    cdouble mean = 0;
    int cnt = 0;
    for (int i = 0; i < n; ++i) {
        double r = g.r(i);
        if (r > regions.exterior_lo && r < regions.exterior_hi) {
            mean += phi[i];
            ++cnt;
        }
    }
    require(cnt > 0, "zero_mode_structure: empty exterior window");
    mean /= double(cnt);
    double dev = 0;
    for (int i = 0; i < n; ++i) {
        double r = g.r(i);
        if (r > regions.exterior_lo && r < regions.exterior_hi)
            dev = std::max(dev, std::abs(phi[i] - mean));
    }
    rep.exterior_flatness = dev / std::abs(mean);
    // pairing <P'(sigma) phi, psi>
    auto dP = fam.dat(sigma_guess);
    std::vector<cdouble> tmp(n, 0.0);
    for (int i = 0; i < n; ++i) {
        cdouble acc = 0;
        for (int j = 0; j < n; ++j) acc += dP[std::size_t(i) * n + j] * phi[j];
        tmp[i] = acc;
    }
    rep.simple_pairing = dot(tmp, psi);
    // second-difference roughness of the dual state
    double rough = 0;
    for (int i = 1; i + 1 < n; ++i)
        rough += std::norm(psi[i - 1] - 2.0 * psi[i] + psi[i + 1]);
    rep.dual_roughness = std::sqrt(rough) / fam.grid.h();
    return rep;
}

int pole_rank(const OperatorFamily& fam, cdouble center, double radius,
              int quad_nodes) {
    pin_blas_threads();
    require(quad_nodes >= 64, "pole_rank: need >= 64 contour nodes");
    const int n = fam.n();
    std::vector<cdouble> traces(quad_nodes);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < quad_nodes; ++k) {
        double th = 2.0 * M_PI * k / quad_nodes;
        cdouble z = center + radius * cdouble(std::cos(th), std::sin(th));
        auto P = fam.at(z);
        auto dP = fam.dat(z);
        // X = P^{-1} dP, then take the trace
        zsolve(std::move(P), dP.data(), n, n);
        cdouble tr = 0;
        for (int i = 0; i < n; ++i) tr += dP[std::size_t(i) * n + i];
        traces[k] = tr * cdouble(0, 1) * radius * cdouble(std::cos(th), std::sin(th));
    }
    cdouble integral = 0;
    for (auto& t : traces) integral += t;  // fixed order: deterministic
    integral *= (2.0 * M_PI / quad_nodes) / (2.0 * M_PI * cdouble(0, 1));
    double rk = integral.real();
    double nearest = std::round(rk);
    if (std::fabs(rk - nearest) > 0.05 || std::fabs(integral.imag()) > 0.05)
        throw std::runtime_error("pole_rank: non-integer contour count " +
                                 std::to_string(rk));
    return static_cast<int>(nearest);
}

RefinedMode refine_mode(const OperatorFamily& fam,
                        const std::vector<cdouble>& extra_potential, cdouble eps,
                        cdouble sigma_guess, int max_iter, double tol) {
    pin_blas_threads();
    const int n = fam.n();
    auto P_at = [&](cdouble s) {
        auto m = fam.at(s);
        if (!extra_potential.empty())
            for (int i = 0; i < n; ++i)
                m[std::size_t(i) * n + i] += eps * extra_potential[i];
        return m;
    };
    RefinedMode rm;
    rm.sigma = sigma_guess;
    rm.right.assign(n, 1.0);
    rm.left.assign(n, 1.0);
    normalize(rm.right);
    normalize(rm.left);
    for (int it = 0; it < max_iter; ++it) {
        auto P = P_at(rm.sigma);
        std::vector<cdouble> PH(P.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                PH[std::size_t(i) * n + j] = std::conj(P[std::size_t(j) * n + i]);
        auto Pcopy = P;
        zsolve(std::move(Pcopy), rm.right.data(), n, 1);
        normalize(rm.right);
        zsolve(std::move(PH), rm.left.data(), n, 1);
        normalize(rm.left);
        // Newton update on sigma: sigma -= <P phi, psi> / <P' phi, psi>
        auto dP = fam.dat(rm.sigma);
        std::vector<cdouble> pf(n, 0.0), df(n, 0.0);
        for (int i = 0; i < n; ++i) {
            cdouble a = 0, b = 0;
            for (int j = 0; j < n; ++j) {
                a += P[std::size_t(i) * n + j] * rm.right[j];
                b += dP[std::size_t(i) * n + j] * rm.right[j];
            }
            pf[i] = a;
            df[i] = b;
        }
        cdouble num = dot(pf, rm.left), den = dot(df, rm.left);
        require(std::abs(den) > 1e-300, "refine_mode: derivative pairing vanished");
        cdouble step = num / den;
        rm.sigma -= step;
        if (std::abs(step) < tol) break;
    }
    return rm;
}

PerturbationResult perturb_resonance(const OperatorFamily& fam, cdouble sigma0,
                                     double bump_center, double bump_width,
                                     const std::vector<cdouble>& eps_list) {
    const int n = fam.n();
    std::vector<cdouble> R(n, 0.0);
    for (int i = 0; i < n; ++i)
        R[i] = bump((fam.grid.r(i) - bump_center) / bump_width);

    // unperturbed states
    auto base = refine_mode(fam, R, 0.0, sigma0);
    PerturbationResult out;
    out.sigma_base = base.sigma;
    // formula slope: 0 = sigma'(0) <P' phi, psi> + <R phi, psi>
    auto dP = fam.dat(base.sigma);
    std::vector<cdouble> df(n, 0.0), rf(n);
    for (int i = 0; i < n; ++i) {
        cdouble b = 0;
        for (int j = 0; j < n; ++j) b += dP[std::size_t(i) * n + j] * base.right[j];
        df[i] = b;
        rf[i] = R[i] * base.right[i];
    }
    cdouble pair_dP = dot(df, base.left);
    cdouble pair_R = dot(rf, base.left);
    require(std::abs(pair_R) > 1e-14 * std::abs(pair_dP),
            "perturb_resonance: bump does not couple to the target mode");
    out.slope_formula = -pair_R / pair_dP;

    out.eps = eps_list;
    out.sigma.resize(eps_list.size());
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        auto rm = refine_mode(fam, R, eps_list[k], base.sigma);
        out.sigma[k] = rm.sigma;
    }
    // Richardson slope from +-e and +-2e when present (first four entries
    // interpreted as {+e, -e, +2e, -2e})
    if (eps_list.size() >= 4) {
        cdouble e = eps_list[0];
        cdouble d1 = (out.sigma[0] - out.sigma[1]) / (2.0 * e);
        cdouble d2 = (out.sigma[2] - out.sigma[3]) / (4.0 * e);
        out.slope_fd = (4.0 * d1 - d2) / 3.0;
    } else if (eps_list.size() >= 2) {
        out.slope_fd = (out.sigma[0] - out.sigma[1]) / (eps_list[0] - eps_list[1]);
    }
    // quadratic fit residual in eps (analyticity check)
    if (eps_list.size() >= 4) {
        const int m = static_cast<int>(eps_list.size());
        cdouble S[3][4] = {};
        for (int i = 0; i < m; ++i) {
            cdouble b[3] = {1.0, eps_list[i], eps_list[i] * eps_list[i]};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) S[r][c] += std::conj(b[r]) * b[c];
                S[r][3] += std::conj(b[r]) * out.sigma[i];
            }
        }
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int row = col + 1; row < 3; ++row)
                if (std::abs(S[row][col]) > std::abs(S[piv][col])) piv = row;
            for (int c = 0; c < 4; ++c) std::swap(S[piv][c], S[col][c]);
            for (int row = col + 1; row < 3; ++row) {
                cdouble f = S[row][col] / S[col][col];
                for (int c = col; c < 4; ++c) S[row][c] -= f * S[col][c];
            }
        }
        cdouble coef[3];
        for (int row = 2; row >= 0; --row) {
            cdouble s = S[row][3];
            for (int c = row + 1; c < 3; ++c) s -= S[row][c] * coef[c];
            coef[row] = s / S[row][row];
        }
        double res = 0;
        for (int i = 0; i < m; ++i) {
            cdouble fit = coef[0] + coef[1] * eps_list[i] +
                          coef[2] * eps_list[i] * eps_list[i];
            res += std::norm(out.sigma[i] - fit);
        }
        out.quad_fit_residual = std::sqrt(res / m);
    }
    return out;
}

MassRegions MassRegions::from(const HorizonStructure& h, double delta) {
    MassRegions m;
    const auto& r = h.radii;
    m.collar_inner_hi = r.front();
    m.collar_outer_lo = r.back();
    if (h.count() >= 4) {
        m.inner_horizon = r[1];
        m.exterior_lo = r[2] + delta;
        m.exterior_hi = r[3] - delta;
    } else if (h.count() >= 2) {
        m.inner_horizon = r[h.count() - 2];
        m.exterior_lo = r.back() + delta;
        m.exterior_hi = r.back() + 10.0;
    } else {
        m.inner_horizon = 0.0;
        m.exterior_lo = r.back() + delta;
        m.exterior_hi = r.back() + 10.0;
    }
    return m;
}

}  // namespace lab
