#pragma once

// Numeric cross-validation of the model equation: a pseudo-spectral RK4
// integrator for the vorticity form
//
//     w_t = H_y w_x - H_x w_y - beta H_x,     w = H_xx + H_yy,
//
// on a doubly periodic grid (2/3-rule dealiasing, mean mode of H pinned to
// zero), plus finite-difference residual grids for non-periodic solutions.

#include <gfe/catalog.hpp>

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gfe {

struct SimulatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// FFT (iterative radix-2, power-of-two lengths)

namespace detail {

/// Precomputed bit-reversal permutation and twiddle factors for one length.
struct FftPlan {
    std::vector<size_t> rev;
    // twiddles per stage, concatenated: exp(-+2 pi i k / len) for len = 2,4,...,n
    std::vector<std::complex<double>> fwd, inv;
};

inline const FftPlan& fft_plan(size_t n) {
    static std::map<size_t, FftPlan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    FftPlan p;
    p.rev.assign(n, 0);
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        p.rev[i] = j;
    }
    const double pi = 3.14159265358979323846;
    for (size_t len = 2; len <= n; len <<= 1)
        for (size_t k = 0; k < len / 2; ++k) {
            double ang = 2 * pi * (double)k / (double)len;
            p.fwd.emplace_back(std::cos(ang), -std::sin(ang));
            p.inv.emplace_back(std::cos(ang), std::sin(ang));
        }
    return cache.emplace(n, std::move(p)).first->second;
}

/// In-place radix-2 FFT over a strided view (stride 1: rows; Nx: columns).
inline void fft_strided(std::complex<double>* a, size_t n, size_t stride,
                        bool inverse) {
    const FftPlan& p = fft_plan(n);
    auto at = [&](size_t i) -> std::complex<double>& { return a[i * stride]; };
    for (size_t i = 1; i < n; ++i)
        if (i < p.rev[i]) std::swap(at(i), at(p.rev[i]));
    const std::complex<double>* tw = (inverse ? p.inv : p.fwd).data();
    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t half = len / 2;
        for (size_t i = 0; i < n; i += len)
            for (size_t k = 0; k < half; ++k) {
                std::complex<double> u = at(i + k), v = at(i + k + half) * tw[k];
                at(i + k) = u + v;
                at(i + k + half) = u - v;
            }
        tw += half;
    }
    if (inverse) {
        double scale = 1.0 / (double)n;
        for (size_t i = 0; i < n; ++i) at(i) *= scale;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// grid and fields

struct Grid {
    int Nx, Ny;
    double Lx, Ly;
    Grid(int nx, int ny, double lx, double ly) : Nx(nx), Ny(ny), Lx(lx), Ly(ly) {
        auto pow2 = [](int n) { return n >= 16 && (n & (n - 1)) == 0; };
        if (!pow2(Nx) || !pow2(Ny))
            throw SimulatorError("grid sizes must be powers of two, at least 16");
    }
    double dx() const { return Lx / Nx; }
    double dy() const { return Ly / Ny; }
    double x(int i) const { return Lx * i / Nx; }
    double y(int j) const { return Ly * j / Ny; }
    size_t size() const { return (size_t)Nx * Ny; }
};

/// Real nodal values, row-major: v[j * Nx + i] at (x_i, y_j).
struct Field {
    Grid grid;
    std::vector<double> v;
    explicit Field(const Grid& g) : grid(g), v(g.size(), 0.0) {}
};

using Spectrum = std::vector<std::complex<double>>;

namespace detail {

inline Spectrum to_spectrum(const Field& f) {
    const Grid& g = f.grid;
    Spectrum s(g.size());
    for (size_t i = 0; i < s.size(); ++i) s[i] = f.v[i];
    for (int j = 0; j < g.Ny; ++j)
        fft_strided(s.data() + (size_t)j * g.Nx, g.Nx, 1, false);
    for (int i = 0; i < g.Nx; ++i)
        fft_strided(s.data() + i, g.Ny, g.Nx, false);
    return s;
}

inline Field from_spectrum(const Spectrum& s0, const Grid& g) {
    Spectrum s = s0;
    for (int i = 0; i < g.Nx; ++i)
        fft_strided(s.data() + i, g.Ny, g.Nx, true);
    Field f(g);
    for (int j = 0; j < g.Ny; ++j) {
        fft_strided(s.data() + (size_t)j * g.Nx, g.Nx, 1, true);
        for (int i = 0; i < g.Nx; ++i)
            f.v[(size_t)j * g.Nx + i] = s[(size_t)j * g.Nx + i].real();
    }
    return f;
}

inline double wavenumber(int idx, int n, double L) {
    int k = idx <= n / 2 ? idx : idx - n;
    return 2 * 3.14159265358979323846 * k / L;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// the spectral stepper

class SpectralSolver {
  public:
    SpectralSolver(const Grid& g, double beta) : g_(g), beta_(beta) {}

    /// One RK4 step of the spectral vorticity equation.
    Spectrum step(const Spectrum& w, double dt) const {
        Spectrum k1 = rhs(w);
        Spectrum k2 = rhs(axpy(w, k1, dt / 2));
        Spectrum k3 = rhs(axpy(w, k2, dt / 2));
        Spectrum k4 = rhs(axpy(w, k3, dt));
        Spectrum out = w;
        for (size_t i = 0; i < out.size(); ++i)
            out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }

    /// w_t = H_y w_x - H_x w_y - beta H_x with H = inverse Laplacian of w
    /// (mean mode pinned to zero); products dealiased by the 2/3 rule.
    Spectrum rhs(const Spectrum& w) const {
        Spectrum wd = dealias(w);
        Spectrum Hs = invert_laplacian(wd);
        Field Hx = detail::from_spectrum(derivative(Hs, true), g_);
        Field Hy = detail::from_spectrum(derivative(Hs, false), g_);
        Field wx = detail::from_spectrum(derivative(wd, true), g_);
        Field wy = detail::from_spectrum(derivative(wd, false), g_);
        Field jac(g_);
        for (size_t i = 0; i < jac.v.size(); ++i)
            jac.v[i] = Hy.v[i] * wx.v[i] - Hx.v[i] * wy.v[i] - beta_ * Hx.v[i];
        return dealias(detail::to_spectrum(jac));
    }

    Spectrum invert_laplacian(const Spectrum& w) const {
        Spectrum H(w.size());
        for (int j = 0; j < g_.Ny; ++j) {
            double ky = detail::wavenumber(j, g_.Ny, g_.Ly);
            for (int i = 0; i < g_.Nx; ++i) {
                double kx = detail::wavenumber(i, g_.Nx, g_.Lx);
                double k2 = kx * kx + ky * ky;
                size_t n = (size_t)j * g_.Nx + i;
                H[n] = k2 == 0 ? 0.0 : -w[n] / k2;  // mean mode of H fixed at 0
            }
        }
        return H;
    }

    Spectrum derivative(const Spectrum& s, bool in_x) const {
        Spectrum out(s.size());
        for (int j = 0; j < g_.Ny; ++j) {
            double ky = detail::wavenumber(j, g_.Ny, g_.Ly);
            for (int i = 0; i < g_.Nx; ++i) {
                double kx = detail::wavenumber(i, g_.Nx, g_.Lx);
                size_t n = (size_t)j * g_.Nx + i;
                out[n] = std::complex<double>(0, in_x ? kx : ky) * s[n];
            }
        }
        return out;
    }

    Spectrum dealias(const Spectrum& s) const {
        Spectrum out = s;
        for (int j = 0; j < g_.Ny; ++j) {
            int kj = j <= g_.Ny / 2 ? j : g_.Ny - j;
            for (int i = 0; i < g_.Nx; ++i) {
                int ki = i <= g_.Nx / 2 ? i : g_.Nx - i;
                if (3 * ki > g_.Nx || 3 * kj > g_.Ny)
                    out[(size_t)j * g_.Nx + i] = 0.0;
            }
        }
        return out;
    }

    const Grid& grid() const { return g_; }
    double beta() const { return beta_; }

  private:
    static Spectrum axpy(const Spectrum& a, const Spectrum& d, double c) {
        Spectrum out = a;
        for (size_t i = 0; i < out.size(); ++i) out[i] += c * d[i];
        return out;
    }
    Grid g_;
    double beta_;
};

// ---------------------------------------------------------------------------
// energetics

inline double enstrophy(const Spectrum& w, const Grid& g) {
    // 0.5 * integral of w^2 via Parseval (spectrum unnormalized)
    double acc = 0;
    for (const auto& z : w) acc += std::norm(z);
    return 0.5 * acc * g.Lx * g.Ly / ((double)g.size() * (double)g.size());
}

inline double energy(const Spectrum& w, const Grid& g) {
    // 0.5 * integral of |grad H|^2 = 0.5 * sum k^2 |H_k|^2 = 0.5 sum |w_k|^2/k^2
    double acc = 0;
    for (int j = 0; j < g.Ny; ++j) {
        double ky = detail::wavenumber(j, g.Ny, g.Ly);
        for (int i = 0; i < g.Nx; ++i) {
            double kx = detail::wavenumber(i, g.Nx, g.Lx);
            double k2 = kx * kx + ky * ky;
            if (k2 > 0) acc += std::norm(w[(size_t)j * g.Nx + i]) / k2;
        }
    }
    return 0.5 * acc * g.Lx * g.Ly / ((double)g.size() * (double)g.size());
}

// ---------------------------------------------------------------------------
// a full run against an exact solution

struct RunConfig {
    SolutionRecord initial;
    double beta = 1.0;
    int N = 64;
    double dt = 1e-3;
    double T = 6.2832;
    int output_every = 100;  // steps between log rows
    bool spectral_filter = false;  // optional mild exponential filter
};

struct RunLogRow {
    double time, l2_error, linf_error, energy, enstrophy;
};

struct RunResult {
    std::vector<RunLogRow> log;
    double final_linf = 0, final_l2 = 0;
    double enstrophy_drift = 0;  // relative, max over the run
    double energy_drift = 0;
    int steps = 0;
};

namespace detail {

inline Field sample_field(const ExprPtr& e, const Grid& g, double t, double beta) {
    Field f(g);
    std::map<std::string, double> env{{"t", t}, {"beta", beta}};
    for (int j = 0; j < g.Ny; ++j)
        for (int i = 0; i < g.Nx; ++i) {
            env["x"] = g.x(i);
            env["y"] = g.y(j);
            f.v[(size_t)j * g.Nx + i] = eval(e, env);
        }
    return f;
}

}  // namespace detail

inline RunResult run_simulation(const RunConfig& cfg) {
    // the initial record must fit the torus: every period divides the box
    double L = 2 * 3.14159265358979323846;
    auto compatible = [&](std::optional<double> p, double box) {
        if (!p) return true;
        double ratio = box / *p;
        return std::abs(ratio - std::round(ratio)) < 1e-9 && ratio >= 0.99;
    };
    const SolutionRecord& rec = cfg.initial;
    bool xdep = contains_symbol(rec.expr, "x");
    bool ydep = contains_symbol(rec.expr, "y");
    if ((xdep && !rec.period_x) || (ydep && !rec.period_y) ||
        !compatible(rec.period_x, L) || !compatible(rec.period_y, L))
        throw SimulatorError(
            "initial solution is not periodic-compatible with the grid");

    Grid g(cfg.N, cfg.N, L, L);
    SpectralSolver solver(g, cfg.beta);
    ExprPtr w_exact = vorticity(rec.expr);
    ExprPtr H_exact = rec.expr;

    Spectrum w = detail::to_spectrum(detail::sample_field(w_exact, g, 0.0, cfg.beta));

    // CFL-style sanity bound on the initial data
    Field Hx0 = detail::from_spectrum(
        solver.derivative(solver.invert_laplacian(w), true), g);
    Field Hy0 = detail::from_spectrum(
        solver.derivative(solver.invert_laplacian(w), false), g);
    double vmax = 0;
    for (size_t i = 0; i < Hx0.v.size(); ++i)
        vmax = std::max(vmax, std::max(std::abs(Hx0.v[i]), std::abs(Hy0.v[i])));
    if (cfg.dt * vmax / std::min(g.dx(), g.dy()) > 0.5)
        throw SimulatorError("time step violates the advective CFL bound");

    RunResult res;
    double ens0 = enstrophy(w, g), en0 = energy(w, g);
    int nsteps = (int)std::llround(cfg.T / cfg.dt);

    auto log_state = [&](int step) {
        double t = step * cfg.dt;
        // compare recovered H against the exact solution (both zero-mean)
        Field Hnum = detail::from_spectrum(solver.invert_laplacian(w), g);
        Field Hex = detail::sample_field(H_exact, g, t, cfg.beta);
        double mean = 0;
        for (double v : Hex.v) mean += v;
        mean /= (double)Hex.v.size();
        double l2 = 0, linf = 0;
        for (size_t i = 0; i < Hnum.v.size(); ++i) {
            double d = Hnum.v[i] - (Hex.v[i] - mean);
            l2 += d * d;
            linf = std::max(linf, std::abs(d));
        }
        l2 = std::sqrt(l2 / (double)Hnum.v.size());
        double ens = enstrophy(w, g), en = energy(w, g);
        res.log.push_back({t, l2, linf, en, ens});
        if (ens0 != 0)
            res.enstrophy_drift =
                std::max(res.enstrophy_drift, std::abs(ens - ens0) / ens0);
        if (en0 != 0)
            res.energy_drift = std::max(res.energy_drift, std::abs(en - en0) / en0);
        res.final_l2 = l2;
        res.final_linf = linf;
    };

    log_state(0);
    for (int s = 1; s <= nsteps; ++s) {
        w = solver.step(w, cfg.dt);
        for (const auto& z : w)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw SimulatorError("non-finite value at step " + std::to_string(s));
        if (cfg.spectral_filter) w = solver.dealias(w);
        if (s % cfg.output_every == 0 || s == nsteps) log_state(s);
        res.steps = s;
    }
    return res;
}

/// CSV rendering of the run log: time,l2_error,linf_error,energy,enstrophy.
inline std::string run_log_csv(const RunResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "time,l2_error,linf_error,energy,enstrophy\n";
    for (const auto& row : r.log)
        os << row.time << ',' << row.l2_error << ',' << row.linf_error << ','
           << row.energy << ',' << row.enstrophy << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// finite-difference residual grids (non-periodic validation)

struct FdResidualGrid {
    int nx, ny;
    std::vector<double> residual;
    double max_abs = 0;
};

namespace detail {

template <class F, class R>
R fd_d1(const F& f, const R& x0, const R& h, int order) {
    if (order == 2) return (f(x0 + h) - f(x0 - h)) / (2 * h);
    return (-f(x0 + 2 * h) + 8 * f(x0 + h) - 8 * f(x0 - h) + f(x0 - 2 * h)) /
           (12 * h);
}

template <class F, class R>
R fd_d2(const F& f, const R& x0, const R& h, int order) {
    if (order == 2) return (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h);
    return (-f(x0 + 2 * h) + 16 * f(x0 + h) - 30 * f(x0) + 16 * f(x0 - h) -
            f(x0 - 2 * h)) /
           (12 * h * h);
}

}  // namespace detail

/// Discrete residual of the model equation on a (x, y) lattice at fixed t,
/// all derivatives (including the mixed third-order ones) composed from
/// central stencils of the requested order applied to the exact solution.
inline FdResidualGrid fd_residual_grid(const SolutionRecord& rec, const BoxMap& box,
                                       double h_s, int order, double t0 = 1.0,
                                       int nx = 8, int ny = 8) {
    if (order != 2 && order != 4)
        throw SimulatorError("stencil order must be 2 or 4");
    if (!box.count("x") || !box.count("y"))
        throw SimulatorError("residual grid needs x and y boxes");
    // reject boxes whose stencil halo leaves the validity domain
    double halo = (order == 2 ? 3 : 6) * h_s;
    for (const auto& [dim, vb] : rec.validity) {
        auto it = box.find(dim);
        if (it == box.end()) continue;
        if (it->second.lo - halo < vb.lo || it->second.hi + halo > vb.hi)
            throw SimulatorError("grid box (plus stencil halo) touches the edge of "
                                 "the solution's validity domain");
    }

    // 50-digit evaluation: composing first- and second-derivative stencils
    // amplifies roundoff like 1/h^3, which in double arithmetic would swamp
    // the exact cancellation expected on polynomial solutions at small h
    Real50 beta(1);
    if (rec.params.count("beta") && rec.params.at("beta")->kind == Kind::Constant)
        beta = detail::from_rational<Real50>(rec.params.at("beta")->value);
    auto H = [&](const Real50& t, const Real50& x, const Real50& y) {
        return eval(rec.expr, std::map<std::string, Real50>{
                                  {"t", t}, {"x", x}, {"y", y}, {"beta", beta}});
    };
    Real50 h(h_s);
    auto lap = [&](const Real50& t, const Real50& x, const Real50& y) -> Real50 {
        return detail::fd_d2([&](const Real50& xx) { return H(t, xx, y); }, x, h,
                             order) +
               detail::fd_d2([&](const Real50& yy) { return H(t, x, yy); }, y, h,
                             order);
    };
    Box bx = box.at("x"), by = box.at("y");
    FdResidualGrid out;
    out.nx = nx;
    out.ny = ny;
    for (int j = 0; j < ny; ++j) {
        Real50 y = by.lo + (by.hi - by.lo) * Real50(j) / std::max(1, ny - 1);
        for (int i = 0; i < nx; ++i) {
            Real50 x = bx.lo + (bx.hi - bx.lo) * Real50(i) / std::max(1, nx - 1);
            Real50 t(t0);
            Real50 wt = detail::fd_d1(
                [&](const Real50& tt) { return lap(tt, x, y); }, t, h, order);
            Real50 wx = detail::fd_d1(
                [&](const Real50& xx) { return lap(t, xx, y); }, x, h, order);
            Real50 wy = detail::fd_d1(
                [&](const Real50& yy) { return lap(t, x, yy); }, y, h, order);
            Real50 Hx = detail::fd_d1(
                [&](const Real50& xx) { return H(t, xx, y); }, x, h, order);
            Real50 Hy = detail::fd_d1(
                [&](const Real50& yy) { return H(t, x, yy); }, y, h, order);
            Real50 r = wt - Hy * wx + Hx * wy + beta * Hx;
            out.residual.push_back(r.convert_to<double>());
            out.max_abs = std::max(out.max_abs, std::abs(out.residual.back()));
        }
    }
    return out;
}

/// Observed convergence order from halving the spacing.
inline double fd_observed_order(const SolutionRecord& rec, const BoxMap& box,
                                double h_s, int order) {
    double e1 = fd_residual_grid(rec, box, h_s, order).max_abs;
    double e2 = fd_residual_grid(rec, box, h_s / 2, order).max_abs;
    if (e1 == 0 || e2 == 0) return (double)order;  // stencil exact: no error to halve
    return std::log2(e1 / e2);
}

}  // namespace gfe
