#include <doctest.h>

#include <gfe/simulator.hpp>

using namespace gfe;

TEST_CASE("fft round trip and spectral derivative") {
    Grid g(32, 16, 2 * 3.14159265358979323846, 2 * 3.14159265358979323846);
    SpectralSolver solver(g, 1.0);
    Field f(g);
    for (int j = 0; j < g.Ny; ++j)
        for (int i = 0; i < g.Nx; ++i)
            f.v[(size_t)j * g.Nx + i] =
                std::sin(3 * g.x(i)) * std::cos(2 * g.y(j)) + 0.5 * std::cos(g.x(i));
    Field back = detail::from_spectrum(detail::to_spectrum(f), g);
    for (size_t i = 0; i < f.v.size(); ++i)
        CHECK(std::abs(back.v[i] - f.v[i]) < 1e-12);

    // d/dx of sin(3x)cos(2y) + 0.5 cos(x) = 3 cos(3x)cos(2y) - 0.5 sin(x)
    Field dfx = detail::from_spectrum(solver.derivative(detail::to_spectrum(f), true), g);
    for (int j = 0; j < g.Ny; ++j)
        for (int i = 0; i < g.Nx; ++i) {
            double exact = 3 * std::cos(3 * g.x(i)) * std::cos(2 * g.y(j)) -
                           0.5 * std::sin(g.x(i));
            CHECK(std::abs(dfx.v[(size_t)j * g.Nx + i] - exact) < 1e-10);
        }
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(20, 16, 1.0, 1.0), SimulatorError);
    CHECK_THROWS_AS(Grid(16, 8, 1.0, 1.0), SimulatorError);
}

TEST_CASE("zero vorticity stays zero") {
    Grid g(16, 16, 2 * 3.14159265358979323846, 2 * 3.14159265358979323846);
    SpectralSolver solver(g, 1.0);
    Spectrum w(g.size(), {0.0, 0.0});
    for (int s = 0; s < 50; ++s) w = solver.step(w, 1e-2);
    for (const auto& z : w) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("zonal flow is exactly stationary") {
    SolutionRecord rec = zonal_flow(call("sin", symbol("y")));
    rec.period_y = 2 * 3.14159265358979323846;
    RunConfig cfg;
    cfg.initial = rec;
    cfg.N = 32;
    cfg.dt = 1e-2;
    cfg.T = 1.0;
    cfg.output_every = 10;
    RunResult r = run_simulation(cfg);
    CHECK(r.steps == 100);
    // per-step drift bound: total error over 100 steps below 1e-10
    CHECK(r.final_linf <= 1e-10);
    CHECK(r.enstrophy_drift <= 1e-12);
}

TEST_CASE("travelling wave: accuracy and conservation over one period") {
    RunConfig cfg;
    cfg.initial = rossby_wave(Rational(1), Rational(1), Rational(1));
    cfg.beta = 1.0;
    cfg.N = 64;
    cfg.dt = 1e-3;
    cfg.T = 2 * 3.14159265358979323846;
    cfg.output_every = 1000;
    RunResult r = run_simulation(cfg);
    CHECK(r.final_linf <= 1e-6);
    CHECK(r.enstrophy_drift <= 1e-8);
    CHECK(r.energy_drift <= 1e-8);

    std::string csv = run_log_csv(r);
    CHECK(csv.rfind("time,l2_error,linf_error,energy,enstrophy\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == (long)r.log.size() + 1);
}

TEST_CASE("runs are bitwise deterministic") {
    RunConfig cfg;
    cfg.initial = rossby_wave(Rational(1), Rational(2), Rational(1));
    cfg.N = 32;
    cfg.dt = 1e-3;
    cfg.T = 0.1;
    cfg.output_every = 20;
    std::string a = run_log_csv(run_simulation(cfg));
    std::string b = run_log_csv(run_simulation(cfg));
    CHECK(a == b);
    CHECK(a.size() > 100);
}

TEST_CASE("temporal convergence is fourth order") {
    auto err_at = [](double dt) {
        RunConfig cfg;
        cfg.initial = rossby_wave(Rational(1), Rational(1), Rational(1));
        cfg.N = 32;
        cfg.dt = dt;
        cfg.T = 2.0;
        cfg.output_every = 1 << 30;  // only the final row matters
        return run_simulation(cfg).final_linf;
    };
    double e1 = err_at(0.05), e2 = err_at(0.025);
    double slope = std::log2(e1 / e2);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.5 / 4.0));
}

TEST_CASE("periodicity compatibility is enforced") {
    RunConfig cfg;
    cfg.initial = polynomial_solution(Rational(1), Rational(0), Rational(1));
    CHECK_THROWS_AS(run_simulation(cfg), SimulatorError);

    // periodic but incommensurate with the 2*pi box
    RunConfig cfg2;
    cfg2.initial = rossby_wave(Rational(1), Rational(1, 2), Rational(1));
    CHECK_THROWS_AS(run_simulation(cfg2), SimulatorError);
}

TEST_CASE("CFL guard rejects oversized steps") {
    RunConfig cfg;
    cfg.initial = rossby_wave(Rational(10), Rational(1), Rational(1));
    cfg.N = 64;
    cfg.dt = 0.1;  // dt * max|grad H| / dx = 0.1 * 10 / 0.098 >> 0.5
    CHECK_THROWS_AS(run_simulation(cfg), SimulatorError);
}

TEST_CASE("finite-difference residual grid") {
    BoxMap box{{"x", {-1.5, 1.5}}, {"y", {-1.5, 1.5}}};

    SUBCASE("cubic solution: stencils are exact at any spacing") {
        // central differences of the given orders are exact on cubics, so the
        // residual is pure roundoff regardless of h
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(2), Rational(1));
        for (double h : {0.5, 0.1, 0.02}) {
            CHECK(fd_residual_grid(rec, box, h, 2).max_abs <= 1e-10);
            CHECK(fd_residual_grid(rec, box, h, 4).max_abs <= 1e-10);
        }
    }

    SUBCASE("observed order on a non-polynomial solution") {
        SolutionRecord rec = rossby_wave(Rational(1), Rational(2), Rational(1));
        CHECK(fd_observed_order(rec, box, 0.02, 2) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(fd_observed_order(rec, box, 0.05, 4) == doctest::Approx(4.0).epsilon(0.05));
    }

    SUBCASE("harmonic solution inside its validity domain") {
        SolutionRecord rec = harmonic_solution(Rational(1), HarmonicVariant::Base);
        BoxMap ok{{"x", {0.8, 1.8}}, {"y", {-0.3, 0.3}}};
        CHECK(fd_residual_grid(rec, ok, 1e-3, 4).max_abs <= 1e-6);
        // a box whose stencil halo crosses the singular half-plane is rejected
        BoxMap bad{{"x", {0.001, 1.0}}, {"y", {-0.3, 0.3}}};
        CHECK_THROWS_AS(fd_residual_grid(rec, bad, 0.01, 4), SimulatorError);
    }

    SUBCASE("argument validation") {
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(0), Rational(1));
        CHECK_THROWS_AS(fd_residual_grid(rec, box, 0.1, 3), SimulatorError);
        CHECK_THROWS_AS(fd_residual_grid(rec, BoxMap{{"x", {0, 1}}}, 0.1, 2),
                        SimulatorError);
    }
}
