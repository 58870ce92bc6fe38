#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfl/fft.hpp"
#include "mfl/fit.hpp"
#include "mfl/hartree.hpp"

using namespace mfl;

namespace {

Field gaussian1d(const Grid& g, double amp = 1.0, double sigma = 1.0) {
    return make_field(g, [&](double x, double, double) {
        return cplx(amp * std::pow(M_PI * sigma * sigma, -0.25) * std::exp(-x * x / (2 * sigma * sigma)),
                    0.0);
    });
}

double l2_distance(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) s += std::norm(a.v[i] - b.v[i]);
    return std::sqrt(a.grid.cell() * s);
}

ScaledPotential attractive(const Grid& g, double amp, double rad, int N = 1, double beta = 0.0) {
    return sample_scaled(BumpProfile{amp, rad, -1}, N, beta, g);
}

ScaledPotential zero_potential(const Grid& g) {
    ScaledPotential v;
    v.profile = BumpProfile{0.0, 1.0, -1};
    v.samples = Field(g);
    return v;
}

}  // namespace

TEST_CASE("hartree_step: zero potential reduces to the free flight") {
    Grid g(1, 128, 12.0);
    Field phi = gaussian1d(g);
    Field a = hartree_step(phi, zero_potential(g), 0.05);
    Field b = free_propagate(phi, 0.05);
    CHECK(l2_distance(a, b) < 1e-14);
}

TEST_CASE("hartree_step: mass is conserved to 1e-12 per step") {
    Grid g(1, 256, 16.0);
    Field phi = gaussian1d(g);
    ScaledPotential v = attractive(g, 2.0, 1.0);
    const double m0 = mass(phi);
    for (int s = 0; s < 50; ++s) {
        phi = hartree_step(phi, v, 1e-2);
        CHECK(std::abs(mass(phi) - m0) < 1e-12 * m0);
    }
}

TEST_CASE("hartree_step: Strang self-convergence ratio is ~4 under dt halving") {
    Grid g(1, 128, 12.0);
    Field phi0 = gaussian1d(g, 1.0, 0.8);
    ScaledPotential v = attractive(g, 4.0, 1.0);
    const double T = 0.4;
    auto evolve = [&](double dt) {
        Field f = phi0;
        const int n = (int)std::llround(T / dt);
        for (int s = 0; s < n; ++s) f = hartree_step(f, v, dt);
        return f;
    };
    Field ref = evolve(T / 1024);  // dt/16 below the finest tested step
    const double e1 = l2_distance(evolve(T / 64), ref);
    const double e2 = l2_distance(evolve(T / 128), ref);
    CHECK(e1 / e2 > 3.3);
    CHECK(e1 / e2 < 4.7);
}

TEST_CASE("nls_step: zero coupling is the free flight; soliton modulus is stationary") {
    Grid g(1, 256, 40.0);
    Field phi = gaussian1d(g);
    CHECK(l2_distance(nls_step(phi, 0.0, 0.03), free_propagate(phi, 0.03)) < 1e-14);

    // i phi_t = -phi_xx - 2 |phi|^2 phi has the soliton sech(x) e^{it}
    Field sol = make_field(g, [](double x, double, double) { return cplx(1.0 / std::cosh(x), 0.0); });
    Field f = sol;
    const double dt = 5e-4;
    for (int s = 0; s < (int)std::llround(1.0 / dt); ++s) f = nls_step(f, -2.0, dt);
    double drift = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i)
        drift = std::max(drift, std::abs(std::abs(f.v[i]) - std::abs(sol.v[i])));
    CHECK(drift < 1e-6);

    const double m0 = mass(sol);
    CHECK(std::abs(mass(f) - m0) < 1e-12 * m0);
}

TEST_CASE("nls_step: Strang self-convergence ratio in [3.3, 4.7]") {
    Grid g(1, 128, 16.0);
    Field phi0 = gaussian1d(g, 1.2, 0.9);
    const double gg = -1.0, T = 0.4;
    auto evolve = [&](double dt) {
        Field f = phi0;
        for (int s = 0; s < (int)std::llround(T / dt); ++s) f = nls_step(f, gg, dt);
        return f;
    };
    Field ref = evolve(T / 1024);
    const double r = l2_distance(evolve(T / 64), ref) / l2_distance(evolve(T / 128), ref);
    CHECK(r > 3.3);
    CHECK(r < 4.7);
}

TEST_CASE("energy: free Gaussian kinetic energy is 1/2; constants carry none") {
    Grid g(1, 512, 30.0);
    Field phi = gaussian1d(g);
    CHECK(energy(phi, zero_potential(g)) == doctest::Approx(0.5).epsilon(1e-6));
    Field one = make_field(g, [](double, double, double) { return cplx(0.3, 0.0); });
    CHECK(std::abs(energy(one, zero_potential(g))) < 1e-12);
}

TEST_CASE("energy: relative drift below 1e-6 over unit time at dt = 1e-3") {
    Grid g(1, 256, 16.0);
    HartreeRun run;
    run.grid = g;
    run.phi0 = gaussian1d(g);
    run.vN = attractive(g, 2.0, 1.0);
    run.dt = 1e-3;
    run.t_end = 1.0;
    run.record_every = 100;
    Observables obs = run.run();
    const double drift = std::abs(obs.energy.back() - obs.energy.front()) / std::abs(obs.energy.front());
    CHECK(drift < 1e-6);
}

TEST_CASE("time reversal: dt then -dt returns the state") {
    Grid g(1, 128, 12.0);
    Field phi = gaussian1d(g, 1.1);
    ScaledPotential v = attractive(g, 3.0, 1.0);
    Field f = hartree_step(phi, v, 2e-2);
    f = hartree_step(f, v, -2e-2);
    CHECK(l2_distance(f, phi) < 1e-10);
}

TEST_CASE("decay_fit: guards reject short windows and horizon violations") {
    std::vector<std::pair<double, double>> few = {{1, 1}, {2, 0.5}, {3, 0.3}};
    CHECK_THROWS_AS(decay_fit(few, 0.5, 3.5, 100.0), std::invalid_argument);
    std::vector<std::pair<double, double>> series;
    for (int i = 1; i <= 20; ++i) series.emplace_back(i * 0.5, std::pow(i * 0.5, -0.5));
    CHECK_THROWS_AS(decay_fit(series, 1.0, 10.0, 5.0), std::invalid_argument);
    FitResult ok = decay_fit(series, 1.0, 10.0, 20.0);
    CHECK(ok.slope == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("free decay: 1D Gaussian exponent -0.5 within 0.05 on [5, 20]") {
    Grid g(1, 1024, 1024 * M_PI / 5.0);
    Field phi = gaussian1d(g);
    const double horizon = wraparound_horizon(phi);
    REQUIRE(horizon > 20.0);
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i < 30; ++i) {
        const double t = 5.0 + 15.0 * i / 29.0;
        series.emplace_back(t, norm_lp(free_propagate(phi, t), lp_inf));
    }
    FitResult fr = decay_fit(series, 5.0, 20.0, horizon);
    CHECK(fr.slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(std::abs(fr.slope + 0.5) < 0.05);
}

TEST_CASE("strichartz: (inf,2) equals the L2 norm; zero field gives zero; admissibility") {
    CHECK(strichartz_admissible(std::numeric_limits<double>::infinity(), 2.0, 1));
    CHECK(strichartz_admissible(8.0, 4.0, 1));
    CHECK_FALSE(strichartz_admissible(4.0, 4.0, 1));
    CHECK(strichartz_admissible(2.0, 6.0, 3));

    Grid g(1, 128, 12.0);
    HartreeRun run;
    run.grid = g;
    run.phi0 = gaussian1d(g);
    run.vN = attractive(g, 1.0, 1.0);
    run.dt = 1e-2;
    run.t_end = 0.5;
    run.record_every = 5;
    Observables obs = run.run();
    const double sup = strichartz_window_norm(obs, -1, std::numeric_limits<double>::infinity(), 0.0, 0.5);
    CHECK(sup == doctest::Approx(norm_l2(run.phi0)).epsilon(1e-10));

    Observables zero;
    zero.t = {0.0, 0.1, 0.2};
    zero.mass = {0.0, 0.0, 0.0};
    CHECK(strichartz_window_norm(zero, -1, std::numeric_limits<double>::infinity(), 0.0, 0.2) == 0.0);
}

TEST_CASE("hartree_to_nls_distance: zero potential gives zero for every N") {
    Grid g(1, 128, 12.0);
    Field phi = gaussian1d(g);
    BumpProfile z{0.0, 1.0, -1};
    auto d = hartree_to_nls_distance(phi, z, 0.3, {4, 16}, 0.2, 1e-2);
    for (auto& [N, dist] : d) CHECK(dist < 1e-12);
}

TEST_CASE("hartree_to_nls_distance: beta = 0 gap is N-independent, beta > 0 shrinks with N") {
    Grid g(1, 512, 16.0);
    Field phi = gaussian1d(g);
    BumpProfile p{2.0, 1.0, -1};
    auto d0 = hartree_to_nls_distance(phi, p, 0.0, {4, 32}, 0.2, 2e-3);
    CHECK(d0[0].second > 1e-6);
    CHECK(d0[0].second == doctest::Approx(d0[1].second).epsilon(1e-12));
    auto d = hartree_to_nls_distance(phi, p, 0.4, {8, 64}, 0.2, 2e-3);
    CHECK(d[1].second < d[0].second);
}
