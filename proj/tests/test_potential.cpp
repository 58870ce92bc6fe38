#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfl/potential.hpp"

using namespace mfl;

namespace {
double l1_quadrature(const Field& f) {
    double s = 0.0;
    for (auto& z : f.v) s += z.real();
    return s * f.grid.cell();
}
}  // namespace

TEST_CASE("sample_scaled: N=1 and beta=0 reproduce the unscaled profile") {
    Grid g(1, 256, 16.0);
    BumpProfile p{1.3, 1.0, -1};
    ScaledPotential a = sample_scaled(p, 1, 0.7, g);
    ScaledPotential b = sample_scaled(p, 37, 0.0, g);
    for (int i = 0; i < g.M; ++i) {
        const double ref = p(std::abs(g.x(i)));
        CHECK(a.samples.v[i].real() == doctest::Approx(ref).epsilon(1e-14));
        CHECK(b.samples.v[i].real() == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("sample_scaled: L1 integral invariant under (N, beta)") {
    Grid g(1, 1024, 16.0);
    BumpProfile p{1.0, 1.0, -1};
    const double ref = l1_quadrature(sample_scaled(p, 1, 0.0, g).samples);
    for (auto [N, beta] : {std::pair{16, 0.4}, std::pair{64, 0.3}}) {
        const double v = l1_quadrature(sample_scaled(p, N, beta, g).samples);
        CHECK(v == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("sample_scaled: L2 mass scales as N^{dim beta}") {
    Grid g(1, 2048, 16.0);
    BumpProfile p{1.0, 1.0, -1};
    const double beta = 0.35;
    auto l2sq = [&](int N) {
        const Field& f = sample_scaled(p, N, beta, g).samples;
        double s = 0.0;
        for (auto& z : f.v) s += z.real() * z.real();
        return s * g.dx();
    };
    const double r = l2sq(16) / l2sq(2);
    CHECK(r == doctest::Approx(std::pow(8.0, beta)).epsilon(1e-6));
}

TEST_CASE("sample_scaled: sup norm scales as N^{dim beta}") {
    Grid g(1, 4096, 16.0);
    BumpProfile p{1.0, 1.0, -1};
    const double beta = 0.25;
    auto linf = [&](int N) {
        const Field& f = sample_scaled(p, N, beta, g).samples;
        double m = 0.0;
        for (auto& z : f.v) m = std::max(m, std::abs(z.real()));
        return m;
    };
    CHECK(linf(81) / linf(1) == doctest::Approx(std::pow(81.0, beta)).epsilon(1e-4));
}

TEST_CASE("coupling_constant: zero, reference quadrature, linearity") {
    BumpProfile z{0.0, 1.0, -1};
    CHECK(coupling_constant(z, 1) == 0.0);

    BumpProfile p{1.0, 1.0, -1};
    // refined-grid quadrature oracle (trapezoid at 2^18 points)
    const int n = 1 << 18;
    const double h = 2.0 / n;
    double ref = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + (i + 0.5) * h;
        ref += p(std::abs(x));
    }
    ref *= h;
    CHECK(coupling_constant(p, 1) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(coupling_constant(p, 1) < 0.0);

    BumpProfile p2{2.0, 1.0, -1};
    CHECK(coupling_constant(p2, 1) == doctest::Approx(2 * coupling_constant(p, 1)).epsilon(1e-12));
}

TEST_CASE("guards: support must fit the box and stay resolved") {
    BumpProfile p{1.0, 5.0, -1};
    Grid g(1, 64, 8.0);
    CHECK_THROWS_AS(sample_scaled(p, 1, 0.0, g), std::invalid_argument);  // radius 5 > L/2
    BumpProfile narrow{1.0, 0.1, -1};
    CHECK_THROWS_AS(sample_scaled(narrow, 64, 0.9, g), std::invalid_argument);  // under-resolved
}

TEST_CASE("attractive profiles are nonpositive") {
    Grid g(1, 256, 8.0);
    BumpProfile p{1.0, 1.5, -1};
    for (auto& z : sample_scaled(p, 4, 0.2, g).samples.v) CHECK(z.real() <= 0.0);
}
