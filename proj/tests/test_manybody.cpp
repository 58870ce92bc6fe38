#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfl/eig.hpp"
#include "mfl/fft.hpp"
#include "mfl/manybody.hpp"

using namespace mfl;

namespace {

Field normalized_gaussian(const Grid& g, double sigma = 1.0) {
    Field f = make_field(g, [&](double x, double, double) {
        return cplx(std::exp(-x * x / (2 * sigma * sigma)), 0.0);
    });
    normalize_l2(f);
    return f;
}

ScaledPotential attractive(const Grid& g, double amp, double rad) {
    return sample_scaled(BumpProfile{amp, rad, -1}, 1, 0.0, g);
}

// independent reference: Crank-Nicolson on the dense two-body Hamiltonian
std::vector<cplx> crank_nicolson_2body(const Grid& g, const ScaledPotential& vN,
                                       const std::vector<cplx>& psi0, double t, double dt) {
    const int M = g.M;
    const int n = M * M;
    // dense spectral Laplacian on M points
    const auto xi = g.wavenumbers();
    std::vector<cplx> col(M);
    std::vector<double> lap((std::size_t)M * M);
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < M; ++i) col[i] = (i == j) ? 1.0 : 0.0;
        fft_raw(col.data(), {M}, -1);
        for (int i = 0; i < M; ++i) col[i] *= -xi[i] * xi[i] / (double)M;
        fft_raw(col.data(), {M}, +1);
        for (int i = 0; i < M; ++i) lap[(std::size_t)i * M + j] = col[i].real();
    }
    std::vector<double> vrow(M);
    for (int d = 0; d < M; ++d) vrow[d] = vN.samples.v[(d + M / 2) % M].real();

    // H = lap x I + I x lap - (1/2) v(x1 - x2)
    std::vector<cplx> H((std::size_t)n * n, 0.0);
    auto at = [&](int r, int c) -> cplx& { return H[(std::size_t)r * n + c]; };
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            const int r = a * M + b;
            for (int c = 0; c < M; ++c) {
                at(r, c * M + b) += lap[(std::size_t)a * M + c];
                at(r, a * M + c) += lap[(std::size_t)b * M + c];
            }
            at(r, r) += -0.5 * vrow[((a - b) % M + M) % M];
        }
    // (I - i dt/2 H) psi_{k+1} = (I + i dt/2 H) psi_k
    std::vector<cplx> A((std::size_t)n * n), Bm((std::size_t)n * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const cplx h = cplx(0, 0.5 * dt) * H[(std::size_t)r * n + c];
            A[(std::size_t)r * n + c] = (r == c ? cplx(1.0) : cplx(0.0)) - h;
            Bm[(std::size_t)r * n + c] = (r == c ? cplx(1.0) : cplx(0.0)) + h;
        }
    std::vector<cplx> psi = psi0;
    const int nst = (int)std::llround(t / dt);
    for (int s = 0; s < nst; ++s) {
        std::vector<cplx> rhs(n, 0.0);
        for (int r = 0; r < n; ++r) {
            cplx acc = 0.0;
            for (int c = 0; c < n; ++c) acc += Bm[(std::size_t)r * n + c] * psi[c];
            rhs[r] = acc;
        }
        std::vector<cplx> Awork = A;
        dense_solve(Awork, rhs, n, 1);
        psi = rhs;
    }
    return psi;
}

}  // namespace

TEST_CASE("factorized_state: product values, unit norm, rank-one marginal") {
    Grid g(1, 32, 10.0);
    Field phi = normalized_gaussian(g);
    ManyBodyState st = factorized_state(phi, 2);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j)
            CHECK(std::abs(st.psi[(std::size_t)i * g.M + j] - phi.v[i] * phi.v[j]) < 1e-14);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    CHECK(st.swap_defect() < 1e-14);

    Marginal gam = marginal(st);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j)
            CHECK(std::abs(gam.g[(std::size_t)i * g.M + j] - phi.v[i] * std::conj(phi.v[j])) < 1e-10);
    CHECK(gam.trace() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("factorized_state: unnormalized phi rejected") {
    Grid g(1, 16, 4.0);
    Field phi = make_field(g, [](double, double, double) { return cplx(0.2, 0.0); });
    CHECK_THROWS_AS(factorized_state(phi, 2), std::invalid_argument);
}

TEST_CASE("memory guard: M = 64, N = 5 rejected with the computed byte count") {
    Grid g(1, 64, 10.0);
    try {
        ManyBodyState st(g, 5);
        FAIL("expected GuardError");
    } catch (const GuardError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string((std::int64_t)16 * 64LL * 64 * 64 * 64 * 64)) != std::string::npos);
    }
}

TEST_CASE("mb_step: free product data stays an exact product of free evolutions") {
    Grid g(1, 32, 10.0);
    Field phi = normalized_gaussian(g);
    ManyBodyState st = factorized_state(phi, 3);
    ScaledPotential vz;
    vz.profile.amplitude = 0.0;
    vz.samples = Field(g);
    MbPropagator prop(g, 3, vz, 1e-2);
    prop.step(st, 10);
    Field ref = phi;
    for (int s = 0; s < 10; ++s) ref = free_propagate(ref, 1e-2);
    ManyBodyState want = factorized_state(ref, 3);
    double m = 0.0;
    for (std::int64_t i = 0; i < st.size(); ++i) m = std::max(m, std::abs(st.psi[i] - want.psi[i]));
    CHECK(m < 1e-11);
}

TEST_CASE("mb_step: norm and exchange symmetry preserved") {
    Grid g(1, 16, 8.0);
    Field phi = normalized_gaussian(g);
    ManyBodyState st = factorized_state(phi, 3);
    ScaledPotential v = attractive(g, 4.0, 1.5);
    MbPropagator prop(g, 3, v, 1e-3);
    prop.step(st, 1000);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    CHECK(st.swap_defect() < 1e-10);
}

TEST_CASE("mb_step: N = 2 agrees with the Crank-Nicolson reference at M = 32") {
    Grid g(1, 32, 10.0);
    Field phi = normalized_gaussian(g);
    ScaledPotential v = attractive(g, 4.0, 1.0);
    ManyBodyState st = factorized_state(phi, 2);
    MbPropagator prop(g, 2, v, 2.5e-4);
    prop.step(st, 400);  // t = 0.1
    auto ref = crank_nicolson_2body(g, v, factorized_state(phi, 2).psi, 0.1, 2.5e-4);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err += std::norm(st.psi[i] - ref[i]);
    err = std::sqrt(err * g.dx() * g.dx());
    CHECK(err < 1e-4);
}

TEST_CASE("marginal: symmetrized two-state superposition halves the weights") {
    Grid g(1, 32, 12.0);
    Field phi = normalized_gaussian(g);
    // psi orthogonal to phi: odd function
    Field psi = make_field(g, [](double x, double, double) {
        return cplx(x * std::exp(-x * x / 2), 0.0);
    });
    normalize_l2(psi);
    ManyBodyState st(g, 2);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j)
            st.psi[(std::size_t)i * g.M + j] =
                (phi.v[i] * phi.v[j] + psi.v[i] * psi.v[j]) / std::sqrt(2.0);
    Marginal gam = marginal(st);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j) {
            const cplx want =
                0.5 * (phi.v[i] * std::conj(phi.v[j]) + psi.v[i] * std::conj(psi.v[j]));
            CHECK(std::abs(gam.g[(std::size_t)i * g.M + j] - want) < 1e-10);
        }
    CHECK(gam.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gam.hermiticity_defect() < 1e-12);
    CHECK(gam.min_eigenvalue() > -1e-8);
}

TEST_CASE("trace_distance: fixed points, orthogonal states, rank-one identity") {
    Grid g(1, 32, 12.0);
    Field phi = normalized_gaussian(g);
    Field psi = make_field(g, [](double x, double, double) {
        return cplx(x * std::exp(-x * x / 2), 0.0);
    });
    normalize_l2(psi);

    ManyBodyState prod = factorized_state(phi, 2);
    Marginal gam = marginal(prod);
    CHECK(trace_distance(gam, phi) < 1e-10);

    ManyBodyState prod2 = factorized_state(psi, 2);
    CHECK(trace_distance(marginal(prod2), phi) == doctest::Approx(2.0).epsilon(1e-10));

    // rank-one difference: trace norm = 2 * operator norm
    const int M = g.M;
    std::vector<cplx> diff((std::size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            diff[(std::size_t)i * M + j] =
                g.dx() * (gam.g[(std::size_t)i * M + j] - phi.v[i] * std::conj(phi.v[j]));
    // oracle: eigensolve both sides
    std::vector<double> w;
    hermitian_eig(diff, M, w, nullptr);
    double sum = 0.0, mx = 0.0;
    for (double l : w) {
        sum += std::abs(l);
        mx = std::max(mx, std::abs(l));
    }
    CHECK(std::abs(sum - 2 * mx) < 1e-10 + 1e-10 * sum);
}

TEST_CASE("pickl_alpha: product state gives zero; weights form a distribution") {
    Grid g(1, 24, 10.0);
    Field phi = normalized_gaussian(g);
    for (int N : {2, 3, 4}) {
        ManyBodyState st = factorized_state(phi, N);
        PicklResult pr = pickl_alpha(st, phi, 0.8);
        CHECK(std::abs(pr.alpha_N) < 1e-13);
        CHECK(std::abs(pr.alpha_lambda) < 1e-13);
        double s = 0.0;
        for (double w : pr.w) s += w;
        CHECK(std::abs(s - 1.0) < 1e-10);
    }
}

TEST_CASE("pickl_alpha: alpha_N <= alpha_lambda for lambda < 1 on an entangled state") {
    Grid g(1, 16, 8.0);
    Field phi = normalized_gaussian(g);
    ManyBodyState st = factorized_state(phi, 3);
    ScaledPotential v = attractive(g, 6.0, 1.5);
    MbPropagator prop(g, 3, v, 1e-3);
    prop.step(st, 300);
    PicklResult pr = pickl_alpha(st, phi, 0.6);
    CHECK(pr.alpha_N > 0.0);
    CHECK(pr.alpha_N <= pr.alpha_lambda + 1e-12);
    double s = 0.0;
    for (double w : pr.w) {
        CHECK(w > -1e-10);
        s += w;
    }
    CHECK(std::abs(s - 1.0) < 1e-10);
    CHECK_THROWS_AS(pickl_alpha(st, phi, 1.5), std::invalid_argument);
}

TEST_CASE("delta_lambda: displayed example and the beta = 1/6 threshold") {
    CHECK(delta_lambda(0.1, 0.65) == doctest::Approx(-0.025).epsilon(1e-12));
    for (double beta : {0.05, 0.10, 0.15}) {
        auto [l, d] = delta_lambda_scan(beta);
        CHECK(d < 0.0);
    }
    auto [l6, d6] = delta_lambda_scan(1.0 / 6.0);
    CHECK(std::abs(d6) <= 1e-12);
}

TEST_CASE("pickl_bound: zero at t = 0 with zero initial alpha; calibration is consistent") {
    PicklTrajectory tr;
    for (int i = 0; i <= 10; ++i) {
        tr.t.push_back(i * 0.05);
        tr.linf.push_back(0.7);
        tr.lapdens.push_back(0.4);
    }
    CHECK(pickl_bound(tr, 0.0, 3.0, 4, 0.0, 0.9, 0.0) == 0.0);
    const double alpha = 1e-3;
    const double cv = calibrate_Cv(tr, 0.5, 2, 0.0, 0.9, alpha);
    CHECK(pickl_bound(tr, 0.5, cv, 2, 0.0, 0.9, 0.0) == doctest::Approx(alpha).epsilon(1e-6));
}
