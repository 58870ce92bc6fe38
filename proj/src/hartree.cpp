#include "mfl/hartree.hpp"

#include <cmath>

#include "mfl/kernels.hpp"

namespace mfl {

namespace {

void check_finite(const Field& f, const char* where) {
    for (auto& z : f.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericalAbort(std::string(where) + ": NaN/Inf in field");
}

// phi *= exp(-i dt w) pointwise for real w
void nonlinear_phase(Field& phi, const std::vector<double>& w, double dt) {
    kern::phase_mul(phi.data(), w.data(), -dt, phi.size());
}

std::vector<double> convolved_density(const Field& phi, const ScaledPotential& vN) {
    Field dens(phi.grid);
    for (std::int64_t i = 0; i < phi.size(); ++i) dens.v[i] = std::norm(phi.v[i]);
    Field conv = convolve(vN.samples, dens);
    std::vector<double> w(phi.size());
    for (std::int64_t i = 0; i < phi.size(); ++i) w[i] = conv.v[i].real();
    return w;
}

}  // namespace

Field hartree_step(const Field& phi, const ScaledPotential& vN, double dt) {
    if (!(dt != 0.0)) throw std::invalid_argument("hartree_step: dt must be nonzero");
    Field f = free_propagate(phi, dt / 2);
    if (!vN.zero()) {
        require_same_grid(phi.grid, vN.samples.grid, "hartree_step");
        nonlinear_phase(f, convolved_density(f, vN), dt);
    }
    f = free_propagate(f, dt / 2);
    check_finite(f, "hartree_step");
    return f;
}

Field nls_step(const Field& phi, double g, double dt) {
    if (!(dt != 0.0)) throw std::invalid_argument("nls_step: dt must be nonzero");
    Field f = free_propagate(phi, dt / 2);
    if (g != 0.0) {
        std::vector<double> w(f.size());
        for (std::int64_t i = 0; i < f.size(); ++i) w[i] = g * std::norm(f.v[i]);
        nonlinear_phase(f, w, dt);
    }
    f = free_propagate(f, dt / 2);
    check_finite(f, "nls_step");
    return f;
}

namespace {

double kinetic_energy(const Field& phi) {
    // int |grad phi|^2 = sum over modes |xi|^2 |c_xi|^2 * L^dim
    const Grid& g = phi.grid;
    auto c = spectrum(phi);
    const auto xi = g.wavenumbers();
    const int M = g.M;
    std::vector<double> acc(c.size());
    for (std::int64_t idx = 0; idx < (std::int64_t)c.size(); ++idx) {
        std::int64_t r = idx;
        double xi2 = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            xi2 += xi[r % M] * xi[r % M];
            r /= M;
        }
        acc[idx] = xi2 * std::norm(c[idx]);
    }
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.L;
    return vol * kern::sum(acc.data(), (std::int64_t)acc.size());
}

}  // namespace

double energy(const Field& phi, const ScaledPotential& vN) {
    double e = kinetic_energy(phi);
    if (!vN.zero()) {
        auto w = convolved_density(phi, vN);
        std::vector<double> acc(phi.size());
        for (std::int64_t i = 0; i < phi.size(); ++i) acc[i] = w[i] * std::norm(phi.v[i]);
        e += 0.5 * phi.grid.cell() * kern::sum(acc.data(), phi.size());
    }
    return e;
}

double energy_nls(const Field& phi, double g) {
    double e = kinetic_energy(phi);
    if (g != 0.0) {
        std::vector<double> acc(phi.size());
        for (std::int64_t i = 0; i < phi.size(); ++i) acc[i] = std::norm(phi.v[i]) * std::norm(phi.v[i]);
        e += 0.5 * g * phi.grid.cell() * kern::sum(acc.data(), phi.size());
    }
    return e;
}

Observables HartreeRun::run(Field* final_state) const {
    Field phi = phi0;
    Observables obs;
    obs.lr.resize(record_lr.size());
    const int nsteps = (int)std::llround(t_end / dt);
    auto record = [&](double t) {
        obs.t.push_back(t);
        obs.mass.push_back(mass(phi));
        obs.energy.push_back(cubic ? energy_nls(phi, g) : energy(phi, vN));
        obs.linf.push_back(norm_lp(phi, lp_inf));
        obs.h_half.push_back(half_deriv_norm(phi));
        for (std::size_t c = 0; c < record_lr.size(); ++c)
            obs.lr[c].push_back(norm_lp(phi, record_lr[c]));
    };
    record(0.0);
    for (int s = 1; s <= nsteps; ++s) {
        phi = cubic ? nls_step(phi, g, dt) : hartree_step(phi, vN, dt);
        if (s % record_every == 0 || s == nsteps) record(s * dt);
    }
    if (final_state) *final_state = phi;
    return obs;
}

bool strichartz_admissible(double q, double r, int dim) {
    if (r < 2.0) return false;
    if (std::isinf(q)) return std::abs(dim / r - dim / 2.0) < 1e-12;
    if (q < 2.0) return false;
    return std::abs(2.0 / q + dim / r - dim / 2.0) < 1e-12;
}

double strichartz_window_norm(const Observables& obs, int lr_col, double q, double t0, double t1) {
    const auto& ts = obs.t;
    const auto& lr = lr_col < 0 ? obs.mass : obs.lr.at(lr_col);  // lr_col < 0: use sqrt(mass) = L2
    auto value = [&](std::size_t i) {
        return lr_col < 0 ? std::sqrt(obs.mass[i]) : lr[i];
    };
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] >= t0 && ts[i] <= t1) m = std::max(m, value(i));
        return m;
    }
    // trapezoid over recorded samples inside the window
    double acc = 0.0;
    double prev_t = 0.0, prev_v = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t0 || ts[i] > t1) continue;
        const double v = std::pow(value(i), q);
        if (have) acc += 0.5 * (v + prev_v) * (ts[i] - prev_t);
        prev_t = ts[i];
        prev_v = v;
        have = true;
    }
    return std::pow(acc, 1.0 / q);
}

std::vector<std::pair<int, double>> hartree_to_nls_distance(const Field& phi0,
                                                            const BumpProfile& profile, double beta,
                                                            const std::vector<int>& N_list, double t,
                                                            double dt) {
    const int nsteps = (int)std::llround(t / dt);
    const double g = coupling_constant(profile, phi0.grid.dim);
    Field nls = phi0;
    for (int s = 0; s < nsteps; ++s) nls = nls_step(nls, g, dt);
    std::vector<std::pair<int, double>> out;
    for (int N : N_list) {
        ScaledPotential vN = sample_scaled(profile, N, beta, phi0.grid);
        Field h = phi0;
        for (int s = 0; s < nsteps; ++s) h = hartree_step(h, vN, dt);
        double d2 = 0.0;
        for (std::int64_t i = 0; i < h.size(); ++i) d2 += std::norm(h.v[i] - nls.v[i]);
        out.emplace_back(N, std::sqrt(phi0.grid.cell() * d2));
    }
    return out;
}

}  // namespace mfl
