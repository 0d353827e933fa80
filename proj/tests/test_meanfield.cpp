#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavekin/conservation.hpp"
#include "wavekin/meanfield.hpp"
#include "wavekin/samplers.hpp"
#include "wavekin/sim.hpp"

#include <cmath>

using namespace wavekin;

namespace {

struct TwoBody {
    RegularizationKernel kernel{0.75, 8, 2048};
    RunResult result;
    TrajectoryRecord traj;

    explicit TwoBody(double T = 1.0, double dt = 0.0625, int grid = 64, double box = 4.5) {
        const double d = 2.0, v = 0.0997;
        const double p = v / std::sqrt(1 - v * v);
        ParticleEnsemble e = ParticleEnsemble::uniform({{d / 2, 0, 0}, {-d / 2, 0, 0}},
                                                       {{0, p, 0}, {0, -p, 0}});
        SystemState s{e, init_ground_field(kernel, e, grid, box, 2.0)};
        RunOptions opt;
        opt.dt = dt;
        opt.T = T;
        opt.record_fields = true;
        opt.field_snapshot_stride = 1;
        opt.record_particles = true;
        result = run_coupled(kernel, s, opt);
        traj = trajectory_from_run(result.record, 1);
    }
};

} // namespace

TEST_CASE("free streaming characteristics") {
    RegularizationKernel k(0.5);
    WeightedPointMeasure mu0;
    mu0.add({{0.1, 0.2, 0.0}, {0.4, -0.1, 0.2}}, 1.0);
    WaveField zero(32, 4.0);
    const auto traj = free_evolution(k, mu0, zero, 1.0, 0.05, 4);
    const Phase z = characteristics_flow(k, traj, mu0.points[0], 0.0, 1.0);
    const Vec3 want = mu0.points[0].q + velocity(mu0.points[0].p);
    CHECK(norm(z.q - want) < 1e-13);
    CHECK(norm(z.p - mu0.points[0].p) < 1e-13);
    // the trajectory's own measures free-stream too
    const auto& last = traj.measures.back();
    CHECK(norm(last.points[0].q - want) < 1e-13);
}

TEST_CASE("flow consistency: a source particle's datum reproduces its stored path") {
    TwoBody tb;
    const auto& rec = tb.result.record;
    const Phase z0{rec.positions.front()[0], rec.momenta.front()[0]};
    const Phase zT = characteristics_flow(tb.kernel, tb.traj, z0, 0.0, 1.0);
    CHECK(norm(zT.q - rec.positions.back()[0]) < 1e-12);
    CHECK(norm(zT.p - rec.momenta.back()[0]) < 1e-12);
}

TEST_CASE("time reversal inverts the flow to roundoff") {
    TwoBody tb;
    const Phase z0{{0.3, 0.4, -0.2}, {0.1, 0.0, 0.05}};
    const Phase fwd = characteristics_flow(tb.kernel, tb.traj, z0, 0.0, 1.0);
    const Phase back = characteristics_flow(tb.kernel, tb.traj, fwd, 1.0, 0.0);
    CHECK(phase_dist(back, z0) < 1e-12);
}

TEST_CASE("flow jacobian determinant equals one") {
    SUBCASE("free flow, exactly") {
        RegularizationKernel k(0.5);
        WeightedPointMeasure mu0;
        mu0.add({{0, 0, 0}, {0, 0, 0}}, 1.0);
        WaveField zero(32, 4.0);
        const auto traj = free_evolution(k, mu0, zero, 1.0, 0.05, 4);
        const double det = flow_jacobian_check(k, traj, {{0.1, 0, 0}, {0.2, 0.1, 0}}, 1.0);
        CHECK(det == doctest::Approx(1.0).epsilon(1e-9));
        const double det0 = flow_jacobian_check(k, traj, {{0.1, 0, 0}, {0.2, 0.1, 0}}, 0.0);
        CHECK(det0 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("two-body field trajectory") {
        TwoBody tb;
        for (const Phase z0 : {Phase{{0.5, 0.2, 0.1}, {0.05, -0.1, 0.0}},
                               Phase{{-0.3, 0.6, -0.4}, {0.0, 0.1, 0.1}}}) {
            const double det = flow_jacobian_check(tb.kernel, tb.traj, z0, 1.0);
            CHECK(det == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
}

TEST_CASE("apply_F at t = 0 returns the initial data exactly") {
    TwoBody tb;
    WeightedPointMeasure mu0;
    mu0.add({tb.result.record.positions.front()[0], tb.result.record.momenta.front()[0]}, 0.5);
    mu0.add({tb.result.record.positions.front()[1], tb.result.record.momenta.front()[1]}, 0.5);
    WaveField zeta0(tb.traj.grid_n, tb.traj.halfwidth);
    zeta0.psi = tb.traj.psi.front();
    zeta0.pi = tb.traj.pi.front();
    zeta0.analytic_tail = tb.traj.tail;
    zeta0.tail_mass = tb.traj.tail_mass;
    const auto out = apply_F(tb.kernel, tb.traj, mu0, zeta0);
    CHECK(out.times.front() == 0.0);
    CHECK(phase_dist(out.measures.front().points[0], mu0.points[0]) == 0.0);
    ScalarGrid d = out.psi.front();
    d -= tb.traj.psi.front();
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.data()[i] == 0.0);
}

TEST_CASE("a converged trajectory is nearly a fixed point of F") {
    TwoBody tb(1.0, 0.05, 64, 4.5);
    const auto traj4 = trajectory_from_run(tb.result.record, 4);
    WeightedPointMeasure mu0 = traj4.measures.front();
    WaveField zeta0(traj4.grid_n, traj4.halfwidth);
    zeta0.psi = traj4.psi.front();
    zeta0.pi = traj4.pi.front();
    zeta0.analytic_tail = traj4.tail;
    zeta0.tail_mass = traj4.tail_mass;
    const auto out = apply_F(tb.kernel, traj4, mu0, zeta0);
    const double resid = weighted_supnorm(out, traj4, 1.0);
    CHECK(resid < 5e-3);
    // pushforward preserves mass exactly
    for (const auto& m : out.measures)
        CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weighted sup-norm") {
    TwoBody tb;
    CHECK(weighted_supnorm(tb.traj, tb.traj, 1.0) == 0.0);
    // two singleton free-streaming trajectories: closed form
    RegularizationKernel k(0.5);
    WaveField zero(32, 4.0);
    WeightedPointMeasure a, b;
    a.add({{0.1, 0, 0}, {0.3, 0, 0}}, 1.0);
    b.add({{-0.1, 0, 0}, {0.3, 0, 0}}, 1.0);
    const auto ta = free_evolution(k, a, zero, 1.0, 0.05, 4);
    const auto tbj = free_evolution(k, b, zero, 1.0, 0.05, 4);
    // both stream with the same velocity: distance stays 0.2 at all times,
    // so the norm is attained at t = 0
    const double w = 2.0;
    CHECK(weighted_supnorm(ta, tbj, w) == doctest::Approx(0.2).epsilon(1e-12));
    // large w limit: only t = 0 survives
    CHECK(weighted_supnorm(ta, tbj, 50.0) == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("picard iteration contracts from the free seed") {
    RegularizationKernel k(0.4, 8, 2048);
    SamplerSpec law;
    law.kind = "ring";
    const auto atoms = sample_quadrature(law, 48);
    WeightedPointMeasure mu0 = empirical(atoms);
    const WaveField zeta0 = init_ground_field(k, atoms, 32, 4.0, 1.25);
    SystemState probe{const_cast<ParticleEnsemble&>(atoms), zeta0};
    const double E0 = functionals(k, probe).energy;
    const double w = picard_weight_threshold(k.constants().c_rho, E0,
                                             ground_state_energy(k));
    const auto log = picard_iterate(k, mu0, zeta0, w, 1.2, 0.1, 3, 4);
    REQUIRE(log.gaps.size() == 4);
    CHECK(log.gaps.front() > 0.0);
    for (double r : log.ratios) CHECK(r < 1.0);
    CHECK(log.contraction);
    CHECK_FALSE(log.truncation_activated);
}

TEST_CASE("stationary data is a fixed point up to discretization") {
    RegularizationKernel k(0.75, 8, 2048);
    ParticleEnsemble e = ParticleEnsemble::uniform({{0, 0, 0}}, {{0, 0, 0}});
    WeightedPointMeasure mu0 = empirical(e);
    const WaveField zeta0 = init_ground_field(k, e, 48, 3.0, 1.0);
    const auto log = picard_iterate(k, mu0, zeta0, 2.0, 0.8, 0.05, 4, 2);
    REQUIRE(log.gaps.size() == 2);
    // after one application the iterate is the (discrete) static solution
    CHECK(log.gaps[1] < 5e-3);
}

TEST_CASE("flow Lipschitz bound from the field cap") {
    TwoBody tb;
    double c_psi = 0.0;
    for (std::size_t s = 0; s < tb.traj.samples(); ++s) {
        WaveField f(tb.traj.grid_n, tb.traj.halfwidth);
        f.psi = tb.traj.psi[s];
        f.analytic_tail = tb.traj.tail;
        f.tail_mass = tb.traj.tail_mass;
        c_psi = std::max(c_psi, psi_h1_norm(f));
    }
    const double lam = flow_lipschitz_bound(tb.kernel.constants().c_rho, c_psi, 1.0);
    Philox rng(8);
    for (int it = 0; it < 20; ++it) {
        const Phase z0{{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)},
                       {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)}};
        Phase z1 = z0;
        z1.q.x += rng.uniform(-0.05, 0.05);
        z1.p.y += rng.uniform(-0.05, 0.05);
        const Phase f0 = characteristics_flow(tb.kernel, tb.traj, z0, 0.0, 1.0);
        const Phase f1 = characteristics_flow(tb.kernel, tb.traj, z1, 0.0, 1.0);
        CHECK(phase_dist(f0, f1) <= lam * phase_dist(z0, z1) * (1.0 + 1e-9));
    }

    // pushforward contraction for measures through the flow
    WeightedPointMeasure mu, nu;
    for (int i = 0; i < 5; ++i) {
        mu.add({{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0},
                {rng.uniform(-0.1, 0.1), 0, 0}},
               0.2);
        nu.add({{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0},
                {rng.uniform(-0.1, 0.1), 0, 0}},
               0.2);
    }
    auto push = [&](const WeightedPointMeasure& m) {
        WeightedPointMeasure out = m;
        for (auto& z : out.points) z = characteristics_flow(tb.kernel, tb.traj, z, 0.0, 1.0);
        return out;
    };
    CHECK(kr_distance(push(mu), push(nu)) <= lam * kr_distance(mu, nu) * (1.0 + 1e-9));
}

TEST_CASE("initial-data stability scales linearly in the perturbation") {
    RegularizationKernel k(0.4, 8, 2048);
    SamplerSpec law;
    law.kind = "ring";
    const auto atoms = sample_quadrature(law, 32);
    const WaveField zeta0 = init_ground_field(k, atoms, 32, 4.0, 1.25);

    auto perturbed_traj = [&](double delta) {
        ParticleEnsemble ens = atoms;
        for (std::size_t i = 0; i < ens.size(); ++i)
            ens.q[i].x += delta * std::sin(7.0 * static_cast<double>(i));
        ParticleEnsemble run = ens;
        SystemState st{run, zeta0};
        RunOptions opt;
        opt.dt = 0.1;
        opt.T = 1.0;
        opt.record_fields = false;
        opt.record_particles = true;
        auto res = run_coupled(k, st, opt);
        WeightedPointMeasure m;
        m.weights = res.record.weights;
        for (std::size_t i = 0; i < res.record.weights.size(); ++i)
            m.points.push_back({res.record.positions.back()[i], res.record.momenta.back()[i]});
        return std::pair{empirical(ens), m};
    };
    const auto base = perturbed_traj(0.0);
    const auto small = perturbed_traj(0.01);
    const auto big = perturbed_traj(0.02);
    const double d0s = kr_distance(base.first, small.first);
    const double dts = kr_distance(base.second, small.second);
    const double d0b = kr_distance(base.first, big.first);
    const double dtb = kr_distance(base.second, big.second);
    // doubling the initial distance at most doubles the final distance
    // (up to the nonlinear remainder)
    CHECK(d0b == doctest::Approx(2.0 * d0s).epsilon(1e-6));
    CHECK(dtb <= 2.0 * dts * 1.25);
    CHECK(dts / d0s < 10.0); // growth stays bounded on the short horizon
}
