#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "contactnav/dynamics.hpp"
#include "contactnav/observer.hpp"
#include "contactnav/simulator.hpp"
#include "support.hpp"

using namespace testing;

namespace {

// Closed-form inertia of two uniform rods with relative joint angles.
MatX two_link_inertia(double m1, double m2, double l1, double l2, double q2) {
    const double c = std::cos(q2);
    MatX H(2, 2);
    H(0, 0) = m1 * l1 * l1 / 3 + m2 * (l1 * l1 + l2 * l2 / 3 + l1 * l2 * c);
    H(0, 1) = H(1, 0) = m2 * (l2 * l2 / 3 + l1 * l2 * c / 2);
    H(1, 1) = m2 * l2 * l2 / 3;
    return H;
}

// Potential energy of the rods' centers of mass.
double potential(const ArmModel& arm, const VecX& q, const Vec2& gravity) {
    const auto pts = forward_kinematics(arm, q);
    double V = 0;
    for (int i = 0; i < arm.links(); ++i) V -= arm.link_masses[i] * gravity.dot(0.5 * (pts[i] + pts[i + 1]));
    return V;
}

GroundTruthGrid wall_world(const GridSpec& s, int column) {
    GroundTruthGrid g(s);
    for (int j = 0; j < s.dims[1]; ++j) g.set_occupied(s.index({column, j}), 1);
    return g;
}

DynParams quiet() {
    DynParams d;
    d.torque_noise_std = 0.0;
    return d;
}

}  // namespace

TEST_CASE("inertia matches two-rod closed form") {
    ArmModel arm = two_link_arm();
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        const VecX q = random_angles(arm, rng);
        const MatX H = inertia_matrix(arm, q);
        const MatX ref = two_link_inertia(1.0, 0.7, 0.3, 0.25, q[1]);
        CHECK((H - ref).norm() < 1e-12);
    }
}

TEST_CASE("single-link pendulum") {
    ArmModel arm;
    arm.link_lengths = {0.5};
    arm.link_masses = {2.0};
    arm.joint_range = {{-1, 1}};
    VecX q(1);
    q << 0.3;
    CHECK(inertia_matrix(arm, q)(0, 0) == doctest::Approx(2.0 * 0.25 / 3));
    CHECK(gravity_torque(arm, q, Vec2(0, -9.81))[0] == doctest::Approx(2.0 * 9.81 * 0.25 * std::cos(0.3)));
    VecX v(1), a(1);
    v << 1.7;
    a << -0.4;
    CHECK(coriolis_matrix(arm, q, v)(0, 0) == doctest::Approx(0.0));
    CHECK(inverse_dynamics(arm, q, v, a, Vec2(0, -9.81))[0] ==
          doctest::Approx(2.0 * 0.25 / 3 * -0.4 + 2.0 * 9.81 * 0.25 * std::cos(0.3)));
}

TEST_CASE("trapezoid profile endpoints") {
    CHECK(trapezoid(0.0, 0.25).s == doctest::Approx(0.0));
    CHECK(trapezoid(1.0, 0.25).s == doctest::Approx(1.0));
    CHECK(trapezoid(0.5, 0.25).s == doctest::Approx(0.5));
    CHECK(trapezoid(0.0, 0.25).ds == doctest::Approx(0.0));
    CHECK(trapezoid(1.0, 0.25).ds == doctest::Approx(0.0));
}

TEST_CASE("friction cone membership") {
    const Vec2 n(0, 1);
    CHECK(in_friction_cone(Vec2(0, -1), n, 0.5));
    CHECK(in_friction_cone(Vec2(0.5, -1), n, 0.5));
    CHECK_FALSE(in_friction_cone(Vec2(0.6, -1), n, 0.5));
    CHECK_FALSE(in_friction_cone(Vec2(0, 1), n, 0.5));
}

TEST_CASE("free edge in an empty world") {
    const ArmModel arm = two_link_arm();
    const GroundTruthGrid world(small_grid());
    const DynParams dyn = quiet();
    const ExecutionTrace tr = simulate_edge(world, arm, dyn, config_of({3, 3}), config_of({3, 4}), 7);
    CHECK(tr.completed());
    CHECK(tr.samples.size() == static_cast<std::size_t>(dyn.edge_duration * dyn.sample_rate));
    CHECK(tr.certified_cells == swept_cells(arm, config_of({3, 3}), config_of({3, 4}), world.spec()));
    for (const auto& t : tr.truth) CHECK_FALSE(t.in_contact);
    const auto& last = tr.samples.back();
    CHECK((last.q - joint_angles(arm, config_of({3, 4}))).norm() < 1e-2);
}

TEST_CASE("edge into a wall stops at the first penetrating substep") {
    const ArmModel arm = two_link_arm();
    const GridSpec s = small_grid();
    const GroundTruthGrid world = wall_world(s, 14);
    // Sweep joint 0 from pointing up towards the wall on the right.
    Config from = config_of({4, 4});
    Config to = config_of({3, 4});
    bool found = false;
    for (int step = 7; step > 0 && !found; --step) {
        from = config_of({step, 4});
        to = config_of({step - 1, 4});
        if (world.intersects(robot_cells(arm, from, s))) continue;
        found = world.intersects(swept_cells(arm, from, to, s));
    }
    REQUIRE(found);
    const ExecutionTrace tr = simulate_edge(world, arm, quiet(), from, to, 3);
    REQUIRE(tr.contact.has_value());
    CHECK(world.occupied(tr.contact->cell));
    CHECK_FALSE(world.intersects(tr.certified_cells));
}

TEST_SUITE("properties") {
    TEST_CASE("dynamics: inertia is symmetric positive definite") {
        const ArmModel arm = three_link_arm();
        Rng rng(31);
        for (int k = 0; k < 100; ++k) {
            const MatX H = inertia_matrix(arm, random_angles(arm, rng));
            CHECK((H - H.transpose()).norm() < 1e-12);
            const Eigen::SelfAdjointEigenSolver<MatX> es(H);
            CHECK(es.eigenvalues().minCoeff() > 0);
        }
    }

    TEST_CASE("dynamics: inertia derivatives and gravity match finite differences") {
        const ArmModel arm = three_link_arm();
        const Vec2 g(0, -9.81);
        Rng rng(32);
        const double h = 1e-6;
        for (int k = 0; k < 30; ++k) {
            const VecX q = random_angles(arm, rng);
            const auto dH = inertia_derivatives(arm, q);
            const VecX gq = gravity_torque(arm, q, g);
            for (int c = 0; c < arm.links(); ++c) {
                VecX qp = q, qm = q;
                qp[c] += h;
                qm[c] -= h;
                const MatX fd = (inertia_matrix(arm, qp) - inertia_matrix(arm, qm)) / (2 * h);
                CHECK((dH[c] - fd).norm() < 1e-6);
                const double dV = (potential(arm, qp, g) - potential(arm, qm, g)) / (2 * h);
                CHECK(gq[c] == doctest::Approx(dV).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("dynamics: dH/dt - 2C is skew-symmetric") {
        const ArmModel arm = three_link_arm();
        Rng rng(33);
        for (int k = 0; k < 100; ++k) {
            const VecX q = random_angles(arm, rng);
            VecX v(arm.links());
            for (int j = 0; j < arm.links(); ++j) v[j] = rng.uniform(-2, 2);
            const auto dH = inertia_derivatives(arm, q);
            MatX Hdot = MatX::Zero(arm.links(), arm.links());
            for (int c = 0; c < arm.links(); ++c) Hdot += dH[c] * v[c];
            const MatX N = Hdot - 2 * coriolis_matrix(arm, q, v);
            CHECK((N + N.transpose()).norm() < 1e-10);
        }
    }

    TEST_CASE("dynamics: first contact is the earliest penetrating substep") {
        const auto t = reference_template(Domain::Pipe);
        const Lattice lat(t.arm);
        Rng rng(34);
        int contacts = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const Scenario sc = instantiate(t, seed);
            for (int k = 0; k < 20; ++k) {
                const Config q = random_config(sc.arm, rng);
                if (sc.world.intersects(robot_cells(sc.arm, q, sc.world.spec()))) continue;
                const int a = static_cast<int>(rng.uniform_int(0, lat.actions() - 1));
                const StateIndex n = lat.neighbor(lat.index(q), a);
                if (n < 0) continue;
                const Config q2 = lat.config(n);
                SimOptions geo;
                geo.proprioception = false;
                const ExecutionTrace tr = simulate_edge(sc.world, sc.arm, sc.dyn, q, q2, seed, geo);
                const int K = sc.dyn.substeps;
                int first = 0;
                for (int i = 1; i <= K && first == 0; ++i)
                    if (sc.world.intersects(robot_cells(sc.arm, interpolate_angles(sc.arm, q, q2, double(i) / K),
                                                        sc.world.spec())))
                        first = i;
                CHECK(tr.completed() == (first == 0));
                if (!tr.contact) continue;
                ++contacts;
                CHECK(tr.contact->substep == first);
                CHECK(sc.world.occupied(tr.contact->cell));
                CHECK_FALSE(sc.world.intersects(tr.certified_cells));
                CHECK(in_friction_cone(tr.contact->force, tr.contact->point.normal, sc.dyn.friction_mu, 1e-9));
                CHECK(tr.contact->force.norm() >= sc.dyn.force_min - 1e-9);
                CHECK(tr.contact->force.norm() <= sc.dyn.force_max + 1e-9);
            }
        }
        CHECK(contacts >= 10);
    }

    TEST_CASE("dynamics: noise-free observer stays quiet in free motion and converges to J^T F in contact") {
        const auto t = reference_template(Domain::Pipe);
        DynParams dyn = t.dyn;
        dyn.torque_noise_std = 0.0;
        dyn.friction_mu = 0.0;
        const double settle = 1.0 / dyn.gain(t.arm.links()).minCoeff();
        const Lattice lat(t.arm);
        Rng rng(35);
        int checked_free = 0, checked_contact = 0;
        for (std::uint64_t seed = 0; seed < 80; ++seed) {
            const Scenario sc = instantiate(t, seed);
            const Config q = random_config(sc.arm, rng);
            if (sc.world.intersects(robot_cells(sc.arm, q, sc.world.spec()))) continue;
            const StateIndex n = lat.neighbor(lat.index(q), static_cast<int>(rng.uniform_int(0, lat.actions() - 1)));
            if (n < 0) continue;
            const ExecutionTrace tr = simulate_edge(sc.world, sc.arm, dyn, q, lat.config(n), seed);
            const auto r = run_observer(tr.samples, sc.arm, dyn);
            double free_max = 0;
            for (std::size_t i = 0; i < r.size(); ++i)
                if (!tr.truth[i].in_contact && tr.samples[i].t >= tr.samples.front().t + settle) free_max = std::max(free_max, r[i].cwiseAbs().maxCoeff());
            if (tr.completed()) {
                CHECK(free_max < 1e-6);
                ++checked_free;
            } else {
                const VecX err = r.back() - tr.truth.back().tau_ext;
                CHECK(err.cwiseAbs().maxCoeff() < 1e-6);
                ++checked_contact;
            }
        }
        CHECK(checked_free > 0);
        CHECK(checked_contact > 0);
    }
}
