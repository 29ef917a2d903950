#include <cmath>
#include <vector>

#include <doctest.h>

#include "dabss/errors.hpp"
#include "dabss/pwlti.hpp"
#include "support/test_support.hpp"

using namespace dabss;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++) = x;
    }
    return out;
}

Matrix col(double a, double b) {
    Matrix B(2, 1);
    B << a, b;
    return B;
}

// One-dimensional schedule whose single segment has the given exact map.
// Phi = e^{a T}; Gamma = (b u / a)(e^{a T} - 1).
Schedule scalar_schedule(double phi, double gamma) {
    const double T = 1.0;
    const double a = std::log(phi) / T;
    const double bu = gamma * a / (phi - 1.0);
    Matrix A(1, 1);
    A << a;
    Matrix B(1, 1);
    B << bu;
    return Schedule({{A, B, T}}, vec({1.0}));
}

}  // namespace

TEST_CASE("segment_map with A = 0 integrates the input") {
    const Segment seg{Matrix::Zero(2, 2), col(1.0, 0.0), 2.0};
    const auto m = segment_map(seg, vec({3.0}));
    CHECK((m.Phi - Matrix::Identity(2, 2)).norm() <= 1e-15);
    CHECK((m.Gamma - vec({6.0, 0.0})).norm() <= 1e-14);
}

TEST_CASE("segment_map of a zero-length segment is the identity map") {
    test::Rng rng(1);
    const Segment seg{test::random_stable(rng), col(5.0, -2.0), 0.0};
    const auto m = segment_map(seg, vec({7.0}));
    CHECK(m.Phi == Matrix::Identity(2, 2));
    CHECK(m.Gamma == Vector::Zero(2));
}

TEST_CASE("segment_map Gamma for a diagonal system matches per-channel integration") {
    Matrix A(2, 2);
    A << -1, 0, 0, -2;
    const Segment seg{A, col(1.0, 0.0), 1.0};
    const Vector U = vec({1.0});
    const auto m = segment_map(seg, U);
    // int_0^1 e^{-(1 - tau)} dtau = 1 - e^{-1}
    const Vector expected = vec({1.0 - std::exp(-1.0), 0.0});
    CHECK((m.Gamma - expected).norm() <= 1e-15);
    CHECK((gamma_by_inverse(seg, U) - expected).norm() <= 1e-15);
}

TEST_CASE("segment_map stays exact for singular A") {
    // double integrator: Gamma = [b T^2 / 2, b T]
    Matrix A(2, 2);
    A << 0, 1, 0, 0;
    const Segment seg{A, col(0.0, 2.0), 3.0};
    const auto m = segment_map(seg, vec({1.0}));
    CHECK((m.Gamma - vec({9.0, 6.0})).norm() <= 1e-13);
}

TEST_CASE("segment_map rejects inconsistent shapes") {
    const Segment seg{Matrix::Zero(2, 2), Matrix::Zero(3, 1), 1.0};
    CHECK_THROWS_AS((void)segment_map(seg, vec({1.0})), DimensionError);
    const Segment seg2{Matrix::Zero(2, 2), Matrix::Zero(2, 2), 1.0};
    CHECK_THROWS_AS((void)segment_map(seg2, vec({1.0})), DimensionError);
    const Segment seg3{Matrix::Zero(2, 2), Matrix::Zero(2, 1), -1.0};
    CHECK_THROWS_AS((void)segment_map(seg3, vec({1.0})), ParameterError);
}

TEST_CASE("Gamma composes across a split interval") {
    test::Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix A = test::random_stable(rng);
        const Matrix B = col(rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4));
        const Vector U = vec({rng.uniform(-10, 10)});
        const double ta = rng.uniform(0.0, 1e-4);
        const double tb = rng.uniform(0.0, 1e-4);
        const auto whole = segment_map({A, B, ta + tb}, U);
        const auto first = segment_map({A, B, ta}, U);
        const auto second = segment_map({A, B, tb}, U);
        const Vector gamma = second.Phi * first.Gamma + second.Gamma;
        const Matrix phi = second.Phi * first.Phi;
        CHECK((whole.Gamma - gamma).norm() <= 1e-12 * whole.Gamma.norm());
        CHECK((whole.Phi - phi).norm() <= 1e-12 * whole.Phi.norm());
    }
}

TEST_CASE("augmented Gamma matches the inverse formula for well-conditioned A") {
    test::Rng rng(3);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix A = test::random_stable(rng);
        const Segment seg{A, col(rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)), rng.uniform(1e-7, 1e-4)};
        const Vector U = vec({rng.uniform(-10, 10)});
        if (A.norm() * A.inverse().norm() >= 1e8) {
            continue;
        }
        ++checked;
        const Vector aug = segment_map(seg, U).Gamma;
        const Vector inv = gamma_by_inverse(seg, U);
        CHECK(test::rel_err(aug, inv) <= 1e-10);
    }
    CHECK(checked > 50);
}

TEST_CASE("reverse_product ordering and ranges") {
    Matrix P1(2, 2);
    P1 << 1, 1, 0, 1;
    Matrix P2(2, 2);
    P2 << 1, 0, 1, 1;
    const std::vector<Matrix> phis{P1, P2};
    Matrix expected(2, 2);
    expected << 1, 1, 1, 2;
    CHECK(reverse_product(phis, 1, 2) == expected);
    CHECK(reverse_product(phis, 1, 1) == P1);
    CHECK(reverse_product(phis, 2, 2) == P2);

    const std::vector<Matrix> identities(4, Matrix::Identity(2, 2));
    CHECK(reverse_product(identities, 1, 4) == Matrix::Identity(2, 2));

    CHECK_THROWS_AS((void)reverse_product(phis, 2, 1), RangeError);
    CHECK_THROWS_AS((void)reverse_product(phis, 0, 1), RangeError);
    CHECK_THROWS_AS((void)reverse_product(phis, 1, 3), RangeError);
    CHECK_THROWS_AS((void)reverse_product(std::vector<Matrix>{}, 1, 1), RangeError);
}

TEST_CASE("propagate with an identity map returns the initial state") {
    const Segment seg{Matrix::Zero(2, 2), col(0.0, 0.0), 1.0};
    const Schedule s({seg}, vec({1.0}));
    const Vector v = vec({3.0, -4.0});
    const auto states = propagate(s, v);
    REQUIRE(states.size() == 1);
    CHECK(states[0] == v);
    CHECK_THROWS_AS((void)propagate(s, vec({1.0})), DimensionError);
    CHECK_THROWS_AS((void)closed_form_state(s, vec({1.0, 2.0, 3.0})), DimensionError);
}

TEST_CASE("four-step propagation matches the explicit expansion term by term") {
    test::Rng rng(4);
    const Schedule s = test::random_schedule(rng, 4);
    const Vector X0 = vec({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    const auto& m = s.maps();
    const Vector X4 = m[3].Phi * m[2].Phi * m[1].Phi * m[0].Phi * X0 + m[3].Phi * m[2].Phi * m[1].Phi * m[0].Gamma +
                      m[3].Phi * m[2].Phi * m[1].Gamma + m[3].Phi * m[2].Gamma + m[3].Gamma;
    const auto states = propagate(s, X0);
    CHECK(test::rel_err(states[3], X4) <= 1e-13);
    CHECK(test::rel_err(closed_form_state(s, X0), X4) <= 1e-13);
    const Vector X2 = m[1].Phi * m[0].Phi * X0 + m[1].Phi * m[0].Gamma + m[1].Gamma;
    CHECK(test::rel_err(states[1], X2) <= 1e-13);
}

TEST_CASE("closed form of a single segment") {
    test::Rng rng(5);
    const Schedule s = test::random_schedule(rng, 1);
    const Vector X0 = vec({1.5, -0.5});
    const Vector expected = s.maps()[0].Phi * X0 + s.maps()[0].Gamma;
    CHECK(test::rel_err(closed_form_state(s, X0), expected) <= 1e-15);
}

TEST_CASE("closed form equals iteration at every index") {
    test::Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 6);
        const Schedule s = test::random_schedule(rng, n);
        const Vector X0 = vec({rng.uniform(-100, 100), rng.uniform(-100, 100)});
        const auto states = propagate(s, X0);
        for (int i = 1; i <= n; ++i) {
            const std::vector<Segment> prefix(s.segments().begin(), s.segments().begin() + i);
            const Schedule sub(prefix, s.input());
            const Vector closed = closed_form_state(sub, X0);
            CHECK((closed - states[static_cast<std::size_t>(i - 1)]).norm() <=
                  1e-12 * std::max(closed.norm(), states[static_cast<std::size_t>(i - 1)].norm()) + 1e-14);
        }
    }
}

TEST_CASE("periodic fixed point of a scalar contraction") {
    const Schedule s = scalar_schedule(0.5, 1.0);
    const Vector x = solve_periodic_fixed_point(s);
    CHECK(x(0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("periodic fixed point with a vanishing monodromy is the forcing sum") {
    // damping strong enough that Pi underflows to exactly zero
    Matrix A = Matrix::Identity(2, 2) * -1e4;
    const Schedule s({{A, col(1.0, 2.0), 1.0}, {A, col(-3.0, 1.0), 1.0}}, vec({1.0}));
    REQUIRE(monodromy(s).norm() == 0.0);
    const Vector x = solve_periodic_fixed_point(s);
    CHECK(test::rel_err(x, periodic_forcing(s)) <= 1e-15);
}

TEST_CASE("periodic fixed point residual on random stable schedules") {
    test::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Schedule s = test::random_schedule(rng, rng.integer(1, 6));
        const Vector x = solve_periodic_fixed_point(s);
        CHECK((closed_form_state(s, x) - x).norm() <= 1e-10 * (1.0 + x.norm()));
    }
}

TEST_CASE("marginal system reports the monodromy eigenvalues") {
    const Schedule s({{Matrix::Zero(2, 2), col(1.0, 0.0), 1.0}}, vec({1.0}));
    try {
        (void)solve_periodic_fixed_point(s);
        FAIL("expected MarginalSystemError");
    } catch (const MarginalSystemError& e) {
        REQUIRE(e.eigenvalues().size() == 2);
        CHECK(std::abs(e.eigenvalues()[0] - 1.0) < 1e-15);
        CHECK(std::abs(e.eigenvalues()[1] - 1.0) < 1e-15);
    }

    // eigenvalue 1 - 1e-14: condition ~1e14 exceeds the default limit
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = std::log1p(-1e-14);
    A(1, 1) = -1.0;
    const Schedule near({{A, col(1.0, 1.0), 1.0}}, vec({1.0}));
    CHECK_THROWS_AS((void)solve_periodic_fixed_point(near), MarginalSystemError);
    Tolerances loose;
    loose.condition_limit = 1e16;
    CHECK_NOTHROW((void)solve_periodic_fixed_point(near, loose));
}

TEST_CASE("monodromy special cases") {
    const Schedule zero({{Matrix::Zero(2, 2), col(1.0, 0.0), 1.0}, {Matrix::Zero(2, 2), col(0.0, 1.0), 2.0}},
                        vec({1.0}));
    CHECK(monodromy(zero) == Matrix::Identity(2, 2));

    test::Rng rng(8);
    const Schedule one = test::random_schedule(rng, 1);
    CHECK(monodromy(one) == one.maps()[0].Phi);

    const auto dab = build_dab(test::reference_params());
    CHECK(spectral_radius(monodromy(dab.schedule)) < 1.0);
}

TEST_CASE("schedule invariants") {
    CHECK_THROWS_AS(Schedule({}, vec({1.0})), ParameterError);
    const Segment a{Matrix::Zero(2, 2), col(1.0, 0.0), 1.0};
    const Segment b{Matrix::Zero(3, 3), Matrix::Zero(3, 1), 1.0};
    CHECK_THROWS_AS(Schedule({a, b}, vec({1.0})), DimensionError);
    CHECK_NOTHROW(Schedule({a, a}, vec({1.0}), 2.0));
    CHECK_THROWS_AS(Schedule({a, a}, vec({1.0}), 2.0 + 1e-9), ParameterError);

    // zero-length segments stay in place
    const Segment z{Matrix::Zero(2, 2), col(1.0, 0.0), 0.0};
    const Schedule s({a, z, a}, vec({1.0}));
    CHECK(s.size() == 3);
    CHECK(s.maps()[1].Phi == Matrix::Identity(2, 2));
}
