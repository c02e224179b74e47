#include "premia/errors.hpp"
#include "premia/ode.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace premia;

TEST(DormandPrince, ExponentialDecay) {
    const double a = 0.127 * 0.5;
    auto f = [a](double, const ode::State<1>& y) { return ode::State<1>{-a * y[0]}; };
    const auto r = ode::integrate<1>(f, 0.0, {1.0}, 10.0);
    EXPECT_EQ(r.status, ode::Status::completed);
    EXPECT_DOUBLE_EQ(r.t_end(), 10.0);
    EXPECT_NEAR(r.eval(10.0)[0], std::exp(-0.635), 1e-10);
    for (double t : {0.0, 0.37, 2.5, 7.77, 9.999}) EXPECT_NEAR(r.eval(t)[0], std::exp(-a * t), 1e-10);
}

TEST(DormandPrince, HarmonicOscillatorDenseOutput) {
    auto f = [](double, const ode::State<2>& y) { return ode::State<2>{y[1], -y[0]}; };
    ode::Options o;
    o.rtol = o.atol = 1e-11;
    const double T = 2.0 * std::numbers::pi;
    const auto r = ode::integrate<2>(f, 0.0, {0.0, 1.0}, T, o);
    for (int i = 0; i <= 200; ++i) {
        const double t = T * i / 200.0;
        const auto y = r.eval(t);
        EXPECT_NEAR(y[0], std::sin(t), 1e-9);
        EXPECT_NEAR(y[1], std::cos(t), 1e-9);
    }
}

TEST(DormandPrince, NonAutonomousForcing) {
    // y' = -rho y + e^{-2 alpha t}/2, y(0) = 0, whose solution is known in closed form.
    const double rho = 1.11, alpha = 0.127;
    auto f = [&](double t, const ode::State<1>& y) {
        return ode::State<1>{-rho * y[0] + 0.5 * std::exp(-2.0 * alpha * t)};
    };
    const auto r = ode::integrate<1>(f, 0.0, {0.0}, 20.0);
    for (double t : {0.5, 1.0, 5.0, 20.0}) {
        const double want = std::exp(-rho * t) * (1.0 - std::exp(-(2 * alpha - rho) * t)) /
                            (2.0 * (2 * alpha - rho));
        EXPECT_NEAR(r.eval(t)[0], want, 1e-10);
    }
}

TEST(DormandPrince, GuardStopsBeforeBlowUp) {
    auto f = [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; };
    const auto r = ode::integrate<1>(f, 0.0, {1.0}, 2.0, {},
                                     [](double, const ode::State<1>& y) { return y[0] > 1e3; });
    EXPECT_EQ(r.status, ode::Status::guard_stop);
    EXPECT_GT(r.stop_time, 0.99);
    EXPECT_LT(r.stop_time, 1.0);
    EXPECT_LE(r.eval(r.t_end())[0], 1e3);
}

TEST(DormandPrince, UnguardedBlowUpThrows) {
    auto f = [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; };
    EXPECT_THROW(ode::integrate<1>(f, 0.0, {1.0}, 2.0), ConvergenceError);
}

TEST(DormandPrince, NonFiniteRightHandSideRejectsStep) {
    // Undefined for y < 0; the solver must shrink steps rather than accept NaNs.
    auto f = [](double, const ode::State<1>& y) {
        return ode::State<1>{y[0] < 0.0 ? std::nan("") : -std::sqrt(y[0]) + 0.1};
    };
    const auto r = ode::integrate<1>(f, 0.0, {1.0}, 50.0);
    EXPECT_NEAR(r.eval(50.0)[0], 0.01, 1e-6);
}
