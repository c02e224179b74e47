#include "premia/admissibility.hpp"
#include "premia/errors.hpp"
#include "premia/special.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace premia;

namespace {

const SubordinatorSpec kDirac = SubordinatorSpec::dirac(1.0);
const SubordinatorSpec kCp = SubordinatorSpec::cp_exp(0.4, 2.0);
const SubordinatorSpec kTs = SubordinatorSpec::tempered_stable(1.0, 3.0, 0.5);
constexpr double kRho = 1.11;
constexpr double kHalf = 0.5;

// Lambda assembled from quadrature values of kappa' and kappa''.
double oracle_lambda(const SubordinatorSpec& s, double theta, double beta, double a, double rho,
                     double u) {
    auto z1 = [](double z) { return z; };
    auto z2 = [](double z) { return z * z; };
    const double k1u = levy_quadrature_oracle(s, z1, theta + u);
    const double k1 = levy_quadrature_oracle(s, z1, theta);
    const double k2 = levy_quadrature_oracle(s, z2, theta);
    return -rho * u + a + rho * beta / k2 * (k1u - k1);
}

// Argmin of Lambda as the zero of Lambda' = -rho + rho beta kappa''(theta+u)/kappa''(theta),
// with kappa'' from the quadrature oracle.
double oracle_argmin(const SubordinatorSpec& s, double theta, double beta) {
    auto z2 = [](double z) { return z * z; };
    const double k2 = levy_quadrature_oracle(s, z2, theta);
    auto dlam = [&](double u) { return -1.0 + beta * levy_quadrature_oracle(s, z2, theta + u) / k2; };
    // Walk towards Theta_L - theta until Lambda' turns positive.
    const double top = std::isfinite(theta_max(s)) ? theta_max(s) - theta : 100.0;
    double hi = 0.5 * top;
    for (double gap = 0.25; dlam(hi) <= 0.0; gap *= 0.5) hi = top * (1.0 - gap);
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(
        dlam, 0.0, hi, [](double x, double y) { return std::abs(x - y) < 1e-13; }, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

TEST(Validate, MeasureChange) {
    EXPECT_NO_THROW(validate(MeasureChange{0.1, -5.0, 0.45, 0.45}, kCp, true));
    EXPECT_THROW(validate(MeasureChange{0.0, 1.0, 0.0, 0.0}, kCp), ValidationError);
    EXPECT_THROW(validate(MeasureChange{0.0, 0.0, 1.2, 0.0}, kCp), ValidationError);
    EXPECT_THROW(validate(MeasureChange{0.0, 0.0, 0.0, -0.1}, kCp), ValidationError);
    EXPECT_NO_THROW(validate(MeasureChange{0.0, 0.0, 1.0, 0.0}, kCp, false));
    EXPECT_THROW(validate(MeasureChange{0.0, 0.0, 1.0, 0.0}, kCp, true), ValidationError);
    try {
        validate(MeasureChange{0.0, 1.0, 0.0, 0.0}, kCp);
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("D_L"), std::string::npos);
    }
}

TEST(Validate, ModelAndState) {
    ModelParams p;
    EXPECT_NO_THROW(validate(p));
    p.alpha = 0.0;
    EXPECT_THROW(validate(p), ValidationError);
    p = ModelParams{};
    p.seasonal_g = Seasonal::sine(1.0, 1.5, 365.0);
    EXPECT_THROW(validate(p), ValidationError);
    p.seasonal_g = Seasonal::sine(2.0, 0.5, 365.0);
    EXPECT_NO_THROW(validate(p));
    EXPECT_NEAR(p.seasonal_g(365.0 / 4.0), 2.5, 1e-15);
    EXPECT_THROW(validate(MarketState{0.0, 1.0, -0.1}), ValidationError);
    EXPECT_NO_THROW(validate(MarketState{0.0, 1.0, 0.0}));
}

TEST(LambdaFn, Examples) {
    EXPECT_EQ(lambda_fn(kCp, 0.0, 0.3, kHalf, kRho, 0.0), kHalf);
    EXPECT_NEAR(lambda_fn(kCp, 0.0, 0.0, kHalf, kRho, kHalf / kRho), 0.0, 1e-12);
    EXPECT_NEAR(kHalf / kRho, 0.45045045045045046, 1e-16);
    EXPECT_NEAR(oracle_lambda(kCp, 0.0, 0.125, kHalf, kRho, 1.0), -0.19375, 1e-10);
    EXPECT_NEAR(lambda_fn(kCp, 0.0, 0.125, kHalf, kRho, 1.0), -0.19375, 1e-14);
    EXPECT_THROW(lambda_fn(kCp, 0.0, 0.1, kHalf, kRho, 2.0), DomainError);
}

TEST(LambdaFn, MatchesOracleAcrossFamilies) {
    for (const auto& s : {kDirac, kCp, kTs}) {
        for (double u : {0.1, 0.5, 0.9}) {
            EXPECT_NEAR(lambda_fn(s, -1.0, 0.3, kHalf, kRho, u), oracle_lambda(s, -1.0, 0.3, kHalf, kRho, u),
                        1e-9);
        }
    }
}

TEST(UMin, Examples) {
    EXPECT_NEAR(u_min(kCp, 0.0, 0.125), 1.0, 1e-15);
    EXPECT_NEAR(oracle_argmin(kCp, 0.0, 0.125), 1.0, 1e-9);
    EXPECT_NEAR(u_min(kDirac, 0.0, std::exp(-1.0)), 1.0, 1e-15);
    EXPECT_NEAR(oracle_argmin(kDirac, 0.0, std::exp(-1.0)), 1.0, 1e-9);
    EXPECT_LT(u_min(kCp, 0.0, 1.0 - 1e-6), 1e-5);
    EXPECT_LT(u_min(kDirac, 0.0, 1.0 - 1e-6), 1e-5);
    EXPECT_THROW(u_min(kCp, 0.0, 1.0), DomainError);
    EXPECT_THROW(u_min(kCp, 0.0, 0.0), DomainError);
}

TEST(UMin, ClosedFormMatchesNumericArgmin) {
    const auto dirac2 = SubordinatorSpec::dirac(2.5);
    for (const auto& s : {kDirac, dirac2, kCp, kTs}) {
        for (double theta : {-5.0, -0.5, 0.5}) {
            for (double beta : {0.05, 0.3, 0.8}) {
                const double cf = u_min(s, theta, beta);
                EXPECT_NEAR(cf, oracle_argmin(s, theta, beta), 1e-8) << s.kind();
                EXPECT_NEAR(cf, u_min(s, theta, beta, RootMethod::bisection), 1e-10) << s.kind();
                // Brent minimisation locates the same point to its sqrt(eps) accuracy.
                const double hi = std::isfinite(theta_max(s)) ? theta_max(s) - theta - 1e-9 : 40.0;
                auto f = [&](double u) { return lambda_fn(s, theta, beta, kHalf, kRho, u); };
                auto r = boost::math::tools::brent_find_minima(f, 0.0, hi, 40);
                EXPECT_NEAR(r.first, cf, 1e-5 * (1.0 + cf));
            }
        }
    }
}

TEST(LambdaFn, DecreasingThenIncreasing) {
    for (const auto& s : {kDirac, kCp, kTs}) {
        const double theta = -1.0;
        const double beta = 0.3;
        const double um = u_min(s, theta, beta);
        const double top = std::isfinite(theta_max(s)) ? theta_max(s) - theta : um * 4.0;
        for (int i = 1; i < 50; ++i) {
            const double u = um * i / 50.0;
            EXPECT_LT(lambda_fn(s, theta, beta, kHalf, kRho, u),
                      lambda_fn(s, theta, beta, kHalf, kRho, u - um / 50.0));
            const double v = um + (top - um) * i / 51.0;
            EXPECT_GT(lambda_fn(s, theta, beta, kHalf, kRho, v),
                      lambda_fn(s, theta, beta, kHalf, kRho, v - (top - um) / 51.0));
        }
    }
}

TEST(BetaMax, DiracLambertMatchesBisection) {
    const double cf = *beta_max(kDirac, 0.0, kHalf, kRho);
    const double bis = *beta_max(kDirac, 0.0, kHalf, kRho, RootMethod::bisection);
    EXPECT_NEAR(cf, 0.32426919688962, 1e-13);
    EXPECT_NEAR(cf, bis, 1e-10);
    // Closed form -W(-e^{-(1 + 1/(2 rho))}).
    EXPECT_NEAR(cf, -lambert_w0(-std::exp(-(1.0 + 1.0 / (2.0 * kRho)))), 1e-15);
}

TEST(BetaMax, CompoundPoissonCubicMatchesBisection) {
    const double cf = *beta_max(kCp, -5.0, kHalf, kRho);
    const double bis = *beta_max(kCp, -5.0, kHalf, kRho, RootMethod::bisection);
    EXPECT_NEAR(cf, 0.48379523303636, 1e-13);
    EXPECT_NEAR(cf, bis, 1e-10);
    EXPECT_GE(cf, 0.45);
    EXPECT_NEAR(lambda_fn(kCp, -5.0, cf, kHalf, kRho, u_min(kCp, -5.0, cf)), 0.0, 1e-12);
}

TEST(BetaMax, ClosedFormsAgreeWithBisectionAcrossParameters) {
    for (double theta : {-20.0, -5.0, -1.0, 0.0, 0.5}) {
        for (double rho : {0.8, 1.11, 3.0}) {
            for (const auto& s : {kDirac, SubordinatorSpec::dirac(0.4), kCp}) {
                const auto cf = beta_max(s, theta, kHalf, rho);
                const auto bis = beta_max(s, theta, kHalf, rho, RootMethod::bisection);
                ASSERT_EQ(cf.has_value(), bis.has_value());
                if (cf) {
                    EXPECT_NEAR(*cf, *bis, 1e-10) << s.kind() << " " << theta << " " << rho;
                }
            }
        }
    }
}

TEST(BetaMax, NoAdmissibleBeta) {
    EXPECT_FALSE(beta_max(kCp, 0.0, kHalf, 0.2).has_value());
    for (double beta : {0.01, 0.2, 0.5, 0.9, 0.99}) {
        for (int i = 0; i < 40; ++i) {
            const double u = 1.999 * i / 40.0;
            EXPECT_GT(lambda_fn(kCp, 0.0, beta, kHalf, 0.2, u), 0.0);
        }
    }
}

TEST(BetaMax, TemperedStableBisection) {
    const auto b = beta_max(kTs, -2.0, kHalf, kRho);
    ASSERT_TRUE(b.has_value());
    EXPECT_NEAR(lambda_fn(kTs, -2.0, *b, kHalf, kRho, u_min(kTs, -2.0, *b)), 0.0, 1e-10);
}

TEST(UZero, Examples) {
    EXPECT_NEAR(u_zero(kCp, -5.0, 0.0, kHalf, kRho), kHalf / kRho, 1e-15);
    for (const auto& s : {kDirac, kCp}) {
        const double theta = s.is_dirac() ? 0.0 : -5.0;
        const double bm = *beta_max(s, theta, kHalf, kRho);
        EXPECT_NEAR(u_zero(s, theta, bm, kHalf, kRho), u_min(s, theta, bm), 1e-9) << s.kind();
    }
    const double cubic = u_zero(kCp, -5.0, 0.45, kHalf, kRho, RootMethod::closed_form);
    const double bis = u_zero(kCp, -5.0, 0.45, kHalf, kRho, RootMethod::bisection);
    EXPECT_NEAR(cubic, bis, 1e-10);
    EXPECT_NEAR(lambda_fn(kCp, -5.0, 0.45, kHalf, kRho, bis), 0.0, 1e-11);
}

TEST(UZero, DiracLambertMatchesBisection) {
    for (double beta : {0.05, 0.2, 0.3}) {
        EXPECT_NEAR(u_zero(kDirac, 0.0, beta, kHalf, kRho, RootMethod::closed_form),
                    u_zero(kDirac, 0.0, beta, kHalf, kRho), 1e-10);
    }
}

TEST(UZero, NotInDb) {
    EXPECT_THROW(u_zero(kCp, -50.0, 0.9, kHalf, kRho), NotInDbError);
}

TEST(UZero, IncreasingInBeta) {
    const double bm = *beta_max(kCp, -5.0, kHalf, kRho);
    double prev = -1.0;
    for (int i = 0; i < 50; ++i) {
        const double beta = bm * i / 49.0;
        const double u0 = u_zero(kCp, -5.0, beta, kHalf, kRho);
        EXPECT_GT(u0, prev);
        prev = u0;
    }
}

TEST(InDb, Examples) {
    const auto yes = in_Db(kCp, -5.0, 0.45, kHalf, kRho);
    EXPECT_TRUE(yes.member);
    EXPECT_LT(yes.min_value, 0.0);
    const auto no = in_Db(kCp, -50.0, 0.9, kHalf, kRho);
    EXPECT_FALSE(no.member);
    EXPECT_NEAR(no.min_value, 0.398, 1e-3);
    EXPECT_NEAR(oracle_lambda(kCp, -50.0, 0.9, kHalf, kRho, no.u_min), no.min_value, 1e-8);
    EXPECT_TRUE(in_Db(kCp, 0.5, 0.0, kHalf, kRho).member);
    EXPECT_TRUE(in_Db(kDirac, 3.0, 0.0, kHalf, kRho).member);
}

TEST(InDb, ConsistentWithBetaMax) {
    for (const auto& s : {kDirac, kCp, kTs}) {
        const double theta = -2.0;
        const double bm = *beta_max(s, theta, kHalf, kRho);
        for (int i = 0; i < 40; ++i) {
            const double below = bm * i / 40.0;
            const double above = bm + (1.0 - bm) * (i + 0.5) / 40.5;
            EXPECT_TRUE(in_Db(s, theta, below, kHalf, kRho).member) << s.kind() << " " << below;
            EXPECT_FALSE(in_Db(s, theta, above, kHalf, kRho).member) << s.kind() << " " << above;
        }
    }
}

TEST(AssumptionP, BaseParameters) {
    ModelParams p;
    p.alpha = 0.127;
    p.rho = kRho;
    const auto r = check_assumption_P(p);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.max_upsilon, 0.2908, 1e-4);
    EXPECT_NEAR(r.margin, 1.709, 1e-3);
    auto neg = [&](double t) { return -upsilon(p.alpha, p.rho, t); };
    auto m = boost::math::tools::brent_find_minima(neg, 0.0, 20.0, 52);
    EXPECT_NEAR(-m.second, r.max_upsilon, 1e-10);
    EXPECT_NEAR(m.first, r.t_star, 1e-6);
}

TEST(AssumptionP, InfiniteThetaAlwaysHolds) {
    ModelParams p;
    p.sub = kDirac;
    p.alpha = 0.001;
    p.rho = 0.001;
    EXPECT_TRUE(check_assumption_P(p).holds);
}

TEST(AssumptionP, SlowReversionClassification) {
    ModelParams p;
    p.alpha = 0.01;
    p.rho = 0.01;
    p.sub = SubordinatorSpec::cp_exp(0.4, 1.01);
    const auto r = check_assumption_P(p);
    auto neg = [&](double t) { return -upsilon(p.alpha, p.rho, t); };
    auto m = boost::math::tools::brent_find_minima(neg, 0.0, 2000.0, 52);
    EXPECT_NEAR(-m.second, r.max_upsilon, 1e-10 * r.max_upsilon);
    EXPECT_NEAR(r.max_upsilon, 12.5, 1e-12);
    EXPECT_FALSE(r.holds);
    EXPECT_LT(r.margin, 0.0);
}

TEST(AssumptionP, EqualRatesLimit) {
    ModelParams p;
    p.alpha = 0.127;
    p.rho = 0.254;
    const auto r = check_assumption_P(p);
    EXPECT_NEAR(r.max_upsilon, 1.0 / (2.0 * p.rho * std::numbers::e), 1e-15);
    EXPECT_NEAR(r.t_star, 1.0 / p.rho, 1e-12);
    p.rho = 0.254 * (1.0 + 1e-7);
    EXPECT_NEAR(check_assumption_P(p).max_upsilon, r.max_upsilon, 1e-7);
}
