#pragma once

// Levy subordinators driving the squared-volatility OU process.
//
// Three families are supported, each with closed-form cumulant kappa_L and
// derivatives on (-inf, Theta_L):
//   dirac            l = delta_a
//   cp_exp           l(dz) = c e^{-lambda z} dz
//   tempered_stable  l(dz) = c z^{-1-alpha} e^{-lambda z} dz,  alpha in [0,1)

#include <functional>
#include <string>
#include <variant>

namespace premia {

struct DiracJump {
    double a = 1.0;
};

struct CompoundPoissonExp {
    double c = 0.0;
    double lambda = 1.0;
};

struct TemperedStable {
    double c = 0.0;
    double lambda = 1.0;
    double alpha_ts = 0.0;
};

/// Strict mode enforces Theta_L > 1; relaxed mode only requires Theta_L > 0.
enum class Strictness { strict, relaxed };

class SubordinatorSpec {
public:
    using Family = std::variant<DiracJump, CompoundPoissonExp, TemperedStable>;

    SubordinatorSpec() : family_(DiracJump{}) {}

    static SubordinatorSpec dirac(double a = 1.0);
    static SubordinatorSpec cp_exp(double c, double lambda, Strictness mode = Strictness::strict);
    static SubordinatorSpec tempered_stable(double c, double lambda, double alpha_ts,
                                            Strictness mode = Strictness::strict);
    static SubordinatorSpec from_family(const Family& family, Strictness mode = Strictness::strict);

    const Family& family() const { return family_; }
    bool is_dirac() const { return std::holds_alternative<DiracJump>(family_); }
    bool is_cp_exp() const { return std::holds_alternative<CompoundPoissonExp>(family_); }
    bool is_tempered_stable() const { return std::holds_alternative<TemperedStable>(family_); }

    /// True when c == 0: the subordinator never jumps.
    bool is_null() const;
    /// Short family tag, as used in JSON ("dirac", "cp_exp", "tempered_stable").
    std::string kind() const;

    friend bool operator==(const SubordinatorSpec& lhs, const SubordinatorSpec& rhs);

private:
    explicit SubordinatorSpec(Family f) : family_(std::move(f)) {}
    Family family_;
};

/// Theta_L; +inf for the Dirac family.
double theta_max(const SubordinatorSpec& spec);

/// Upper end of D_L = (-inf, Theta_L / 2).
double esscher_bound(const SubordinatorSpec& spec);

/// Whether theta lies in the open interval D_L.
bool in_DL(const SubordinatorSpec& spec, double theta);

/// kappa_L(theta). Throws DomainError for theta >= Theta_L.
double cumulant(const SubordinatorSpec& spec, double theta);

/// kappa_L^{(n)}(theta), n in {1,2,3}.
double cumulant_deriv(const SubordinatorSpec& spec, double theta, int n);

/// kappa_L(theta + u) - kappa_L(theta) without cancellation.
double cumulant_increment(const SubordinatorSpec& spec, double theta, double u);

/// (kappa_L'(theta + u) - kappa_L'(theta)) / kappa_L''(theta).
///
/// The ratio is free of the scale c, so it stays finite for the null
/// subordinator; it is the beta-dependent term of the Riccati vector field.
double tilt_ratio(const SubordinatorSpec& spec, double theta, double u);

/// kappa_L'(theta) / kappa_L''(theta), scale free like tilt_ratio.
double first_over_second(const SubordinatorSpec& spec, double theta);

/// Total mass of e^{theta z} l(dz); +inf for infinite activity.
double tilted_mass(const SubordinatorSpec& spec, double theta);

/// Numerical value of int_0^inf weight(z) e^{theta z} l(dz).
///
/// Independent oracle for every closed form above. The half line is split at
/// z = 1 and (1, inf) is mapped by z = 1 + u / (1 - u). For tempered stable
/// the piece (0, 1) is integrated after the substitution z = s^{1/(1-alpha)},
/// which absorbs the z^{-1-alpha} singularity for weights vanishing like z.
/// Tolerance: 1e-11 absolute plus 1e-10 relative; ConvergenceError otherwise.
double levy_quadrature_oracle(const SubordinatorSpec& spec,
                              const std::function<double(double)>& weight, double theta);

/// Principal branch W_0 of the Lambert W function on [-1/e, inf).
double lambert_w0(double x);

}  // namespace premia
