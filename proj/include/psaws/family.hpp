#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

namespace psaws {

enum class FamilyKind {
    Gaussian,          // N(theta, sigma^2), T(y) = y
    GaussianVariance,  // N(0, theta),       T(y) = y^2
    LogNormal,         // logN(theta, sigma^2), T(y) = ln y
    Gamma,             // Gamma(p, theta),   T(y) = y, mean p*theta
    Exponential,       // Exp(1/theta),      T(y) = y
    Erlang,            // Erlang(n, 1/theta),T(y) = y, mean n*theta
    Rayleigh,          // Rayleigh(theta),   T(y) = y^2, mean 2*theta^2
    Weibull,           // Weibull(theta, k), T(y) = y^k, mean theta^k
    ScaledChiSquared,  // k*Y/theta ~ chi2(k), T(y) = y
    Pareto,            // Pareto(xm, theta), T(y) = ln(y/xm), mean 1/theta
    Poisson,           // Poisson(theta)
    Binomial,          // Bin(n, theta), mean n*theta
    NegativeBinomial,  // NegBin(r, theta), mean r*theta/(1-theta)
    Bernoulli,         // Bernoulli(theta)
};

/// How a family's statistic field transforms under a change of the
/// parameter: used to share Monte-Carlo noise across parameter values.
enum class Coupling { None, Shift, Scale };

struct Interval {
    double lo, hi;
    bool lo_open = true, hi_open = true;
    bool contains(double x) const {
        if (lo_open ? x <= lo : x < lo) return false;
        if (hi_open ? x >= hi : x > hi) return false;
        return true;
    }
};

/// Compact parameter subinterval on which the Fisher information varies
/// by at most kappa^2.
struct KappaSet {
    double kappa;
    double lower, upper;
    double clamp(double x) const {
        return x < lower ? lower : (x > upper ? upper : x);
    }
};

/// One-parameter exponential family p(y,v) = p(y) exp[T(y) C(v) - B(v)]
/// with E_v[T(Y)] = t(v). Immutable after construction; samplers take an
/// explicit caller-owned engine.
class Family {
public:
    static Family gaussian(double sigma = 1.0);
    static Family gaussian_variance();
    static Family lognormal(double sigma = 1.0);
    static Family gamma(double p);
    static Family exponential();
    static Family erlang(int n);
    static Family rayleigh();
    static Family weibull(double k);
    static Family scaled_chi_squared(int k);
    static Family pareto(double xm);
    static Family poisson();
    static Family binomial(int n);
    static Family negative_binomial(double r);
    static Family bernoulli();

    /// Lookup by CLI name ("gaussian", "poisson", ...) with a nuisance map
    /// (keys: sigma, p, n, k, xm, r as applicable).
    static Family by_name(const std::string& name,
                          const std::map<std::string, double>& nuisance = {});
    static std::vector<Family> catalog();

    FamilyKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    Interval theta_domain() const;
    bool discrete() const;
    /// True when t(v) = v, i.e. estimates of the weighted mean of T(Y)
    /// live directly in the parameter space.
    bool canonical_mean() const;
    bool linear_mean() const;  // t(v) = alpha*v
    bool mean_parametrized() const { return mean_param_; }

    double c_fn(double theta) const;
    double b_fn(double theta) const;
    double c_deriv(double theta) const;
    double mean_map(double theta) const;        // t
    double mean_map_deriv(double theta) const;  // t'
    double mean_map_inv(double m) const;        // t^{-1}

    double statistic(double y) const;  // T(y)
    double kl(double theta, double theta_prime) const;
    double fisher(double theta) const;  // t'(theta) * C'(theta)
    double log_density(double y, double theta) const;

    double sample(double theta, std::mt19937_64& rng) const;
    std::vector<double> sample(double theta, int count,
                               std::mt19937_64& rng) const;
    /// Draws T(Y) with Y ~ P_theta, expressed so that shift/scale structure
    /// is exact in floating point (e.g. Gaussian: theta + sigma*z).
    double sample_statistic(double theta, std::mt19937_64& rng) const;

    /// Clamps theta into the interior of the domain, delta away from any
    /// boundary where the Kullback-Leibler divergence diverges.
    double clamp_interior(double theta, double delta = 1e-8) const;

    /// Mean parametrization wrapper for families with linear t; rejects
    /// nonlinear t (std::domain_error).
    Family reparametrize() const;

    Coupling natural_coupling() const;

    static KappaSet build_kappa_set(const Family& f, double lower,
                                    double upper);

    /// Human/machine readable catalog entry (name, domain, nuisances,
    /// T/C/B descriptions) as a JSON string fragment.
    std::string describe_json() const;

    double nuisance(const std::string& key) const;

private:
    Family(FamilyKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
    double to_base(double theta) const;  // undo mean wrapping

    FamilyKind kind_;
    std::string name_;
    double sigma_ = 1.0;   // Gaussian/logNormal scale
    double shape_ = 1.0;   // p (Gamma), k (Weibull, chi2), r (NegBin)
    double count_ = 1.0;   // n (Erlang, Binomial)
    double xm_ = 1.0;      // Pareto scale
    bool mean_param_ = false;
};

}  // namespace psaws
