#include "psaws/family.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace psaws {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void domain_fail(const std::string& family, double theta) {
    std::ostringstream os;
    os << family << ": parameter " << theta << " outside the parameter set";
    throw std::domain_error(os.str());
}

// r - 1 - ln r, the KL core shared by all scale families.
double ratio_kl(double r) { return r - 1.0 - std::log(r); }

double bernoulli_kl(double a, double b) {
    double s = 0.0;
    if (a > 0.0) s += a * std::log(a / b);
    if (a < 1.0) s += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// factories

Family Family::gaussian(double sigma) {
    if (!(sigma > 0)) throw std::domain_error("gaussian: sigma must be > 0");
    Family f(FamilyKind::Gaussian, "gaussian");
    f.sigma_ = sigma;
    return f;
}
Family Family::gaussian_variance() {
    return Family(FamilyKind::GaussianVariance, "gaussian_variance");
}
Family Family::lognormal(double sigma) {
    if (!(sigma > 0)) throw std::domain_error("lognormal: sigma must be > 0");
    Family f(FamilyKind::LogNormal, "lognormal");
    f.sigma_ = sigma;
    return f;
}
Family Family::gamma(double p) {
    if (!(p > 0)) throw std::domain_error("gamma: shape p must be > 0");
    Family f(FamilyKind::Gamma, "gamma");
    f.shape_ = p;
    return f;
}
Family Family::exponential() { return Family(FamilyKind::Exponential, "exponential"); }
Family Family::erlang(int n) {
    if (n < 1) throw std::domain_error("erlang: n must be >= 1");
    Family f(FamilyKind::Erlang, "erlang");
    f.count_ = n;
    return f;
}
Family Family::rayleigh() { return Family(FamilyKind::Rayleigh, "rayleigh"); }
Family Family::weibull(double k) {
    if (!(k > 0)) throw std::domain_error("weibull: shape k must be > 0");
    Family f(FamilyKind::Weibull, "weibull");
    f.shape_ = k;
    return f;
}
Family Family::scaled_chi_squared(int k) {
    if (k < 1) throw std::domain_error("chisq: k must be >= 1");
    Family f(FamilyKind::ScaledChiSquared, "chisq");
    f.shape_ = k;
    return f;
}
Family Family::pareto(double xm) {
    if (!(xm >= 1)) throw std::domain_error("pareto: xm must be >= 1");
    Family f(FamilyKind::Pareto, "pareto");
    f.xm_ = xm;
    return f;
}
Family Family::poisson() { return Family(FamilyKind::Poisson, "poisson"); }
Family Family::binomial(int n) {
    if (n < 1) throw std::domain_error("binomial: n must be >= 1");
    Family f(FamilyKind::Binomial, "binomial");
    f.count_ = n;
    return f;
}
Family Family::negative_binomial(double r) {
    if (!(r > 0)) throw std::domain_error("negative_binomial: r must be > 0");
    Family f(FamilyKind::NegativeBinomial, "negative_binomial");
    f.shape_ = r;
    return f;
}
Family Family::bernoulli() { return Family(FamilyKind::Bernoulli, "bernoulli"); }

Family Family::by_name(const std::string& name,
                       const std::map<std::string, double>& nu) {
    auto get = [&](const std::string& key, double dflt) {
        auto it = nu.find(key);
        return it == nu.end() ? dflt : it->second;
    };
    if (name == "gaussian") return gaussian(get("sigma", 1.0));
    if (name == "gaussian_variance") return gaussian_variance();
    if (name == "lognormal") return lognormal(get("sigma", 1.0));
    if (name == "gamma") return gamma(get("p", 2.0));
    if (name == "exponential") return exponential();
    if (name == "erlang") return erlang(static_cast<int>(get("n", 2)));
    if (name == "rayleigh") return rayleigh();
    if (name == "weibull") return weibull(get("k", 2.0));
    if (name == "chisq") return scaled_chi_squared(static_cast<int>(get("k", 4)));
    if (name == "pareto") return pareto(get("xm", 1.0));
    if (name == "poisson") return poisson();
    if (name == "binomial") return binomial(static_cast<int>(get("n", 10)));
    if (name == "negative_binomial") return negative_binomial(get("r", 2.0));
    if (name == "bernoulli") return bernoulli();
    throw std::domain_error("unknown family: " + name +
                            " (see `psaws families` for the catalog)");
}

std::vector<Family> Family::catalog() {
    return {gaussian(),  gaussian_variance(), lognormal(), gamma(2.0),
            exponential(), erlang(2),         rayleigh(),  weibull(2.0),
            scaled_chi_squared(4), pareto(1.0), poisson(), binomial(10),
            negative_binomial(2.0), bernoulli()};
}

// ---------------------------------------------------------------------------
// structure

Interval Family::theta_domain() const {
    Interval base;
    switch (kind_) {
        case FamilyKind::Gaussian: base = {-kInf, kInf}; break;
        case FamilyKind::LogNormal: base = {0, kInf}; break;
        case FamilyKind::Pareto: base = {1, kInf}; break;
        case FamilyKind::Binomial:
        case FamilyKind::Bernoulli: base = {0, 1, true, false}; break;
        case FamilyKind::NegativeBinomial: base = {0, 1}; break;
        default: base = {0, kInf}; break;
    }
    if (mean_param_) {
        double a = 1.0;
        switch (kind_) {
            case FamilyKind::Gamma: a = shape_; break;
            case FamilyKind::Erlang:
            case FamilyKind::Binomial: a = count_; break;
            default: break;
        }
        base.lo *= a;
        base.hi *= a;
    }
    return base;
}

bool Family::discrete() const {
    switch (kind_) {
        case FamilyKind::Poisson:
        case FamilyKind::Binomial:
        case FamilyKind::NegativeBinomial:
        case FamilyKind::Bernoulli: return true;
        default: return false;
    }
}

bool Family::canonical_mean() const {
    if (mean_param_) return true;
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::GaussianVariance:
        case FamilyKind::LogNormal:
        case FamilyKind::Exponential:
        case FamilyKind::ScaledChiSquared:
        case FamilyKind::Poisson:
        case FamilyKind::Bernoulli: return true;
        default: return false;
    }
}

bool Family::linear_mean() const {
    if (canonical_mean()) return true;
    switch (kind_) {
        case FamilyKind::Gamma:
        case FamilyKind::Erlang:
        case FamilyKind::Binomial: return true;
        default: return false;
    }
}

double Family::to_base(double theta) const {
    if (!mean_param_) return theta;
    switch (kind_) {
        case FamilyKind::Gamma: return theta / shape_;
        case FamilyKind::Erlang:
        case FamilyKind::Binomial: return theta / count_;
        default: return theta;
    }
}

double Family::mean_map(double v) const {
    if (mean_param_) return v;
    switch (kind_) {
        case FamilyKind::Gamma: return shape_ * v;
        case FamilyKind::Erlang: return count_ * v;
        case FamilyKind::Rayleigh: return 2.0 * v * v;
        case FamilyKind::Weibull: return std::pow(v, shape_);
        case FamilyKind::Pareto: return 1.0 / v;
        case FamilyKind::Binomial: return count_ * v;
        case FamilyKind::NegativeBinomial: return shape_ * v / (1.0 - v);
        default: return v;
    }
}

double Family::mean_map_deriv(double v) const {
    if (mean_param_) return 1.0;
    switch (kind_) {
        case FamilyKind::Gamma: return shape_;
        case FamilyKind::Erlang: return count_;
        case FamilyKind::Rayleigh: return 4.0 * v;
        case FamilyKind::Weibull: return shape_ * std::pow(v, shape_ - 1.0);
        case FamilyKind::Pareto: return -1.0 / (v * v);
        case FamilyKind::Binomial: return count_;
        case FamilyKind::NegativeBinomial:
            return shape_ / ((1.0 - v) * (1.0 - v));
        default: return 1.0;
    }
}

double Family::mean_map_inv(double m) const {
    if (mean_param_) return m;
    switch (kind_) {
        case FamilyKind::Gamma: return m / shape_;
        case FamilyKind::Erlang: return m / count_;
        case FamilyKind::Rayleigh: return std::sqrt(m / 2.0);
        case FamilyKind::Weibull: return std::pow(m, 1.0 / shape_);
        case FamilyKind::Pareto: return 1.0 / m;
        case FamilyKind::Binomial: return m / count_;
        case FamilyKind::NegativeBinomial: return m / (shape_ + m);
        default: return m;
    }
}

double Family::c_fn(double theta) const {
    double v = to_base(theta);
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: return v / (sigma_ * sigma_);
        case FamilyKind::GaussianVariance: return -0.5 / v;
        case FamilyKind::Gamma:
        case FamilyKind::Exponential:
        case FamilyKind::Erlang: return -1.0 / v;
        case FamilyKind::Rayleigh: return -0.5 / (v * v);
        case FamilyKind::Weibull: return -std::pow(v, -shape_);
        case FamilyKind::ScaledChiSquared: return -shape_ / (2.0 * v);
        case FamilyKind::Pareto: return -v;
        case FamilyKind::Poisson: return std::log(v);
        case FamilyKind::Binomial:
        case FamilyKind::Bernoulli: return std::log(v / (1.0 - v));
        case FamilyKind::NegativeBinomial: return std::log(v);
    }
    return 0.0;
}

double Family::b_fn(double theta) const {
    double v = to_base(theta);
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: return v * v / (2.0 * sigma_ * sigma_);
        case FamilyKind::GaussianVariance: return 0.5 * std::log(v);
        case FamilyKind::Gamma: return shape_ * std::log(v);
        case FamilyKind::Exponential: return std::log(v);
        case FamilyKind::Erlang: return count_ * std::log(v);
        case FamilyKind::Rayleigh: return 2.0 * std::log(v);
        case FamilyKind::Weibull: return shape_ * std::log(v);
        case FamilyKind::ScaledChiSquared: return 0.5 * shape_ * std::log(v);
        case FamilyKind::Pareto: return -std::log(v);
        case FamilyKind::Poisson: return v;
        case FamilyKind::Binomial: return -count_ * std::log(1.0 - v);
        case FamilyKind::Bernoulli: return -std::log(1.0 - v);
        case FamilyKind::NegativeBinomial: return -shape_ * std::log(1.0 - v);
    }
    return 0.0;
}

double Family::c_deriv(double theta) const {
    double v = to_base(theta);
    double d;
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: d = 1.0 / (sigma_ * sigma_); break;
        case FamilyKind::GaussianVariance: d = 0.5 / (v * v); break;
        case FamilyKind::Gamma:
        case FamilyKind::Exponential:
        case FamilyKind::Erlang: d = 1.0 / (v * v); break;
        case FamilyKind::Rayleigh: d = 1.0 / (v * v * v); break;
        case FamilyKind::Weibull: d = shape_ * std::pow(v, -shape_ - 1.0); break;
        case FamilyKind::ScaledChiSquared: d = shape_ / (2.0 * v * v); break;
        case FamilyKind::Pareto: d = -1.0; break;
        case FamilyKind::Poisson: d = 1.0 / v; break;
        case FamilyKind::Binomial:
        case FamilyKind::Bernoulli: d = 1.0 / (v * (1.0 - v)); break;
        case FamilyKind::NegativeBinomial: d = 1.0 / v; break;
        default: d = 0.0; break;
    }
    if (mean_param_) {
        // chain rule through the linear map v = theta / alpha
        switch (kind_) {
            case FamilyKind::Gamma: d /= shape_; break;
            case FamilyKind::Erlang:
            case FamilyKind::Binomial: d /= count_; break;
            default: break;
        }
    }
    return d;
}

double Family::statistic(double y) const {
    switch (kind_) {
        case FamilyKind::GaussianVariance:
        case FamilyKind::Rayleigh: return y * y;
        case FamilyKind::LogNormal:
            if (!(y > 0)) throw std::domain_error("lognormal: T(y)=ln y needs y > 0");
            return std::log(y);
        case FamilyKind::Weibull: return std::pow(y, shape_);
        case FamilyKind::Pareto:
            if (!(y >= xm_)) throw std::domain_error("pareto: y below support");
            return std::log(y / xm_);
        default: return y;
    }
}

// ---------------------------------------------------------------------------
// Kullback-Leibler divergence, Fisher information

double Family::kl(double theta, double theta_prime) const {
    const Interval dom = theta_domain();
    if (!dom.contains(theta)) domain_fail(name_, theta);
    if (!dom.contains(theta_prime)) domain_fail(name_, theta_prime);
    if (theta == theta_prime) return 0.0;
    double a = to_base(theta), b = to_base(theta_prime);
    const double v = [&]() -> double {
        switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: {
            double d = a - b;
            return d * d / (2.0 * sigma_ * sigma_);
        }
        case FamilyKind::GaussianVariance: return 0.5 * ratio_kl(a / b);
        case FamilyKind::Gamma: return shape_ * ratio_kl(a / b);
        case FamilyKind::Exponential: return ratio_kl(a / b);
        case FamilyKind::Erlang: return count_ * ratio_kl(a / b);
        case FamilyKind::Rayleigh: return ratio_kl((a * a) / (b * b));
        case FamilyKind::Weibull: return ratio_kl(std::pow(a / b, shape_));
        case FamilyKind::ScaledChiSquared: return 0.5 * shape_ * ratio_kl(a / b);
        case FamilyKind::Pareto: return ratio_kl(b / a);
        case FamilyKind::Poisson: return a * std::log(a / b) - (a - b);
        case FamilyKind::Binomial:
            if (b == 1.0) domain_fail(name_, theta_prime);  // divergent boundary
            return count_ * bernoulli_kl(a, b);
        case FamilyKind::Bernoulli:
            if (b == 1.0) domain_fail(name_, theta_prime);
            return bernoulli_kl(a, b);
        case FamilyKind::NegativeBinomial:
            return shape_ * (a / (1.0 - a) * std::log(a / b) +
                             std::log((1.0 - a) / (1.0 - b)));
        }
        return 0.0;
    }();
    // rounding between near-equal parameters must not produce -1e-17
    return std::max(0.0, v);
}

double Family::fisher(double theta) const {
    if (!theta_domain().contains(theta)) domain_fail(name_, theta);
    if (mean_param_) return c_deriv(theta);
    return mean_map_deriv(theta) * c_deriv(theta);
}

KappaSet Family::build_kappa_set(const Family& f, double lower, double upper) {
    if (!(lower < upper)) throw std::domain_error("kappa set: lower >= upper");
    const Interval dom = f.theta_domain();
    if (!dom.contains(lower)) domain_fail(f.name(), lower);
    if (!dom.contains(upper)) domain_fail(f.name(), upper);
    // Fisher information is monotone in closed form for every catalog
    // family; the grid scan guards against nuisance-dependent surprises.
    const int grid = 513;
    double imin = kInf, imax = 0.0;
    for (int g = 0; g < grid; ++g) {
        double t = lower + (upper - lower) * g / (grid - 1);
        double info = f.fisher(t);
        if (!std::isfinite(info) || info <= 0)
            throw std::domain_error(f.name() + ": Fisher information unbounded on interval");
        imin = std::min(imin, info);
        imax = std::max(imax, info);
    }
    return KappaSet{std::sqrt(imax / imin), lower, upper};
}

// ---------------------------------------------------------------------------
// densities and sampling

double Family::log_density(double y, double theta) const {
    if (!theta_domain().contains(theta)) domain_fail(name_, theta);
    double v = to_base(theta);
    switch (kind_) {
        case FamilyKind::Gaussian: {
            double d = y - v;
            return -d * d / (2.0 * sigma_ * sigma_) -
                   0.5 * std::log(2.0 * M_PI * sigma_ * sigma_);
        }
        case FamilyKind::GaussianVariance:
            return -y * y / (2.0 * v) - 0.5 * std::log(2.0 * M_PI * v);
        case FamilyKind::LogNormal: {
            double d = std::log(y) - v;
            return -d * d / (2.0 * sigma_ * sigma_) - std::log(y) -
                   0.5 * std::log(2.0 * M_PI * sigma_ * sigma_);
        }
        case FamilyKind::Gamma:
            return (shape_ - 1.0) * std::log(y) - y / v - shape_ * std::log(v) -
                   std::lgamma(shape_);
        case FamilyKind::Exponential: return -y / v - std::log(v);
        case FamilyKind::Erlang:
            return (count_ - 1.0) * std::log(y) - y / v - count_ * std::log(v) -
                   std::lgamma(count_);
        case FamilyKind::Rayleigh:
            return std::log(y) - y * y / (2.0 * v * v) - 2.0 * std::log(v);
        case FamilyKind::Weibull:
            return std::log(shape_) + (shape_ - 1.0) * std::log(y) -
                   std::pow(y / v, shape_) - shape_ * std::log(v);
        case FamilyKind::ScaledChiSquared: {
            double half = 0.5 * shape_;
            return (half - 1.0) * std::log(y) - y * half / v -
                   half * std::log(v / half) - std::lgamma(half);
        }
        case FamilyKind::Pareto:
            return std::log(v) + v * std::log(xm_) - (v + 1.0) * std::log(y);
        case FamilyKind::Poisson:
            return y * std::log(v) - v - std::lgamma(y + 1.0);
        case FamilyKind::Binomial:
            return std::lgamma(count_ + 1.0) - std::lgamma(y + 1.0) -
                   std::lgamma(count_ - y + 1.0) + y * std::log(v) +
                   (count_ - y) * std::log(1.0 - v);
        case FamilyKind::NegativeBinomial:
            return std::lgamma(y + shape_) - std::lgamma(y + 1.0) -
                   std::lgamma(shape_) + y * std::log(v) +
                   shape_ * std::log(1.0 - v);
        case FamilyKind::Bernoulli:
            return y * std::log(v) + (1.0 - y) * std::log(1.0 - v);
    }
    return 0.0;
}

double Family::sample(double theta, std::mt19937_64& rng) const {
    if (!theta_domain().contains(theta)) domain_fail(name_, theta);
    double v = to_base(theta);
    switch (kind_) {
        case FamilyKind::Gaussian:
            return v + sigma_ * std::normal_distribution<double>(0.0, 1.0)(rng);
        case FamilyKind::GaussianVariance:
            return std::sqrt(v) * std::normal_distribution<double>(0.0, 1.0)(rng);
        case FamilyKind::LogNormal:
            return std::exp(v + sigma_ * std::normal_distribution<double>(0.0, 1.0)(rng));
        case FamilyKind::Gamma:
            return v * std::gamma_distribution<double>(shape_, 1.0)(rng);
        case FamilyKind::Exponential:
            return v * std::exponential_distribution<double>(1.0)(rng);
        case FamilyKind::Erlang:
            return v * std::gamma_distribution<double>(count_, 1.0)(rng);
        case FamilyKind::Rayleigh:
            return v * std::sqrt(2.0 * std::exponential_distribution<double>(1.0)(rng));
        case FamilyKind::Weibull:
            return v * std::pow(std::exponential_distribution<double>(1.0)(rng),
                                1.0 / shape_);
        case FamilyKind::ScaledChiSquared:
            return v * (2.0 / shape_) *
                   std::gamma_distribution<double>(0.5 * shape_, 1.0)(rng);
        case FamilyKind::Pareto:
            return xm_ * std::exp(std::exponential_distribution<double>(1.0)(rng) / v);
        case FamilyKind::Poisson:
            return static_cast<double>(std::poisson_distribution<long>(v)(rng));
        case FamilyKind::Binomial:
            return static_cast<double>(std::binomial_distribution<long>(
                static_cast<long>(count_), v)(rng));
        case FamilyKind::NegativeBinomial: {
            // Gamma-Poisson mixture; valid for non-integer r.
            double lam = std::gamma_distribution<double>(shape_, v / (1.0 - v))(rng);
            return static_cast<double>(std::poisson_distribution<long>(lam)(rng));
        }
        case FamilyKind::Bernoulli:
            return std::bernoulli_distribution(v)(rng) ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<double> Family::sample(double theta, int count,
                                   std::mt19937_64& rng) const {
    if (count < 1) throw std::domain_error("sample: count must be >= 1");
    std::vector<double> out(count);
    for (auto& y : out) y = sample(theta, rng);
    return out;
}

double Family::sample_statistic(double theta, std::mt19937_64& rng) const {
    if (!theta_domain().contains(theta)) domain_fail(name_, theta);
    double m = mean_param_ ? theta : mean_map(theta);
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal:  // T = ln Y ~ N(theta, sigma^2)
            return m + sigma_ * std::normal_distribution<double>(0.0, 1.0)(rng);
        case FamilyKind::GaussianVariance: {
            double z = std::normal_distribution<double>(0.0, 1.0)(rng);
            return m * (z * z);
        }
        case FamilyKind::Gamma:
            return m * (std::gamma_distribution<double>(shape_, 1.0)(rng) / shape_);
        case FamilyKind::Erlang:
            return m * (std::gamma_distribution<double>(count_, 1.0)(rng) / count_);
        case FamilyKind::Exponential:
        case FamilyKind::Rayleigh:   // T = Y^2 ~ Exp with mean 2 theta^2
        case FamilyKind::Weibull:    // T = Y^k ~ Exp with mean theta^k
        case FamilyKind::Pareto:     // T = ln(Y/xm) ~ Exp with mean 1/theta
            return m * std::exponential_distribution<double>(1.0)(rng);
        case FamilyKind::ScaledChiSquared:
            return m * ((2.0 / shape_) *
                        std::gamma_distribution<double>(0.5 * shape_, 1.0)(rng));
        default:
            return statistic(sample(theta, rng));
    }
}

double Family::clamp_interior(double theta, double delta) const {
    Interval dom = theta_domain();
    double x = theta;
    if (std::isfinite(dom.lo) && x < dom.lo + delta) x = dom.lo + delta;
    if (std::isfinite(dom.hi) && x > dom.hi - delta) x = dom.hi - delta;
    return x;
}

Family Family::reparametrize() const {
    if (!linear_mean())
        throw std::domain_error(name_ +
                                ": mean map is nonlinear; supply the mean "
                                "parametrization directly");
    if (canonical_mean()) return *this;  // identity map, no-op
    Family f(*this);
    f.mean_param_ = true;
    f.name_ = name_ + "_mean";
    return f;
}

Coupling Family::natural_coupling() const {
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: return Coupling::Shift;
        case FamilyKind::GaussianVariance:
        case FamilyKind::Gamma:
        case FamilyKind::Exponential:
        case FamilyKind::Erlang:
        case FamilyKind::Rayleigh:
        case FamilyKind::Weibull:
        case FamilyKind::ScaledChiSquared:
        case FamilyKind::Pareto: return Coupling::Scale;
        default: return Coupling::None;
    }
}

double Family::nuisance(const std::string& key) const {
    if (key == "sigma") return sigma_;
    if (key == "p" || key == "k" || key == "r") return shape_;
    if (key == "n") return count_;
    if (key == "xm") return xm_;
    throw std::domain_error("unknown nuisance key: " + key);
}

std::string Family::describe_json() const {
    auto num = [](double x) {
        if (x == kInf) return std::string("\"inf\"");
        if (x == -kInf) return std::string("\"-inf\"");
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    Interval dom = theta_domain();
    std::ostringstream os;
    os << "{\"name\":\"" << name_ << "\",\"discrete\":" << (discrete() ? "true" : "false")
       << ",\"canonical_mean\":" << (canonical_mean() ? "true" : "false")
       << ",\"theta_domain\":{\"lo\":" << num(dom.lo) << ",\"hi\":" << num(dom.hi)
       << ",\"lo_open\":" << (dom.lo_open ? "true" : "false")
       << ",\"hi_open\":" << (dom.hi_open ? "true" : "false") << "}";
    os << ",\"nuisances\":{";
    bool first = true;
    auto put = [&](const char* k, double v) {
        if (!first) os << ",";
        os << "\"" << k << "\":" << num(v);
        first = false;
    };
    switch (kind_) {
        case FamilyKind::Gaussian:
        case FamilyKind::LogNormal: put("sigma", sigma_); break;
        case FamilyKind::Gamma: put("p", shape_); break;
        case FamilyKind::Erlang:
        case FamilyKind::Binomial: put("n", count_); break;
        case FamilyKind::Weibull:
        case FamilyKind::ScaledChiSquared: put("k", shape_); break;
        case FamilyKind::Pareto: put("xm", xm_); break;
        case FamilyKind::NegativeBinomial: put("r", shape_); break;
        default: break;
    }
    os << "}";
    const char* t = "y";
    switch (kind_) {
        case FamilyKind::GaussianVariance:
        case FamilyKind::Rayleigh: t = "y^2"; break;
        case FamilyKind::LogNormal: t = "ln y"; break;
        case FamilyKind::Weibull: t = "y^k"; break;
        case FamilyKind::Pareto: t = "ln(y/xm)"; break;
        default: break;
    }
    os << ",\"statistic\":\"" << t << "\"}";
    return os.str();
}

}  // namespace psaws
