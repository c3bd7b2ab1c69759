#include "psaws/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psaws/rng.hpp"

namespace psaws {

namespace {

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
    g.front() = lo;
    g.back() = hi;
    return g;
}

double sim_theta(const Family& f, double theta, bool coupled) {
    if (!coupled) return theta;
    switch (f.natural_coupling()) {
        case Coupling::Shift:
            return f.theta_domain().contains(0.0) ? 0.0 : 1.0;
        case Coupling::Scale:
            return 1.0;
        default:
            return theta;
    }
}

double quantile_from_row(const std::vector<double>& z_grid,
                         const std::vector<double>& row, double p) {
    const std::size_t nz = z_grid.size();
    std::size_t m = nz;
    for (std::size_t zi = 0; zi < nz; ++zi)
        if (row[zi] <= p) {
            m = zi;
            break;
        }
    if (m == nz) return z_grid.back();
    if (m == 0) return z_grid.front();
    const double p0 = row[m - 1], p1 = row[m];
    if (p0 <= p1) return z_grid[m];
    const double t = (p0 - p) / (p0 - p1);
    return std::exp(std::log(z_grid[m - 1]) +
                    t * (std::log(z_grid[m]) - std::log(z_grid[m - 1])));
}

/// Quantiles of the adaptive and non-adaptive surfaces plus bootstrap
/// standard errors of the baseline-adjusted step-to-step quantile growth,
/// shared by the monotonicity checks. The non-adaptive run on the same
/// data serves as the baseline: on an integer grid the location kernel's
/// effective variance fluctuates as the ball gains whole shells of points,
/// so even with adaptation off the quantiles wobble by a few percent.
/// Subtracting the baseline growth cancels this artifact and leaves only
/// adaptation-induced growth.
struct QuantileTable {
    std::vector<double> pgrid;                  // descending
    std::vector<std::vector<double>> z;         // [k][pi], adaptive
    std::vector<std::vector<double>> z_base;    // [k][pi], adaptation off
    std::vector<std::vector<double>> se_diff;   // [k][pi], adjusted growth
};

double adjusted_growth(double z_next, double z_prev, double base_next,
                       double base_prev) {
    return (z_next - z_prev) - std::max(0.0, base_next - base_prev);
}

QuantileTable build_quantile_table(const PropagationCurve& curve,
                                   const std::vector<double>& pgrid,
                                   int bootstrap = 80) {
    if (curve.counts_nonad.empty())
        throw std::domain_error(
            "check_propagation: curve lacks the non-adaptive baseline; build "
            "it with with_nonadaptive = true");
    const int kmax = curve.kmax();
    const std::size_t nz = curve.z_grid.size();
    const std::size_t np = pgrid.size();
    QuantileTable t;
    t.pgrid = pgrid;
    t.z.assign(kmax + 1, std::vector<double>(np));
    t.z_base.assign(kmax + 1, std::vector<double>(np));
    for (int k = 0; k <= kmax; ++k)
        for (std::size_t pi = 0; pi < np; ++pi) {
            t.z[k][pi] = quantile_from_row(curve.z_grid, curve.phat[k], pgrid[pi]);
            t.z_base[k][pi] =
                quantile_from_row(curve.z_grid, curve.phat_nonad[k], pgrid[pi]);
        }

    // joint bootstrap over replications (both surfaces share the data)
    std::vector<std::vector<std::vector<double>>> zb(
        bootstrap, std::vector<std::vector<double>>(kmax + 1,
                                                    std::vector<double>(np)));
    auto bb = zb;  // baseline counterpart
    auto rng = make_stream(curve.seed, "quantile-bootstrap");
    std::uniform_int_distribution<int> pick(0, curve.reps - 1);
    const double denom = static_cast<double>(curve.reps) *
                         static_cast<double>(curve.n0);
    std::vector<double> row(nz), row_base(nz);
    std::vector<int> sel(curve.reps);
    for (int b = 0; b < bootstrap; ++b) {
        for (int r = 0; r < curve.reps; ++r) sel[r] = pick(rng);
        for (int k = 0; k <= kmax; ++k) {
            std::fill(row.begin(), row.end(), 0.0);
            std::fill(row_base.begin(), row_base.end(), 0.0);
            for (int r : sel) {
                const std::size_t off = static_cast<std::size_t>(r) * nz;
                const std::uint32_t* c = curve.counts[k].data() + off;
                const std::uint32_t* cb = curve.counts_nonad[k].data() + off;
                for (std::size_t zi = 0; zi < nz; ++zi) {
                    row[zi] += c[zi];
                    row_base[zi] += cb[zi];
                }
            }
            for (std::size_t zi = 0; zi < nz; ++zi) {
                row[zi] /= denom;
                row_base[zi] /= denom;
            }
            for (std::size_t pi = 0; pi < np; ++pi) {
                zb[b][k][pi] = quantile_from_row(curve.z_grid, row, pgrid[pi]);
                bb[b][k][pi] =
                    quantile_from_row(curve.z_grid, row_base, pgrid[pi]);
            }
        }
    }
    t.se_diff.assign(kmax, std::vector<double>(np));
    for (int k = 0; k < kmax; ++k)
        for (std::size_t pi = 0; pi < np; ++pi) {
            double mean = 0.0;
            std::vector<double> d(bootstrap);
            for (int b = 0; b < bootstrap; ++b) {
                d[b] = adjusted_growth(zb[b][k + 1][pi], zb[b][k][pi],
                                       bb[b][k + 1][pi], bb[b][k][pi]);
                mean += d[b];
            }
            mean /= bootstrap;
            double var = 0.0;
            for (int b = 0; b < bootstrap; ++b)
                var += (d[b] - mean) * (d[b] - mean);
            t.se_diff[k][pi] = std::sqrt(var / (bootstrap - 1));
        }
    return t;
}

/// True when the baseline-adjusted quantile growth is non-positive in k at
/// every level of pgrid[0..np_used), within two bootstrap standard errors.
/// rel_slack additionally tolerates growth up to that fraction of the
/// quantile itself; discrete observation statistics put probability atoms
/// under the quantiles, and a few percent of jitter survives the baseline
/// adjustment.
bool monotone_up_to(const QuantileTable& t, std::size_t np_used,
                    std::vector<PropagationCheck::Violation>* out,
                    double rel_slack = 0.0) {
    bool ok = true;
    for (std::size_t pi = 0; pi < np_used; ++pi)
        for (std::size_t k = 0; k + 1 < t.z.size(); ++k) {
            const double dz =
                adjusted_growth(t.z[k + 1][pi], t.z[k][pi],
                                t.z_base[k + 1][pi], t.z_base[k][pi]);
            const double slack = 2.0 * t.se_diff[k][pi] + 1e-12 +
                                 rel_slack * std::max(t.z[k][pi],
                                                      t.z_base[k][pi]);
            if (dz > slack) {
                ok = false;
                if (out)
                    out->push_back({static_cast<int>(k), t.pgrid[pi],
                                    dz - slack});
            }
        }
    return ok;
}

std::vector<double> descending_pgrid(double p_hi, double p_lo, int n) {
    auto g = geometric_grid(p_lo, p_hi, n);
    std::reverse(g.begin(), g.end());
    return g;
}

}  // namespace

PropagationCurve phat_surface(const Family& family, double theta, double lambda,
                              const Design& design,
                              const BandwidthSchedule& schedule,
                              const KernelSpec& kloc, const KernelSpec& kad,
                              const CurveOptions& opt) {
    if (!family.theta_domain().contains(theta))
        throw std::domain_error(family.name() + ": theta outside parameter set");
    if (opt.reps < 1) throw std::domain_error("phat_surface: reps must be >= 1");
    const bool coupled = opt.coupled &&
                         family.natural_coupling() != Coupling::None;
    const double th_sim = sim_theta(family, theta, coupled);
    const double th_ref = family.clamp_interior(th_sim);

    const auto interior = design.interior_mask(schedule.at(schedule.kstar));
    std::vector<std::size_t> inner;
    for (std::size_t i = 0; i < interior.size(); ++i)
        if (interior[i]) inner.push_back(i);
    if (inner.empty())
        throw std::domain_error(
            "phat_surface: no interior points at the final bandwidth");

    PropagationCurve curve;
    curve.family = family.name();
    curve.theta = theta;
    curve.lambda = lambda;
    curve.seed = opt.seed;
    curve.reps = opt.reps;
    curve.coupled = coupled;
    curve.n0 = inner.size();
    curve.design_rows = design.rows();
    curve.design_cols = design.cols();
    curve.z_grid = geometric_grid(opt.z_lo, opt.z_hi, opt.z_points);
    const int kmax = schedule.kstar;
    curve.h_grid.resize(kmax + 1);
    for (int k = 0; k <= kmax; ++k) curve.h_grid[k] = schedule.at(k);
    const std::size_t nz = curve.z_grid.size();
    curve.counts.assign(kmax + 1,
                        std::vector<std::uint32_t>(
                            static_cast<std::size_t>(opt.reps) * nz, 0));
    if (opt.with_nonadaptive)
        curve.counts_nonad.assign(kmax + 1,
                                  std::vector<std::uint32_t>(
                                      static_cast<std::size_t>(opt.reps) * nz,
                                      0));

    SmootherConfig config{family, lambda, schedule, kloc, kad, {}, 1e-8};
    SmootherConfig config_inf = config;
    config_inf.lambda = std::numeric_limits<double>::infinity();

    std::vector<std::uint32_t> hist(nz + 1);
    auto tally = [&](const SmootherState& st, int rep,
                     std::vector<std::vector<std::uint32_t>>& sink) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::size_t i : inner) {
            const double val =
                st.n_bar[i] *
                family.kl(family.clamp_interior(st.theta[i]), th_ref);
            const std::size_t pos =
                std::lower_bound(curve.z_grid.begin(), curve.z_grid.end(), val) -
                curve.z_grid.begin();
            ++hist[pos];
        }
        std::uint32_t* out = sink[st.k].data() +
                             static_cast<std::size_t>(rep) * nz;
        std::uint32_t suffix = 0;
        for (std::size_t zi = nz; zi-- > 0;) {
            suffix += hist[zi + 1];
            out[zi] = suffix;
        }
    };

    std::vector<double> tv(design.size());
    for (int rep = 0; rep < opt.reps; ++rep) {
        auto rng = make_stream(opt.seed, "phat-surface", rep);
        for (double& t : tv) t = family.sample_statistic(th_sim, rng);
        run(config, design, tv,
            [&](const SmootherState& st) { tally(st, rep, curve.counts); });
        if (opt.with_nonadaptive)
            run(config_inf, design, tv, [&](const SmootherState& st) {
                tally(st, rep, curve.counts_nonad);
            });
    }

    const double denom = static_cast<double>(opt.reps) *
                         static_cast<double>(curve.n0);
    auto average = [&](const std::vector<std::vector<std::uint32_t>>& cnt) {
        std::vector<std::vector<double>> out(kmax + 1,
                                             std::vector<double>(nz, 0.0));
        for (int k = 0; k <= kmax; ++k)
            for (int rep = 0; rep < opt.reps; ++rep)
                for (std::size_t zi = 0; zi < nz; ++zi)
                    out[k][zi] +=
                        cnt[k][static_cast<std::size_t>(rep) * nz + zi];
        for (auto& row : out)
            for (double& v : row) v /= denom;
        return out;
    };
    curve.phat = average(curve.counts);
    if (opt.with_nonadaptive) curve.phat_nonad = average(curve.counts_nonad);
    return curve;
}

Quantile z_quantile(const PropagationCurve& curve, int k, double p) {
    if (k < 0 || k > curve.kmax())
        throw std::out_of_range("z_quantile: step out of range");
    if (!(p > 0 && p < 1))
        throw std::domain_error("z_quantile: p must be in (0,1)");
    return {quantile_from_row(curve.z_grid, curve.phat[k], p),
            p < curve.resolution()};
}

PropagationCheck check_propagation(const PropagationCurve& curve,
                                   double epsilon) {
    if (!(epsilon > 0 && epsilon < 1))
        throw std::domain_error("check_propagation: epsilon must be in (0,1)");
    const double p_lo = std::max(epsilon * 1.0000001, curve.resolution());
    const double p_hi = 0.9;
    PropagationCheck result;
    result.p_floor = p_lo;
    if (p_lo >= p_hi) {
        result.holds = true;  // nothing to check at this resolution
        return result;
    }
    const auto table =
        build_quantile_table(curve, descending_pgrid(p_hi, p_lo, 25));
    result.holds =
        monotone_up_to(table, table.pgrid.size(), &result.violations);
    return result;
}

CalibrationResult calibrate_lambda(const Family& family, double theta,
                                   double epsilon, const Design& design,
                                   const BandwidthSchedule& schedule,
                                   const KernelSpec& kloc,
                                   const KernelSpec& kad,
                                   const CurveOptions& opt, double lo,
                                   double hi) {
    if (!(lo > 0 && hi > lo))
        throw std::domain_error("calibrate_lambda: need 0 < lo < hi");
    CalibrationResult result;
    CurveOptions copt = opt;
    copt.with_nonadaptive = true;  // the check needs the baseline
    auto passes = [&](double lambda) {
        auto curve = phat_surface(family, theta, lambda, design, schedule, kloc,
                                  kad, copt);
        const bool ok = check_propagation(curve, epsilon).holds;
        result.trials.emplace_back(lambda, ok);
        return ok;
    };
    if (passes(lo))
        throw std::domain_error(
            "calibrate_lambda: check already passes at the lower bracket");
    if (!passes(hi))
        throw std::domain_error(
            "calibrate_lambda: check fails at the upper bracket");
    while (hi - lo > 0.01 * hi) {
        const double mid = std::sqrt(lo * hi);
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    result.lambda_opt = hi;
    return result;
}

InvarianceReport invariance_report(const Family& family,
                                   const std::vector<double>& thetas,
                                   double lambda, const Design& design,
                                   const BandwidthSchedule& schedule,
                                   const KernelSpec& kloc,
                                   const KernelSpec& kad,
                                   const CurveOptions& opt) {
    if (thetas.empty())
        throw std::domain_error("invariance_report: no parameters given");
    InvarianceReport report;
    CurveOptions copt = opt;
    copt.with_nonadaptive = true;  // the epsilon scan needs the baseline
    for (double th : thetas)
        report.curves.push_back(
            phat_surface(family, th, lambda, design, schedule, kloc, kad, copt));

    report.max_discrepancy = 0.0;
    for (std::size_t a = 0; a < report.curves.size(); ++a)
        for (std::size_t b = a + 1; b < report.curves.size(); ++b)
            for (int k = 0; k <= report.curves[a].kmax(); ++k)
                for (std::size_t zi = 0; zi < report.curves[a].z_grid.size();
                     ++zi)
                    report.max_discrepancy = std::max(
                        report.max_discrepancy,
                        std::abs(report.curves[a].phat[k][zi] -
                                 report.curves[b].phat[k][zi]));

    for (const auto& curve : report.curves) {
        // smallest p down to the MC resolution at which the quantile
        // surface is still non-increasing for this and all larger p
        const auto pgrid =
            descending_pgrid(0.9, curve.resolution() * 1.0000001, 40);
        const auto table = build_quantile_table(curve, pgrid);
        // the level scan tolerates 2% relative jitter on top of the
        // bootstrap slack; for families with discrete statistics the
        // quantiles sit on probability atoms and wobble by that much
        const double rel_slack = 0.02;
        double eps = 1.0;
        for (std::size_t used = 1; used <= pgrid.size(); ++used) {
            if (!monotone_up_to(table, used, nullptr, rel_slack)) break;
            eps = pgrid[used - 1];
        }
        report.eps_levels.push_back(eps);
    }
    return report;
}

std::vector<IsolineRow> emit_isolines(const PropagationCurve& curve,
                                      const std::vector<double>& p_levels) {
    if (curve.phat_nonad.empty())
        throw std::domain_error(
            "emit_isolines: curve was built without the non-adaptive surface");
    std::vector<IsolineRow> rows;
    for (int k = 0; k <= curve.kmax(); ++k)
        for (double p : p_levels) {
            rows.push_back({k, curve.h_grid[k], p,
                            quantile_from_row(curve.z_grid, curve.phat[k], p),
                            "adaptive"});
            rows.push_back(
                {k, curve.h_grid[k], p,
                 quantile_from_row(curve.z_grid, curve.phat_nonad[k], p),
                 "nonadaptive"});
        }
    return rows;
}

}  // namespace psaws
