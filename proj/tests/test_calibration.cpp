#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "psaws/calibration.hpp"

using namespace psaws;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PropagationCurve gaussian_curve(double lambda, int reps, int kstar,
                                CurveOptions opt = {}) {
    auto d = Design::line(100);
    BandwidthSchedule sched{0.8, 1.25, kstar};
    opt.reps = reps;
    return phat_surface(Family::gaussian(), 0.0, lambda, d, sched,
                        KernelSpec::parabola(), KernelSpec::plateau_triangle(),
                        opt);
}

// Mean and standard error of phat at one (k, z) cell from the per-rep counts.
std::pair<double, double> cell_stats(const PropagationCurve& c, int k,
                                     std::size_t zi) {
    const std::size_t nz = c.z_grid.size();
    double mean = 0.0, var = 0.0;
    std::vector<double> fr(c.reps);
    for (int r = 0; r < c.reps; ++r) {
        fr[r] = c.counts[k][static_cast<std::size_t>(r) * nz + zi] /
                static_cast<double>(c.n0);
        mean += fr[r];
    }
    mean /= c.reps;
    for (int r = 0; r < c.reps; ++r) var += (fr[r] - mean) * (fr[r] - mean);
    var /= (c.reps - 1);
    return {mean, std::sqrt(var / c.reps)};
}

}  // namespace

TEST_CASE("exceedance surface basics") {
    auto c = gaussian_curve(kInf, 40, 4);
    CHECK(c.kmax() == 4);
    CHECK(c.n0 > 0);
    CHECK(c.coupled);
    CHECK(c.h_grid.front() == 0.8);
    for (int k = 0; k <= c.kmax(); ++k) {
        // tiny z is almost always exceeded, the grid top never is
        CHECK(c.phat[k].front() > 0.9);
        CHECK(c.phat[k].back() == 0.0);
        // rows are non-increasing in z by construction
        for (std::size_t zi = 1; zi < c.z_grid.size(); ++zi)
            CHECK(c.phat[k][zi] <= c.phat[k][zi - 1]);
        // averaged surface matches the raw counts
        auto [mean0, se0] = cell_stats(c, k, 50);
        CHECK(c.phat[k][50] == doctest::Approx(mean0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(phat_surface(Family::exponential(), -1.0, 5.0,
                                 Design::line(50), BandwidthSchedule{0.8, 1.25, 2},
                                 KernelSpec::parabola(),
                                 KernelSpec::plateau_triangle(), CurveOptions{}),
                    std::domain_error);
}

TEST_CASE("initialization tail matches the chi-square law") {
    // uniform location kernel, single step: the scaled divergence of a mean
    // of 5 standard normals from the truth is chi-square(1)/2, so the
    // exceedance of z is erfc(sqrt(z)).
    auto d = Design::line(64);
    CurveOptions opt;
    opt.reps = 400;
    auto c = phat_surface(Family::gaussian(), 0.0, kInf, d,
                          BandwidthSchedule{2.0, 1.25, 0},
                          KernelSpec::uniform(), KernelSpec::plateau_triangle(),
                          opt);
    CHECK(c.n0 == 60);
    for (std::size_t zi = 60; zi < c.z_grid.size(); zi += 25) {
        const double z = c.z_grid[zi];
        if (z > 6.0) break;
        auto [mean, se] = cell_stats(c, 0, zi);
        CHECK(std::abs(mean - std::erfc(std::sqrt(z))) <= 4.0 * se + 0.005);
    }
    auto q = z_quantile(c, 0, 0.05);
    CHECK_FALSE(q.below_resolution);
    CHECK(q.z == doctest::Approx(1.9207).epsilon(0.08));
    // quantiles decrease in p
    CHECK(z_quantile(c, 0, 0.5).z < z_quantile(c, 0, 0.05).z);
    CHECK(z_quantile(c, 0, 1e-7).below_resolution);
    CHECK_THROWS_AS(z_quantile(c, 3, 0.05), std::out_of_range);
    CHECK_THROWS_AS(z_quantile(c, 0, 0.0), std::domain_error);
}

TEST_CASE("propagation check") {
    CurveOptions with_base;
    with_base.with_nonadaptive = true;
    SUBCASE("holds with adaptation off") {
        auto c = gaussian_curve(kInf, 50, 8, with_base);
        auto chk = check_propagation(c, 1e-3);
        CHECK(chk.holds);
        CHECK(chk.violations.empty());
        CHECK(chk.p_floor >= c.resolution());
    }
    SUBCASE("an aggressive penalty scale is rejected") {
        auto c = gaussian_curve(0.05, 50, 8, with_base);
        auto chk = check_propagation(c, 1e-3);
        CHECK_FALSE(chk.holds);
        CHECK(chk.violations.size() > 0);
        for (const auto& v : chk.violations) CHECK(v.dz > 0.0);
    }
    SUBCASE("degenerate epsilon leaves nothing to check") {
        auto c = gaussian_curve(kInf, 10, 2);
        CHECK(check_propagation(c, 0.95).holds);
        CHECK_THROWS_AS(check_propagation(c, 0.0), std::domain_error);
        // a real check without the baseline surface is refused
        CHECK_THROWS_AS(check_propagation(c, 1e-2), std::domain_error);
    }
}

TEST_CASE("lambda calibration") {
    auto d = Design::line(100);
    BandwidthSchedule sched{0.8, 1.25, 8};
    CurveOptions opt;
    opt.reps = 60;
    auto fam = Family::gaussian();
    auto kloc = KernelSpec::parabola();
    auto kad = KernelSpec::plateau_triangle();

    auto coarse = calibrate_lambda(fam, 0.0, 1e-2, d, sched, kloc, kad, opt,
                                   0.05, 60.0);
    auto fine = calibrate_lambda(fam, 0.0, 1e-3, d, sched, kloc, kad, opt,
                                 0.05, 60.0);
    CHECK(coarse.lambda_opt > 0.05);
    CHECK(coarse.lambda_opt < 60.0);
    CHECK(fine.lambda_opt >= coarse.lambda_opt);
    CHECK(coarse.trials.size() >= 3);
    // the result is reproducible and anything above it still passes
    auto again = calibrate_lambda(fam, 0.0, 1e-2, d, sched, kloc, kad, opt,
                                  0.05, 60.0);
    CHECK(again.lambda_opt == coarse.lambda_opt);
    CurveOptions with_base = opt;
    with_base.with_nonadaptive = true;
    auto above = phat_surface(fam, 0.0, 2.0 * coarse.lambda_opt, d, sched, kloc,
                              kad, with_base);
    CHECK(check_propagation(above, 1e-2).holds);

    CHECK_THROWS_AS(calibrate_lambda(fam, 0.0, 1e-2, d, sched, kloc, kad, opt,
                                     1e4, 1e5),
                    std::domain_error);  // passes already at the lower bracket
    CHECK_THROWS_AS(calibrate_lambda(fam, 0.0, 1e-2, d, sched, kloc, kad, opt,
                                     1e-4, 1e-3),
                    std::domain_error);  // still fails at the upper bracket
}

TEST_CASE("surfaces are deterministic in the seed") {
    auto a = gaussian_curve(6.0, 30, 4);
    auto b = gaussian_curve(6.0, 30, 4);
    CHECK(a.phat == b.phat);
    CHECK(a.counts == b.counts);
    CurveOptions other;
    other.seed = 999;
    auto c = gaussian_curve(6.0, 30, 4, other);
    CHECK(a.phat != c.phat);
}

TEST_CASE("parameter invariance") {
    auto d = Design::line(80);
    BandwidthSchedule sched{0.8, 1.25, 5};
    CurveOptions opt;
    opt.reps = 40;
    auto kloc = KernelSpec::parabola();
    auto kad = KernelSpec::plateau_triangle();

    SUBCASE("shift family, exactly") {
        auto rep = invariance_report(Family::gaussian(), {0.0, 10.0, -3.0}, 8.0,
                                     d, sched, kloc, kad, opt);
        CHECK(rep.max_discrepancy == 0.0);
        CHECK(rep.eps_levels[0] == rep.eps_levels[1]);
        CHECK(rep.eps_levels[0] > 0.0);
        CHECK(rep.eps_levels[0] < 1.0);
    }
    SUBCASE("scale family, exactly") {
        auto rep = invariance_report(Family::exponential(), {1.0, 5.0}, 8.0, d,
                                     sched, kloc, kad, opt);
        CHECK(rep.max_discrepancy == 0.0);
    }
    SUBCASE("honest simulation stays close to the standardized one") {
        CurveOptions honest = opt;
        honest.coupled = false;
        auto a = phat_surface(Family::gaussian(), 0.0, 8.0, d, sched, kloc, kad,
                              opt);
        auto b = phat_surface(Family::gaussian(), 7.0, 8.0, d, sched, kloc, kad,
                              honest);
        CHECK_FALSE(b.coupled);
        double worst = 0.0;
        for (int k = 0; k <= a.kmax(); ++k)
            for (std::size_t zi = 0; zi < a.z_grid.size(); ++zi)
                worst = std::max(worst,
                                 std::abs(a.phat[k][zi] - b.phat[k][zi]));
        CHECK(worst <= 0.01);  // same noise stream, shifted data
    }
}

TEST_CASE("quantile isolines") {
    auto d = Design::line(80);
    BandwidthSchedule sched{0.8, 1.25, 5};
    CurveOptions opt;
    opt.reps = 40;
    opt.with_nonadaptive = true;
    auto c = phat_surface(Family::gaussian(), 0.0, kInf, d, sched,
                          KernelSpec::parabola(), KernelSpec::plateau_triangle(),
                          opt);
    auto rows = emit_isolines(c, {0.5, 0.05});
    CHECK(rows.size() == 2 * 2 * static_cast<std::size_t>(c.kmax() + 1));
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        // adaptation off: both estimators coincide
        CHECK(rows[i].z == rows[i + 1].z);
    }
    for (const auto& r : rows) CHECK(r.h == c.h_grid[r.k]);
    // the 50% line sits below the 5% line at every step
    for (std::size_t i = 0; i + 2 < rows.size(); i += 4)
        CHECK(rows[i].z <= rows[i + 2].z);

    auto plain = gaussian_curve(kInf, 10, 2);
    CHECK_THROWS_AS(emit_isolines(plain, {0.5}), std::domain_error);
}
