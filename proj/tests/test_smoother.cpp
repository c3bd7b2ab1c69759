#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "psaws/rng.hpp"
#include "psaws/smoother.hpp"

using namespace psaws;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> gaussian_noise(std::size_t n, double mean, double sd,
                                   std::uint64_t seed, const char* label) {
    auto rng = make_stream(seed, label);
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> y(n);
    for (double& v : y) v = dist(rng);
    return y;
}

bool bitwise_equal(const SmootherState& a, const SmootherState& b) {
    return a.k == b.k && a.theta == b.theta && a.n_tilde == b.n_tilde &&
           a.n_bar == b.n_bar;
}

}  // namespace

TEST_CASE("nonadaptive means") {
    SUBCASE("radius below spacing reproduces the data") {
        auto d = Design::line(7);
        std::vector<double> y{3, 1, 4, 1, 5, 9, 2};
        auto s = nonadaptive_estimate(d, KernelSpec::parabola(), y, 0.5);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(s.theta[i] == y[i]);
            CHECK(s.n_tilde[i] == 1.0);
        }
    }
    SUBCASE("constant data stays constant") {
        auto d = Design::grid(8, 8);
        std::vector<double> y(64, 2.5);
        auto s = nonadaptive_estimate(d, KernelSpec::plateau_triangle(), y, 3.0);
        for (double t : s.theta) CHECK(t == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("uniform kernel at unit radius averages closed balls") {
        auto d = Design::line(3);
        std::vector<double> y{1, 3, 5};
        auto s = nonadaptive_estimate(d, KernelSpec::uniform(), y, 1.0);
        CHECK(s.theta[0] == 2.0);
        CHECK(s.theta[1] == 3.0);
        CHECK(s.theta[2] == 4.0);
        CHECK(s.n_tilde[0] == 2.0);
        CHECK(s.n_tilde[1] == 3.0);
        CHECK(s.n_bar == s.n_tilde);
    }
    SUBCASE("shape mismatch is rejected") {
        auto d = Design::line(3);
        std::vector<double> y{1, 2};
        CHECK_THROWS_AS(nonadaptive_estimate(d, KernelSpec::uniform(), y, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("statistical penalty") {
    auto fam = Family::gaussian();
    SmootherState s;
    s.theta = {1.0, 1.0, 3.0};
    s.n_tilde = {4.0, 2.0, 1.0};
    CHECK(penalty(s, fam, 0, 1) == 0.0);
    // Gaussian kl(1,3) = (3-1)^2/2 = 2, scaled by n_tilde[0] = 4
    CHECK(penalty(s, fam, 0, 2) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(penalty(s, fam, 1, 2) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(penalty(s, fam, 2, 0) == doctest::Approx(2.0).epsilon(1e-15));

    // boundary values are pulled inside the domain first
    auto pois = Family::poisson();
    SmootherState z;
    z.theta = {0.0, 1.0};
    z.n_tilde = {1.0, 1.0};
    CHECK(std::isfinite(penalty(z, pois, 0, 1)));
    CHECK(std::isfinite(penalty(z, pois, 1, 0)));
}

TEST_CASE("adaptive step limits") {
    auto d = Design::line(40);
    auto y = gaussian_noise(40, 1.0, 0.7, 11, "step-limits");
    BandwidthSchedule sched{0.9, 1.25, 6};
    SmootherConfig cfg{Family::gaussian(), kInf, sched};

    auto init = nonadaptive_estimate(d, cfg.kloc, y, sched.at(0));
    SUBCASE("infinite lambda reproduces the nonadaptive step exactly") {
        auto step = adaptive_step(init, cfg, d, y);
        auto plain = nonadaptive_estimate(d, cfg.kloc, y, sched.at(1));
        CHECK(step.theta == plain.theta);
        CHECK(step.n_tilde == plain.n_tilde);
        CHECK(step.n_tilde == step.n_bar);
    }
    SUBCASE("homogeneous previous estimates give full weights") {
        SmootherState flat = init;
        std::fill(flat.theta.begin(), flat.theta.end(), 1.0);
        cfg.lambda = 1e-6;  // tiny, but penalties are exactly zero
        auto step = adaptive_step(flat, cfg, d, y);
        auto plain = nonadaptive_estimate(d, cfg.kloc, y, sched.at(1));
        CHECK(step.theta == plain.theta);
        CHECK(step.n_tilde == step.n_bar);
    }
    SUBCASE("a gross discrepancy removes the neighbor entirely") {
        auto d2 = Design::line(2);
        std::vector<double> y2{0.0, 100.0};
        SmootherState prev;
        prev.k = 0;
        prev.theta = y2;
        prev.n_tilde = {1.0, 1.0};
        prev.n_bar = {1.0, 1.0};
        SmootherConfig c2{Family::gaussian(), 1.0,
                          BandwidthSchedule{0.9, 1.5, 2}};
        auto step = adaptive_step(prev, c2, d2, y2);
        CHECK(step.theta[0] == 0.0);
        CHECK(step.theta[1] == 100.0);
        CHECK(step.n_tilde[0] == 1.0);
        CHECK(step.n_bar[0] > 1.0);
    }
    SUBCASE("invalid configuration") {
        cfg.lambda = 0.0;
        CHECK_THROWS_AS(adaptive_step(init, cfg, d, y), std::domain_error);
        SmootherConfig raw{Family::gamma(2.0), kInf, sched};
        CHECK_THROWS_AS(adaptive_step(init, raw, d, y), std::domain_error);
    }
}

TEST_CASE("serial reference matches the parallel kernels bitwise") {
    BandwidthSchedule sched{0.9, 1.25, 6};
    SUBCASE("1d gaussian") {
        auto d = Design::line(60);
        auto y = gaussian_noise(60, 0.0, 1.0, 21, "bitwise-1d");
        for (std::size_t i = 30; i < 60; ++i) y[i] += 2.0;
        SmootherConfig cfg{Family::gaussian(), 8.0, sched};
        CHECK(bitwise_equal(run(cfg, d, y), serial::run(cfg, d, y)));
    }
    SUBCASE("2d poisson with projection") {
        auto d = Design::grid(12, 12);
        auto rng = make_stream(22, "bitwise-2d");
        std::vector<double> y(d.size());
        auto fam = Family::poisson();
        for (std::size_t i = 0; i < d.size(); ++i)
            y[i] = fam.sample(i < 72 ? 2.0 : 6.0, rng);
        SmootherConfig cfg{fam, 10.0, BandwidthSchedule{0.9, 1.12, 5}};
        cfg.projection = Family::build_kappa_set(fam, 0.5, 10.0);
        CHECK(bitwise_equal(run(cfg, d, y), serial::run(cfg, d, y)));
    }
    SUBCASE("single steps agree too") {
        auto d = Design::line(25);
        auto y = gaussian_noise(25, 0.0, 1.0, 23, "bitwise-step");
        SmootherConfig cfg{Family::gaussian(), 5.0, sched};
        auto init = nonadaptive_estimate(d, cfg.kloc, y, sched.at(0));
        auto init_s = serial::nonadaptive_estimate(d, cfg.kloc, y, sched.at(0));
        CHECK(bitwise_equal(init, init_s));
        CHECK(bitwise_equal(adaptive_step(init, cfg, d, y),
                            serial::adaptive_step(init_s, cfg, d, y)));
    }
}

TEST_CASE("full runs") {
    auto d = Design::line(80);
    auto y = gaussian_noise(80, 0.0, 1.0, 31, "full-run");
    BandwidthSchedule sched{0.9, 1.25, 8};

    SUBCASE("zero steps is just the initialization") {
        SmootherConfig cfg{Family::gaussian(), 4.0,
                           BandwidthSchedule{0.9, 1.25, 0}};
        auto out = run(cfg, d, y);
        auto init = nonadaptive_estimate(d, cfg.kloc, y, 0.9);
        CHECK(bitwise_equal(out, init));
    }
    SUBCASE("infinite lambda equals per-step nonadaptive estimation") {
        SmootherConfig cfg{Family::gaussian(), kInf, sched};
        int seen = 0;
        run(cfg, d, y, [&](const SmootherState& s) {
            auto plain = nonadaptive_estimate(d, cfg.kloc, y, sched.at(s.k));
            CHECK(s.theta == plain.theta);
            CHECK(s.n_tilde == plain.n_tilde);
            ++seen;
        });
        CHECK(seen == sched.kstar + 1);
        // weight sums only grow when nothing is ever excluded
        SmootherState last;
        run(cfg, d, y, [&](const SmootherState& s) {
            if (s.k > 0)
                for (std::size_t i = 0; i < d.size(); ++i)
                    CHECK(s.n_tilde[i] >= last.n_tilde[i]);
            last = s;
        });
    }
    SUBCASE("weight sum and range invariants") {
        SmootherConfig cfg{Family::gaussian(), 6.0, sched};
        const double lo = *std::min_element(y.begin(), y.end());
        const double hi = *std::max_element(y.begin(), y.end());
        run(cfg, d, y, [&](const SmootherState& s) {
            for (std::size_t i = 0; i < d.size(); ++i) {
                CHECK(s.n_tilde[i] >= 1.0);  // self weight is always 1
                CHECK(s.n_tilde[i] <= s.n_bar[i] + 1e-12);
                CHECK(s.theta[i] >= lo);
                CHECK(s.theta[i] <= hi);
            }
        });
    }
    SUBCASE("reversing a 1d design reverses the estimate") {
        SmootherConfig cfg{Family::gaussian(), 6.0, sched};
        auto rev = y;
        std::reverse(rev.begin(), rev.end());
        auto a = run(cfg, d, y);
        auto b = run(cfg, d, rev);
        std::reverse(b.theta.begin(), b.theta.end());
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(a.theta[i] == doctest::Approx(b.theta[i]).epsilon(1e-13));
    }
}

TEST_CASE("fitted log-likelihood identity") {
    // sum_j w (log p(Y_j, mean) - log p(Y_j, theta)) == N * KL(mean, theta)
    auto d = Design::line(50);
    auto rng = make_stream(41, "loglik-identity");
    for (auto fam : {Family::gaussian(), Family::exponential(), Family::poisson()}) {
        std::vector<double> y(d.size());
        for (double& v : y) v = fam.sample(2.0, rng);
        for (double theta : {0.7, 1.9, 3.4}) {
            CHECK(fitted_loglik_identity_check(d, fam, y, 2.5, theta) <= 1e-9);
        }
    }
}
