#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "ctcm/model.hpp"

using namespace ctcm;

namespace {

State make_state(std::vector<std::uint8_t> attached, std::vector<double> positions,
                 std::vector<double> centroid) {
    State s;
    s.attached = std::move(attached);
    s.positions = std::move(positions);
    s.centroid = std::move(centroid);
    return s;
}

PerturbationDistribution unit_box2() {
    return UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}};
}

} // namespace

TEST_CASE("params validation") {
    CHECK_THROWS_AS(ModelParams(-0.1, 0.2, 3, PointMass{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.1, 0.0, 3, PointMass{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.1, 0.2, 0, PointMass{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.1, 0.2, 3, DiscreteMixture{{1.0}, {{}}}),
                    std::invalid_argument);
    const ModelParams p(0.2, 0.05, 3, unit_box2());
    CHECK(p.dim == 2);
    CHECK(p.eta_mean == std::vector<double>{1.0, 1.0});
    CHECK(p.eta_radius == 2.0);
    CHECK(p.rate_bound == doctest::Approx(0.6).epsilon(1e-15)); // 3 * max(0.2, 0.05)
}

TEST_CASE("jump rate counts attached and detached sites") {
    const ModelParams p(0.2, 0.05, 3, PointMass{{1.0, 0.0}});
    // one attached, two detached: 0.05 + 0.2 + 0.2
    const State s = make_state({1, 0, 0}, {0, 0, 5, 5, -3, 2}, {0, 0});
    CHECK(rate(s, p) == doctest::Approx(0.45).epsilon(1e-14));

    const State all = make_initial_all_attached(p);
    CHECK(rate(all, p) == doctest::Approx(0.15).epsilon(1e-14)); // 3 * 0.05

    const ModelParams wrong(0.2, 0.05, 4, PointMass{{1.0, 0.0}});
    CHECK_THROWS_AS(rate(s, wrong), std::invalid_argument);
}

TEST_CASE("site selection probabilities") {
    const ModelParams p(0.2, 0.05, 3, PointMass{{1.0, 0.0}});
    const State s = make_state({1, 0, 0}, {0, 0, 5, 5, -3, 2}, {0, 0});
    const std::vector<double> r = site_selection_probs(s, p);
    CHECK(r[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-14)); // 0.05 / 0.45
    CHECK(r[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-14)); // 0.20 / 0.45
    CHECK(r[2] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flip_status toggles exactly one flag and nothing else") {
    const State s = make_state({1, 0}, {1.0, 3.0}, {1.0});
    const State t = flip_status(s, 1);
    CHECK(t.attached == std::vector<std::uint8_t>{1, 1});
    CHECK(t.positions == s.positions);
    CHECK(t.centroid == s.centroid);
    CHECK(s.attached[1] == 0); // source untouched
}

TEST_CASE("detach moves the centroid to the remaining attached mean") {
    const ModelParams p(0.2, 0.05, 2, PointMass{{1.0}});
    // two attached 1d sites at 1 and 3, centroid 2
    const State s = make_state({1, 1}, {1.0, 3.0}, {2.0});

    const State after = detach(s, p, 0);
    CHECK(after.attached == std::vector<std::uint8_t>{0, 1});
    CHECK(after.centroid[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(after.positions == std::vector<double>{1.0, 3.0}); // positions never move

    // detaching the last attached site freezes the centroid
    const State empty = detach(after, p, 1);
    CHECK(empty.attach_count() == 0);
    CHECK(empty.centroid[0] == doctest::Approx(3.0).epsilon(1e-15));

    CHECK_THROWS_AS(detach(after, p, 0), std::invalid_argument); // already detached
    CHECK_THROWS_AS(detach(s, p, 5), std::invalid_argument);
}

TEST_CASE("attach places the site at centroid + x and shifts the centroid by x/(k+1)") {
    const ModelParams p(0.2, 0.05, 2, PointMass{{1.0}});
    const State s = make_state({0, 1}, {1.0, 3.0}, {3.0});

    const std::vector<double> x = {-2.0};
    const State after = attach(s, p, 0, x);
    CHECK(after.attached == std::vector<std::uint8_t>{1, 1});
    CHECK(after.positions[0] == doctest::Approx(1.0).epsilon(1e-15));  // 3 + (-2)
    CHECK(after.centroid[0] == doctest::Approx(2.0).epsilon(1e-15));   // 3 + (-2)/2
    CHECK(centroid_residual(after) < 1e-15);

    CHECK_THROWS_AS(attach(after, p, 0, x), std::invalid_argument); // already attached
    const std::vector<double> bad = {1.0, 2.0};
    CHECK_THROWS_AS(attach(s, p, 0, bad), std::invalid_argument);
}

TEST_CASE("attach onto an empty state adopts the frozen centroid as reference") {
    const ModelParams p(0.2, 0.05, 2, PointMass{{1.0}});
    const State none = make_state({0, 0}, {1.0, 3.0}, {5.0});
    const std::vector<double> x = {2.0};
    const State after = attach(none, p, 1, x);
    CHECK(after.positions[1] == doctest::Approx(7.0).epsilon(1e-15)); // 5 + 2
    CHECK(after.centroid[0] == doctest::Approx(7.0).epsilon(1e-15)); // 5 + 2/1
    CHECK(centroid_residual(after) < 1e-15);
}

TEST_CASE("project returns the attach count") {
    CHECK(project(make_state({1, 0, 1}, {0, 0, 0}, {0})) == 2);
    CHECK(project(make_state({0, 0}, {0, 0}, {0})) == 0);
}

TEST_CASE("max position norm covers detached sites and the centroid slot") {
    CHECK(max_position_norm(make_state({1, 0}, {1.0, -100.0}, {1.0})) == 100.0);
    CHECK(max_position_norm(make_state({1, 0}, {1.0, 2.0}, {-7.0})) == 7.0);
}

TEST_CASE("sample_jump frequencies follow the selection probabilities") {
    const ModelParams p(0.2, 0.05, 3, unit_box2());
    const State s = make_state({1, 0, 0}, {0, 0, 5, 5, -3, 2}, {0, 0});
    Rng rng = make_rng(51);
    const int n = 20000;
    int detaches = 0;
    for (int i = 0; i < n; ++i) {
        const State next = sample_jump(s, p, rng);
        if (next.attach_count() == 0) ++detaches;
        else CHECK(next.attach_count() == 2);
    }
    // site 0 is chosen with probability 1/9
    const double phat = detaches / static_cast<double>(n);
    const double se = std::sqrt((1.0 / 9.0) * (8.0 / 9.0) / n);
    CHECK(std::abs(phat - 1.0 / 9.0) < 4.0 * se);

    Rng r1 = make_rng(52), r2 = make_rng(52);
    CHECK(sample_jump(s, p, r1).centroid == sample_jump(s, p, r2).centroid);
}

TEST_CASE("one-step expectation of a constant is the constant") {
    const ModelParams p(0.3, 0.1, 4, unit_box2());
    State s = make_initial_all_attached(p);
    auto f = [](const State&) { return std::vector<double>{1.0}; };
    const std::vector<double> e = expect_one_step(s, p, f);
    // selection probabilities sum to 1 up to rounding
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("one-step expectation with point-mass perturbation matches direct assembly") {
    const ModelParams p(0.3, 0.1, 3, PointMass{{2.0, -1.0}});
    const State s = make_state({1, 1, 0}, {1, 0, 3, 2, 9, 9}, {2, 1});
    auto f = [](const State& x) {
        std::vector<double> out = x.centroid;
        out.push_back(static_cast<double>(project(x)));
        return out;
    };
    const std::vector<double> got = expect_one_step(s, p, f);

    const std::vector<double> r = site_selection_probs(s, p);
    std::vector<double> want(3, 0.0);
    const PointMass& pm = std::get<PointMass>(p.eta);
    for (int i = 0; i < 3; ++i) {
        const State next = s.attached[i] ? detach(s, p, i) : attach(s, p, i, pm.value);
        const std::vector<double> fx = f(next);
        for (int j = 0; j < 3; ++j) want[j] += r[i] * fx[j];
    }
    for (int j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-14));
}

TEST_CASE("one-step expectation sums discrete mixtures exactly") {
    const DiscreteMixture mix{.weights = {0.25, 0.75}, .atoms = {{1.0}, {-1.0}}};
    const ModelParams p(0.3, 0.1, 2, mix);
    const State s = make_state({1, 0}, {0.0, 9.0}, {0.0});
    auto f = [](const State& x) { return x.centroid; };
    const std::vector<double> got = expect_one_step(s, p, f);

    // detach branch: r0 = 0.1/0.4, centroid frozen at 0
    // attach branch: r1 = 0.3/0.4, centroid becomes z/2 with E z = -0.5
    const double want = 0.75 * (-0.5) / 2.0;
    CHECK(got[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("one-step expectation: affine rule is exact for the centroid") {
    const ModelParams p(0.3, 0.1, 2, unit_box2());
    const State s = make_state({1, 0}, {0.5, -0.5, 4, 4}, {0.5, -0.5});
    auto f = [](const State& x) { return x.centroid; };
    const std::vector<double> got = expect_one_step(s, p, f);

    const std::vector<double> r = site_selection_probs(s, p);
    std::vector<double> want(2, 0.0);
    const State detached = detach(s, p, 0);
    const State attached = attach(s, p, 1, p.eta_mean);
    for (int j = 0; j < 2; ++j)
        want[j] = r[0] * detached.centroid[j] + r[1] * attached.centroid[j];
    for (int j = 0; j < 2; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-14));
}

TEST_CASE("one-step expectation: monte carlo quadrature converges on a nonaffine f") {
    // state: 1d, site 0 attached at the centroid 0, site 1 detached
    const ModelParams p(0.3, 0.1, 2, UniformBox{.center = {1.0}, .half_width = {1.0}});
    const State s = make_state({1, 0}, {0.0, 9.0}, {0.0});
    auto f = [](const State& x) {
        return std::vector<double>{x.centroid[0] * x.centroid[0]};
    };
    // detach leaves centroid 0; attach gives (z/2)^2 with z uniform on [0,2],
    // so E f = 0.75 * E z^2 / 4 = 0.75 * (4/3) / 4 = 0.25
    EtaQuadrature quad{.rule = EtaQuadrature::Rule::monte_carlo, .sample_count = 100000, .seed = 5};
    const std::vector<double> got = expect_one_step(s, p, f, quad);
    CHECK(std::abs(got[0] - 0.25) < 0.003);

    EtaQuadrature bad{.rule = EtaQuadrature::Rule::monte_carlo, .sample_count = 0, .seed = 5};
    CHECK_THROWS_AS(expect_one_step(s, p, f, bad), std::invalid_argument);
}

TEST_CASE("random op sequences keep the class invariant and the movement bound") {
    const ModelParams p(0.07, 0.11, 6, unit_box2());
    Rng rng = make_rng(61);
    std::vector<double> scratch(2);
    for (int seq = 0; seq < 50; ++seq) {
        State s = make_initial_all_attached(p);
        double g_prev = max_position_norm(s);
        for (int op = 0; op < 40; ++op) {
            const double u = rng.uniform01();
            if (u < 0.3) {
                // explicit detach of a random attached site, when any
                std::vector<int> idx;
                for (int i = 0; i < p.n; ++i)
                    if (s.attached[i]) idx.push_back(i);
                if (!idx.empty())
                    s = detach(s, p, idx[static_cast<std::size_t>(rng.uniform01() * idx.size())]);
            } else if (u < 0.6) {
                std::vector<int> idx;
                for (int i = 0; i < p.n; ++i)
                    if (!s.attached[i]) idx.push_back(i);
                if (!idx.empty()) {
                    sample_perturbation(p.eta, rng, scratch);
                    s = attach(s, p, idx[static_cast<std::size_t>(rng.uniform01() * idx.size())],
                               scratch);
                }
            } else {
                step_in_place(s, p, rng, scratch);
            }
            const double g = max_position_norm(s);
            CHECK(centroid_residual(s) <= 1e-9);
            CHECK(g <= g_prev + p.eta_radius + 1e-9);
            g_prev = g;
        }
    }
}
