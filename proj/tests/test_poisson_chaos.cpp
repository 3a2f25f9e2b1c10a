#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soup/exact_moments.hpp"
#include "soup/poisson_chaos.hpp"

using namespace soup;

namespace {

std::shared_ptr<const MarkovKernel> fixture2() {
    Eigen::MatrixXd q(2, 2);
    q << -1.0, 0.5, 0.25, -1.0;
    return std::make_shared<const MarkovKernel>(build_kernel(q));
}

LoopSoup synthetic(const MarkovKernel& kernel, Rng& rng, double alpha, int max_loops = 6) {
    LoopSoup soup;
    soup.alpha = alpha;
    soup.kernel = &kernel;
    int n = 1 + static_cast<int>(rng.uniform() * max_loops);
    for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.5) {
            soup.loops.push_back(
                make_trivial_loop(static_cast<int>(rng.uniform() * 2), 0.05 + rng.uniform()));
        } else {
            soup.loops.push_back(make_skeleton_loop({0, 1}, {0.05 + rng.uniform(),
                                                             0.05 + rng.uniform()}));
        }
    }
    return soup;
}

SoupFunctional random_functional(const LoopMeasure& mu, Rng& rng) {
    OccupationPolynomial p;
    p += poly_in_state(static_cast<int>(rng.uniform() * 2), {0.0, 0.2 + 0.5 * rng.uniform()});
    p += poly_in_state(static_cast<int>(rng.uniform() * 2), {0.0, 0.0, 0.1 + 0.2 * rng.uniform()});
    return make_functional(mu, p);
}

}  // namespace

TEST_CASE("phi_n basics") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    SoupFunctional g = make_functional(mu, OccupationPolynomial::occupation(0));

    LoopSoup soup;
    soup.alpha = 1.0;
    soup.kernel = kernel.get();
    soup.loops.push_back(make_trivial_loop(0, 2.0));
    soup.loops.push_back(make_trivial_loop(0, 3.0));

    CHECK(phi_n(soup, {g}) == doctest::Approx(5.0));
    // ordered distinct pairs of the two loops
    CHECK(phi_n(soup, {g, g}) == doctest::Approx(2.0 * 2.0 * 3.0));
    CHECK(phi_n(soup, {}) == doctest::Approx(1.0));
}

TEST_CASE("phi partition expansion equals the literal tuple sum") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        LoopSoup soup = synthetic(*kernel, rng, 1.0);
        std::vector<SoupFunctional> gs;
        int n = 1 + static_cast<int>(rng.uniform() * 3);
        for (int i = 0; i < n; ++i) gs.push_back(random_functional(mu, rng));
        double fast = phi_n(soup, gs);
        double direct = phi_n_direct(soup, gs);
        CHECK(fast == doctest::Approx(direct).epsilon(1e-11).scale(std::fabs(direct) + 1.0));
    }
}

TEST_CASE("pair identity phi1 phi1 = phi2 + phi1(g1 g2)") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        LoopSoup soup = synthetic(*kernel, rng, 1.0);
        SoupFunctional g1 = random_functional(mu, rng);
        SoupFunctional g2 = random_functional(mu, rng);
        double lhs = phi_n(soup, {g1}) * phi_n(soup, {g2});
        double rhs = phi_n(soup, {g1, g2}) + phi_n(soup, {product_functional(mu, g1, g2)});
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("wick expansion residuals vanish") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        LoopSoup soup = synthetic(*kernel, rng, 1.0);
        std::vector<SoupFunctional> g3{random_functional(mu, rng), random_functional(mu, rng),
                                       random_functional(mu, rng)};
        CHECK(std::fabs(wick_expand_residual(soup, mu, {2, 1}, g3)) <= 1e-10);
        std::vector<SoupFunctional> g4 = g3;
        g4.push_back(random_functional(mu, rng));
        CHECK(std::fabs(wick_expand_residual(soup, mu, {2, 2}, g4)) <= 1e-10);
        // n-th power of phi_1: all blocks the same functional
        std::vector<SoupFunctional> rep(4, g3[0]);
        CHECK(std::fabs(wick_expand_residual(soup, mu, {1, 1, 1, 1}, rep)) <= 1e-10);
    }
}

TEST_CASE("I_n basics and empty-soup value") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    SoupFunctional g = make_functional(mu, OccupationPolynomial::occupation(0));
    double alpha = 1.0;

    LoopSoup empty;
    empty.alpha = alpha;
    empty.kernel = kernel.get();
    // I_1 = -alpha mu(g); I_2(g,g) = (alpha mu(g))^2 on the empty soup
    CHECK(I_n(empty, alpha, {g}) == doctest::Approx(-8.0 / 7.0).epsilon(1e-13));
    CHECK(I_n(empty, alpha, {g, g}) == doctest::Approx(std::pow(8.0 / 7.0, 2)).epsilon(1e-13));

    LoopSoup one;
    one.alpha = alpha;
    one.kernel = kernel.get();
    one.loops.push_back(make_trivial_loop(0, 2.0));
    CHECK(I_n(one, alpha, {g}) == doctest::Approx(2.0 - 8.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("exponential chaos identities") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(11);
    double alpha = 1.0;
    // E(0) = 1
    LoopSoup soup = synthetic(*kernel, rng, alpha);
    SoupFunctional zero = make_functional(mu, OccupationPolynomial());
    CHECK(exp_chaos(soup, alpha, zero) == doctest::Approx(1.0));
    // product rule
    for (int trial = 0; trial < 100; ++trial) {
        LoopSoup s = synthetic(*kernel, rng, alpha);
        SoupFunctional f = random_functional(mu, rng);
        SoupFunctional g = random_functional(mu, rng);
        SoupFunctional fg = product_functional(mu, f, g);
        SoupFunctional sum = make_functional(mu, f.poly + g.poly + fg.poly);
        double lhs = exp_chaos(s, alpha, f) * exp_chaos(s, alpha, g);
        double rhs = exp_chaos(s, alpha, sum) * std::exp(alpha * fg.mu_mean);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("exponential chaos equals its truncated wick sum") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(13);
    double alpha = 1.0;
    // |g| <= 0.5 on loops: scale a bounded-ish occupation functional
    for (int trial = 0; trial < 10; ++trial) {
        LoopSoup soup = synthetic(*kernel, rng, alpha, 8);
        SoupFunctional g = make_functional(
            mu, poly_in_state(0, {0.0, 0.15}));  // occupations stay close to 1 here
        double target = exp_chaos(soup, alpha, g);
        double partial = 0.0;
        double fact = 1.0;
        for (int n = 0; n <= 12; ++n) {
            if (n > 0) fact *= n;
            std::vector<SoupFunctional> rep(n, g);
            partial += I_n(soup, alpha, rep) / fact;
        }
        CHECK(std::fabs(partial - target) <= 1e-8 * std::max(1.0, std::fabs(target)));
    }
}

TEST_CASE("martingale decomposition residual vanishes") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        CoupledSoupPair pair;
        pair.alpha = 0.8;
        pair.alpha_prime = 0.6;
        pair.base = synthetic(*kernel, rng, pair.alpha);
        pair.extension = synthetic(*kernel, rng, pair.alpha_prime);
        for (int n = 1; n <= 3; ++n) {
            std::vector<SoupFunctional> gs;
            for (int i = 0; i < n; ++i) gs.push_back(random_functional(mu, rng));
            CHECK(std::fabs(martingale_decompose_residual(pair, gs)) <= 1e-10);
        }
    }
}

TEST_CASE("statistical chaos properties on sampled soups") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel, 1e-8);
    double alpha = 1.0;
    SoupFunctional f = make_functional(mu, OccupationPolynomial::occupation(0));
    SoupFunctional g = make_functional(mu, OccupationPolynomial::occupation(1));
    SoupFunctional fg = product_functional(mu, f, g);
    Rng rng(19);
    const int n = 50000;
    Welford mean_i1, mean_i2, cov11, orth12, expm;
    double lam = 0.9, beta = 0.4;
    std::vector<double> lamvec{lam, 0.0};
    double mu_bounded = beta * mu.laplace_functional(lamvec);
    auto bounded = [&](const BasedLoop& loop) {
        return beta * (1.0 - std::exp(-lam * loop.occupation(0)));
    };
    for (int i = 0; i < n; ++i) {
        LoopSoup soup = mu.sample(alpha, rng);
        double i1f = I_n(soup, alpha, {f});
        double i1g = I_n(soup, alpha, {g});
        double i2 = I_n(soup, alpha, {f, g});
        mean_i1.add(i1f);
        mean_i2.add(i2);
        cov11.add(i1f * i1g);
        orth12.add(i1f * i2);
        expm.add(exp_chaos(soup, alpha, bounded, mu_bounded));
    }
    CHECK(std::fabs(mean_i1.mean()) <= 4.0 * mean_i1.stderror());
    CHECK(std::fabs(mean_i2.mean()) <= 4.0 * mean_i2.stderror());
    double zc = (cov11.mean() - alpha * fg.mu_mean) / cov11.stderror();
    CHECK(std::fabs(zc) <= 4.0);
    CHECK(std::fabs(orth12.mean()) <= 4.0 * orth12.stderror());
    double ze = (expm.mean() - 1.0) / expm.stderror();
    CHECK(std::fabs(ze) <= 4.0);
}

TEST_CASE("coupled pair is a soup at the combined intensity") {
    auto kernel = fixture2();
    LoopMeasure mu(kernel, 1e-6);
    Rng rng(23);
    const int n = 40000;
    Welford count;
    for (int i = 0; i < n; ++i) {
        CoupledSoupPair pair = sample_coupled_pair(mu, 0.7, 0.5, rng);
        count.add(static_cast<double>(pair.combined().loops.size()));
    }
    double target = 1.2 * mu.total_sampled_mass();
    CHECK(std::fabs(count.mean() - target) <= 4.0 * count.stderror());
}
