#include "soup/mc_engine.hpp"

#include <cmath>

namespace soup {

ComparisonRow make_z_row(const std::string& name, const std::string& kind, double exact,
                         const Welford& acc, double seconds) {
    ComparisonRow row;
    row.name = name;
    row.kind = kind;
    row.exact = exact;
    row.estimate = acc.mean();
    row.stderror = acc.stderror();
    double z = (acc.mean() - exact) / acc.stderror();
    row.z = z;
    row.pass = std::isfinite(z) && std::fabs(z) <= kZThreshold;
    row.samples = acc.count();
    row.seconds = seconds;
    return row;
}

ComparisonRow make_residual_row(const std::string& name, const std::string& kind, double residual,
                                double tol, std::uint64_t samples, double seconds) {
    ComparisonRow row;
    row.name = name;
    row.kind = kind;
    row.residual = residual;
    row.pass = std::isfinite(residual) && std::fabs(residual) <= tol;
    row.samples = samples;
    row.seconds = seconds;
    return row;
}

ComparisonRow make_exact_row(const std::string& name, const std::string& kind, double expected,
                             double got, double rel_tol, double seconds) {
    ComparisonRow row;
    row.name = name;
    row.kind = kind;
    row.exact = expected;
    row.estimate = got;
    double scale = std::max(std::fabs(expected), 1e-30);
    row.residual = std::fabs(got - expected) / scale;
    row.pass = std::isfinite(got) && *row.residual <= rel_tol;
    row.samples = 1;
    row.seconds = seconds;
    return row;
}

namespace {
// the shard count is fixed so the stream layout, and therefore every
// estimate, is independent of how many threads execute the shards
constexpr int kShards = 32;
}  // namespace

Welford mc_run(std::uint64_t samples, int threads, std::uint64_t seed, std::uint64_t check_id,
               const std::function<double(Rng&)>& body, double time_cap_seconds) {
    if (threads < 1) threads = 1;
    const std::uint64_t per_shard = (samples + kShards - 1) / kShards;
    std::vector<Welford> shard_acc(kShards);
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(time_cap_seconds));
    auto work = [&](int worker) {
        for (int shard = worker; shard < kShards; shard += threads) {
            Rng rng(seed, check_id, static_cast<std::uint64_t>(shard));
            Welford& acc = shard_acc[shard];
            for (std::uint64_t i = 0; i < per_shard; ++i) {
                acc.add(body(rng));
                if ((i & 0x3ff) == 0x3ff && std::chrono::steady_clock::now() > deadline) break;
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    Welford total;
    for (const Welford& w : shard_acc) total.merge(w);
    return total;
}

std::vector<Welford> mc_run_vec(std::uint64_t samples, int threads, std::uint64_t seed,
                                std::uint64_t check_id, std::size_t dim,
                                const std::function<void(Rng&, std::vector<double>&)>& body,
                                double time_cap_seconds) {
    if (threads < 1) threads = 1;
    const std::uint64_t per_shard = (samples + kShards - 1) / kShards;
    std::vector<std::vector<Welford>> shard_acc(kShards, std::vector<Welford>(dim));
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(time_cap_seconds));
    auto work = [&](int worker) {
        std::vector<double> vals(dim);
        for (int shard = worker; shard < kShards; shard += threads) {
            Rng rng(seed, check_id, static_cast<std::uint64_t>(shard));
            for (std::uint64_t i = 0; i < per_shard; ++i) {
                body(rng, vals);
                for (std::size_t k = 0; k < dim; ++k) shard_acc[shard][k].add(vals[k]);
                if ((i & 0x3ff) == 0x3ff && std::chrono::steady_clock::now() > deadline) break;
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    std::vector<Welford> total(dim);
    for (const auto& shard : shard_acc)
        for (std::size_t k = 0; k < dim; ++k) total[k].merge(shard[k]);
    return total;
}

Estimator loop_stratum_oracle(const LoopMeasure& measure, const OccupationPolynomial& functional,
                              std::uint64_t budget, Rng& rng) {
    if (functional.constant_term() != 0.0)
        throw InfiniteMass("loop_stratum_oracle: functional has a constant term");

    // trivial strata are exact: a monomial concentrated at one state x of
    // degree d integrates to Gamma(d)/q^d; mixed monomials vanish there
    double trivial_part = 0.0;
    for (const auto& [mono, coeff] : functional.terms()) {
        if (mono.size() != 1) continue;
        const auto& [state, deg] = *mono.begin();
        trivial_part += coeff * measure.trivial_power_moment(state, deg);
    }

    // skeleton stratum by importance sampling from mu_J / |mu_J|
    Estimator est;
    est.name = "loop_stratum_oracle";
    const double mass = measure.nontrivial_mass();
    for (std::uint64_t i = 0; i < budget; ++i) {
        double skel = 0.0;
        if (mass > 0.0) skel = mass * functional.evaluate(measure.sample_skeleton_loop(rng));
        est.add(skel + trivial_part);
    }
    return est;
}

double poisson_chi2_pvalue(const std::vector<std::uint64_t>& histogram, double mean,
                           std::uint64_t total) {
    if (total == 0) throw Error("poisson_chi2_pvalue: no samples");
    // expected counts, pooling the tail so every bin has >= 5 expected
    std::vector<double> expected;
    std::vector<double> observed;
    double pmf = std::exp(-mean);
    double tail_exp = static_cast<double>(total);
    double tail_obs = static_cast<double>(total);
    for (std::size_t k = 0; k < histogram.size() + 30; ++k) {
        double e = pmf * static_cast<double>(total);
        double o = k < histogram.size() ? static_cast<double>(histogram[k]) : 0.0;
        if (tail_exp - e < 5.0 || e < 5.0) break;
        expected.push_back(e);
        observed.push_back(o);
        tail_exp -= e;
        tail_obs -= o;
        pmf *= mean / static_cast<double>(k + 1);
    }
    expected.push_back(std::max(tail_exp, 1e-12));
    observed.push_back(tail_obs);
    if (expected.size() < 2) return 1.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        double d = observed[i] - expected[i];
        chi2 += d * d / expected[i];
    }
    double dof = static_cast<double>(expected.size()) - 1.0;
    return chi2_sf(chi2, dof);
}

}  // namespace soup
