#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soup {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeRate : Error { using Error::Error; };
struct SingularGenerator : Error { using Error::Error; };
struct InfiniteMass : Error { using Error::Error; };
struct CutoffTooLarge : Error { using Error::Error; };
struct KernelMismatch : Error { using Error::Error; };
struct EnumerationBudget : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct BudgetTooSmall : Error { using Error::Error; };
struct UnsupportedDimension : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ stream; substreams are derived by splitmix-hashing the
// (root seed, stream ids) tuple so parallel shards never overlap by
// construction rather than by luck.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
        std::uint64_t sm = seed ^ (0xd1342543de82ef95ULL * (id1 + 1)) ^ (0x9e6c63d0876a9a35ULL * (id2 + 1));
        for (auto& s : s_) s = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double exponential(double rate);
    long poisson(double mean);
    // index sampled proportionally to weights[i]; weights need not be normalized
    std::size_t discrete(const std::vector<double>& weights, double total);

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// --- special functions ---------------------------------------------------

// regularized lower/upper incomplete gamma P(a,x), Q(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// chi-square survival function with k degrees of freedom
inline double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

// exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0
double expint_e1(double x);

// --- quadrature -----------------------------------------------------------

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Nodes are interior, so
// integrable endpoint singularities are tolerated, but prefer the
// *_singular variants which regularize by power substitution.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-9, double abs_tol = 0.0, int max_depth = 28);

// int_0^length f(u) du with f ~ u^(-p) near u = 0, 0 <= p < 1. The
// integrand receives the offset u directly, so distances to the singular
// point never suffer cancellation.
QuadResult integrate_from_singularity(const std::function<double(double)>& f_of_offset,
                                      double length, double p, double rel_tol = 1e-9);

// int_a^b f with f ~ (x-a)^(-p) near a, 0 <= p < 1
QuadResult integrate_singular_lower(const std::function<double(double)>& f, double a, double b,
                                    double p, double rel_tol = 1e-9);

// int_a^b f with f ~ (b-x)^(-p) near b, 0 <= p < 1
QuadResult integrate_singular_upper(const std::function<double(double)>& f, double a, double b,
                                    double p, double rel_tol = 1e-9);

// --- accumulation ---------------------------------------------------------

// Welford accumulator for mean / variance / standard error.
class Welford {
  public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const Welford& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        double d = o.mean_ - mean_;
        std::uint64_t n = n_ + o.n_;
        mean_ += d * static_cast<double>(o.n_) / static_cast<double>(n);
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / static_cast<double>(n);
        n_ = n;
    }
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stderror() const;

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace soup
