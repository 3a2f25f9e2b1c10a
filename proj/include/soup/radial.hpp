#pragma once

#include <functional>
#include <string>
#include <vector>

#include "soup/util.hpp"

namespace soup {

// Radial function on (0, infinity) with a declared regular-variation index
// at infinity; its reciprocal is the integrand the convolutions use.
struct RadialFunction {
    std::string name;
    std::function<double(double)> f;
    double index = 0.0;     // regular variation index of f at infinity
    int d = 1;              // ambient dimension, 1 or 2
    double zero_index = 0.0;  // growth exponent of f near 0 (controls 1/f integrability)
};

// f(r) = r^alpha; requires alpha < d so 1/f is locally integrable
RadialFunction power_law(double alpha, int d);
// f(r) = r^alpha * log(e + r)^p for r >= 1, power-blended below 1 so 1/f
// stays locally integrable even at alpha = d
RadialFunction power_law_log(double alpha, int d, double logpow);

struct RadialGrid {
    std::vector<double> radii;  // strictly increasing, log-spaced
    static RadialGrid make(double r_min, double r_max, int points_per_decade);
};

// log-log tabulation with power-law extrapolation beyond the grid
struct TabulatedRadial {
    std::vector<double> log_r;
    std::vector<double> log_v;
    double slope_lo = 0.0, slope_hi = 0.0;

    double operator()(double r) const;
    double value_at(std::size_t i) const;
    double radius_at(std::size_t i) const;
};

// Positive integrand with known endpoint exponents: w(r) ~ r^{-p0} near 0
// and r^{-p_inf} near infinity.
struct Density {
    std::function<double(double)> w;
    double p0 = 0.0;
    double p_inf = 0.0;
};

Density density_of(const RadialFunction& f);
Density density_of(const TabulatedRadial& t);

// tabulates |xi| -> int f(|eta - xi|)^{-1} g(|eta|)^{-1} d eta over the grid
TabulatedRadial d_convolve(const RadialFunction& f, const RadialFunction& g, int d,
                           const RadialGrid& grid, double rel_tol = 1e-6);
TabulatedRadial d_convolve_density(const Density& a, const Density& b, int d,
                                   const RadialGrid& grid, double rel_tol = 1e-6);

// single convolution value at radius R
double d_convolve_value(const Density& a, const Density& b, int d, double R, double rel_tol = 1e-6);

// (H(R))^{-1} = int_{|eta| <= R} h(|eta|)^{-1} d eta
double H_integral(const RadialFunction& h, int d, double R);
double H_integral_density(const Density& w, int d, double R);

// k-fold d-self-convolution of h^{-1}
TabulatedRadial theta_k(const RadialFunction& h, int d, int k, const RadialGrid& grid,
                        double rel_tol = 1e-6);
// all of theta_1 .. theta_{k_max} in one pass
std::vector<TabulatedRadial> theta_family(const RadialFunction& h, int d, int k_max,
                                          const RadialGrid& grid, double rel_tol = 1e-6);

struct SlopeFit {
    double slope = 0.0;
    double stderror = 0.0;
};

// least-squares log-log slope over the tabulated window [r_lo, r_hi]
SlopeFit rv_index(const TabulatedRadial& f, double r_lo, double r_hi);

struct RatioTable {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<double> reference;
    std::vector<double> ratio;
    double min_ratio = 0.0, max_ratio = 0.0;
};

// ratio of the chain proxy Q1(r) Q2(r)^{(k-1)/2} to (H(1/r))^{-k}, where Q1
// integrates h^{-1} against a Gaussian profile at scale r and Q2 does the
// same for the 2-fold self-convolution
RatioTable chain_growth_check(const RadialFunction& h, int d, int k, const std::vector<double>& rs);

// ratio of the convolution to the two-term form h^{-1} * G-integral +
// g^{-1} * H-integral over the requested radii
RatioTable two_term_band(const RadialFunction& h, const RadialFunction& g, int d,
                         const TabulatedRadial& conv, const std::vector<double>& rs);

// H^{-1}(R) / (omega_d R^d h(R)^{-1}) with omega_d the unit-ball volume
RatioTable growth_ratio_8_5n(const RadialFunction& h, int d, const std::vector<double>& rs);

}  // namespace soup
