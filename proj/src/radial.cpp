#include "soup/radial.hpp"

#include <algorithm>
#include <cmath>

namespace soup {

namespace {

double clamp_power(double p) { return std::min(std::max(p, 0.0), 1.0 - 1e-9); }

double ball_volume(int d) {
    if (d == 1) return 2.0;
    if (d == 2) return 3.14159265358979323846;
    throw UnsupportedDimension("radial: d must be 1 or 2");
}

double sphere_area(int d) {
    if (d == 1) return 2.0;
    if (d == 2) return 2.0 * 3.14159265358979323846;
    throw UnsupportedDimension("radial: d must be 1 or 2");
}

}  // namespace

RadialFunction power_law(double alpha, int d) {
    if (!(alpha < d)) throw Error("power_law: alpha < d required for local integrability");
    RadialFunction rf;
    rf.name = "r^" + std::to_string(alpha);
    rf.f = [alpha](double r) { return std::pow(r, alpha); };
    rf.index = alpha;
    rf.d = d;
    rf.zero_index = alpha;
    return rf;
}

RadialFunction power_law_log(double alpha, int d, double logpow) {
    RadialFunction rf;
    rf.name = "r^" + std::to_string(alpha) + "*log^" + std::to_string(logpow);
    double head = 0.5 * d;  // exponent used below r = 1
    double ljoin = std::pow(std::log(std::exp(1.0) + 1.0), logpow);
    rf.f = [alpha, logpow, head, ljoin](double r) {
        if (r < 1.0) return std::pow(r, head) * ljoin;
        return std::pow(r, alpha) * std::pow(std::log(std::exp(1.0) + r), logpow);
    };
    rf.index = alpha;
    rf.d = d;
    rf.zero_index = head;
    return rf;
}

RadialGrid RadialGrid::make(double r_min, double r_max, int points_per_decade) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw Error("RadialGrid: need 0 < r_min < r_max");
    if (points_per_decade < 64) points_per_decade = 64;
    RadialGrid g;
    double decades = std::log10(r_max / r_min);
    int n = static_cast<int>(std::ceil(decades * points_per_decade)) + 1;
    for (int i = 0; i < n; ++i)
        g.radii.push_back(r_min * std::pow(10.0, decades * i / (n - 1)));
    return g;
}

double TabulatedRadial::operator()(double r) const {
    double lr = std::log(r);
    if (lr <= log_r.front())
        return std::exp(log_v.front() + slope_lo * (lr - log_r.front()));
    if (lr >= log_r.back())
        return std::exp(log_v.back() + slope_hi * (lr - log_r.back()));
    auto it = std::upper_bound(log_r.begin(), log_r.end(), lr);
    std::size_t i = static_cast<std::size_t>(it - log_r.begin());
    double t = (lr - log_r[i - 1]) / (log_r[i] - log_r[i - 1]);
    return std::exp(log_v[i - 1] * (1.0 - t) + log_v[i] * t);
}

double TabulatedRadial::value_at(std::size_t i) const { return std::exp(log_v[i]); }
double TabulatedRadial::radius_at(std::size_t i) const { return std::exp(log_r[i]); }

Density density_of(const RadialFunction& rf) {
    Density d;
    auto f = rf.f;
    d.w = [f](double r) { return 1.0 / f(r); };
    d.p0 = rf.zero_index;
    d.p_inf = rf.index;
    return d;
}

Density density_of(const TabulatedRadial& t) {
    Density d;
    d.w = [t](double r) { return t(r); };
    d.p0 = -t.slope_lo;
    d.p_inf = -t.slope_hi;
    return d;
}

namespace {

// angular factor of the 2-d convolution at outer radius rho; delta is the
// exact signed offset rho - R so the distance never cancels
double angular_integral(const Density& a, double rho, double R, double delta, double rel_tol) {
    auto dist = [&](double phi) {
        double s = std::sin(0.5 * phi);
        return std::sqrt(delta * delta + 4.0 * rho * R * s * s);
    };
    auto integrand = [&](double phi) { return a.w(dist(phi)); };
    const double pi = 3.14159265358979323846;
    double width = std::fabs(delta) / std::sqrt(rho * R);
    double total = 0.0, err = 0.0;
    std::vector<double> cuts{0.0};
    for (double c : {width, 10.0 * width, 100.0 * width})
        if (c > 0.0 && c < pi) cuts.push_back(c);
    cuts.push_back(pi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadResult q = integrate(integrand, cuts[i], cuts[i + 1], rel_tol);
        total += q.value;
        err += q.error;
    }
    return 2.0 * total;
}

}  // namespace

double d_convolve_value(const Density& a, const Density& b, int d, double R, double rel_tol) {
    if (d != 1 && d != 2) throw UnsupportedDimension("d_convolve: d must be 1 or 2");
    double total = 0.0, err = 0.0;
    auto accumulate = [&](QuadResult q) {
        total += q.value;
        err += q.error;
    };
    if (d == 1) {
        // near y = 0, near y = R from both sides, then the exact tail
        accumulate(integrate_from_singularity(
            [&](double u) { return b.w(u) * (a.w(R - u) + a.w(R + u)); }, 0.5 * R,
            clamp_power(b.p0), rel_tol));
        accumulate(integrate_from_singularity(
            [&](double u) { return b.w(R - u) * (a.w(u) + a.w(2.0 * R - u)); }, 0.5 * R,
            clamp_power(a.p0), rel_tol));
        accumulate(integrate_from_singularity(
            [&](double u) { return b.w(R + u) * (a.w(u) + a.w(2.0 * R + u)); }, R,
            clamp_power(a.p0), rel_tol));
        double psum = a.p_inf + b.p_inf;
        auto tail = [&](double t) {
            double y = 2.0 * R / t;
            return b.w(y) * (a.w(y - R) + a.w(R + y)) * 2.0 * R / (t * t);
        };
        accumulate(integrate_from_singularity(tail, 1.0, clamp_power(2.0 - psum), rel_tol));
    } else {
        double inner_tol = rel_tol * 0.1;
        auto ring = [&](double rho, double delta) {
            return b.w(rho) * rho * angular_integral(a, rho, R, delta, inner_tol);
        };
        accumulate(integrate_from_singularity([&](double u) { return ring(u, u - R); }, 0.5 * R,
                                              clamp_power(b.p0 - 1.0), rel_tol));
        // the angular slice behaves like |rho - R|^{1 - p0(a)} near rho = R
        accumulate(integrate_from_singularity([&](double u) { return ring(R - u, -u); }, 0.5 * R,
                                              clamp_power(a.p0 - 1.0), rel_tol));
        accumulate(integrate_from_singularity([&](double u) { return ring(R + u, u); }, R,
                                              clamp_power(a.p0 - 1.0), rel_tol));
        double psum = a.p_inf + b.p_inf;
        auto tail = [&](double t) {
            double rho = 2.0 * R / t;
            return ring(rho, rho - R) * 2.0 * R / (t * t);
        };
        accumulate(integrate_from_singularity(tail, 1.0, clamp_power(3.0 - psum), rel_tol));
    }
    if (!(std::fabs(total) > 0.0) || err > 1e-4 * std::fabs(total))
        throw QuadratureFailure("d_convolve: quadrature error estimate too large");
    return total;
}

TabulatedRadial d_convolve_density(const Density& a, const Density& b, int d,
                                   const RadialGrid& grid, double rel_tol) {
    TabulatedRadial t;
    for (double r : grid.radii) {
        t.log_r.push_back(std::log(r));
        t.log_v.push_back(std::log(d_convolve_value(a, b, d, r, rel_tol)));
    }
    std::size_t n = t.log_r.size();
    t.slope_lo = (t.log_v[1] - t.log_v[0]) / (t.log_r[1] - t.log_r[0]);
    t.slope_hi = (t.log_v[n - 1] - t.log_v[n - 2]) / (t.log_r[n - 1] - t.log_r[n - 2]);
    return t;
}

TabulatedRadial d_convolve(const RadialFunction& f, const RadialFunction& g, int d,
                           const RadialGrid& grid, double rel_tol) {
    return d_convolve_density(density_of(f), density_of(g), d, grid, rel_tol);
}

double H_integral_density(const Density& w, int d, double R) {
    auto integrand = [&](double r) { return w.w(r) * std::pow(r, d - 1); };
    double p = clamp_power(w.p0 - (d - 1));
    QuadResult q = integrate_singular_lower(integrand, 0.0, R, p, 1e-9);
    return sphere_area(d) * q.value;
}

double H_integral(const RadialFunction& h, int d, double R) {
    return H_integral_density(density_of(h), d, R);
}

std::vector<TabulatedRadial> theta_family(const RadialFunction& h, int d, int k_max,
                                          const RadialGrid& grid, double rel_tol) {
    if (k_max < 1) throw Error("theta_k: k >= 1 required");
    for (int j = 2; j <= k_max; ++j)
        if (!(h.index > d * (1.0 - 1.0 / j)))
            throw Error("theta_k: index must exceed d(1 - 1/k) for the convolution to converge");
    Density base = density_of(h);
    std::vector<TabulatedRadial> family;
    TabulatedRadial t1;
    for (double r : grid.radii) {
        t1.log_r.push_back(std::log(r));
        t1.log_v.push_back(std::log(base.w(r)));
    }
    std::size_t n = t1.log_r.size();
    t1.slope_lo = (t1.log_v[1] - t1.log_v[0]) / (t1.log_r[1] - t1.log_r[0]);
    t1.slope_hi = (t1.log_v[n - 1] - t1.log_v[n - 2]) / (t1.log_r[n - 1] - t1.log_r[n - 2]);
    family.push_back(std::move(t1));
    for (int j = 2; j <= k_max; ++j)
        family.push_back(d_convolve_density(base, density_of(family.back()), d, grid, rel_tol));
    return family;
}

TabulatedRadial theta_k(const RadialFunction& h, int d, int k, const RadialGrid& grid,
                        double rel_tol) {
    return theta_family(h, d, k, grid, rel_tol).back();
}

SlopeFit rv_index(const TabulatedRadial& f, double r_lo, double r_hi) {
    double llo = std::log(r_lo), lhi = std::log(r_hi);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < f.log_r.size(); ++i) {
        if (f.log_r[i] < llo || f.log_r[i] > lhi) continue;
        xs.push_back(f.log_r[i]);
        ys.push_back(f.log_v[i]);
    }
    if (xs.size() < 3) throw Error("rv_index: window covers fewer than 3 grid points");
    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double resid = ys[i] - fit.slope * xs[i] - intercept;
        ss += resid * resid;
    }
    if (xs.size() > 2) fit.stderror = std::sqrt(ss / (n - 2.0) * n / denom);
    return fit;
}

namespace {

void finish_ratio_table(RatioTable& t) {
    t.min_ratio = *std::min_element(t.ratio.begin(), t.ratio.end());
    t.max_ratio = *std::max_element(t.ratio.begin(), t.ratio.end());
}

}  // namespace

RatioTable chain_growth_check(const RadialFunction& h, int d, int k, const std::vector<double>& rs) {
    Density w = density_of(h);
    RadialGrid conv_grid = RadialGrid::make(1e-3, 1e5, 64);
    TabulatedRadial theta2 = d_convolve_density(w, w, d, conv_grid, 1e-6);
    Density w2 = density_of(theta2);
    RatioTable table;
    for (double r : rs) {
        auto gauss1 = [&](double s) {
            return w.w(s) * std::pow(s, d - 1) * std::exp(-0.5 * (r * s) * (r * s));
        };
        double q1 = sphere_area(d) *
                    integrate_singular_lower(gauss1, 0.0, 12.0 / r, clamp_power(w.p0 - (d - 1)), 1e-8)
                        .value;
        double q2 = 0.0;
        if (k >= 2) {
            auto gauss2 = [&](double s) {
                return w2.w(s) * std::pow(s, d - 1) * std::exp(-(r * s) * (r * s));
            };
            q2 = sphere_area(d) *
                 integrate_singular_lower(gauss2, 0.0, 12.0 / r, clamp_power(w2.p0 - (d - 1)), 1e-8)
                     .value;
        }
        double value = q1 * (k >= 2 ? std::pow(q2, 0.5 * (k - 1)) : 1.0);
        double href = std::pow(H_integral_density(w, d, 1.0 / r), k);
        table.r.push_back(r);
        table.value.push_back(value);
        table.reference.push_back(href);
        table.ratio.push_back(value / href);
    }
    finish_ratio_table(table);
    return table;
}

RatioTable two_term_band(const RadialFunction& h, const RadialFunction& g, int d,
                         const TabulatedRadial& conv, const std::vector<double>& rs) {
    Density wh = density_of(h), wg = density_of(g);
    RatioTable table;
    for (double r : rs) {
        double two = wh.w(r) * H_integral_density(wg, d, r) + wg.w(r) * H_integral_density(wh, d, r);
        double v = conv(r);
        table.r.push_back(r);
        table.value.push_back(v);
        table.reference.push_back(two);
        table.ratio.push_back(v / two);
    }
    finish_ratio_table(table);
    return table;
}

RatioTable growth_ratio_8_5n(const RadialFunction& h, int d, const std::vector<double>& rs) {
    Density w = density_of(h);
    RatioTable table;
    for (double r : rs) {
        double hinv = H_integral_density(w, d, r);
        double ref = ball_volume(d) * std::pow(r, d) * w.w(r);
        table.r.push_back(r);
        table.value.push_back(hinv);
        table.reference.push_back(ref);
        table.ratio.push_back(hinv / ref);
    }
    finish_ratio_table(table);
    return table;
}

}  // namespace soup
