#include "soup/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace soup {

double Rng::exponential(double rate) {
    // 1 - uniform() is in (0,1], so the log is finite
    return -std::log(1.0 - uniform()) / rate;
}

long Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 700.0) {
        // inversion by sequential search; fine for the means used here
        double p = std::exp(-mean);
        double cum = p;
        double u = uniform();
        long k = 0;
        while (u > cum) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
            if (k > 100000) break;
        }
        return k;
    }
    // normal approximation tail guard (not used by shipped fixtures)
    double u1 = uniform(), u2 = uniform();
    double g = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
    double v = mean + std::sqrt(mean) * g;
    return v < 0 ? 0 : static_cast<long>(v + 0.5);
}

std::size_t Rng::discrete(const std::vector<double>& weights, double total) {
    double u = uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

double Welford::stderror() const {
    if (n_ < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(variance() / static_cast<double>(n_));
}

// --- incomplete gamma -----------------------------------------------------

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double expint_e1(double x) {
    if (x <= 0.0) throw Error("expint_e1: x must be positive");
    if (x <= 1.0) {
        // E1(x) = -gamma - log x + sum (-1)^{n+1} x^n / (n n!)
        const double euler = 0.57721566490153286060651209;
        double sum = 0.0, term = 1.0;
        for (int n = 1; n <= 40; ++n) {
            term *= -x / static_cast<double>(n);
            double add = -term / static_cast<double>(n);
            sum += add;
            if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1e-30)) break;
        }
        return -euler - std::log(x) + sum;
    }
    // continued fraction, modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 300; ++i) {
        double an = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// --- Gauss-Kronrod --------------------------------------------------------

namespace {

// K15 nodes/weights on [-1,1]; G7 weights on the odd-indexed nodes.
const double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kWg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469, 0.381830050505119, 0.279705391489277,
                       0.129484966168870};

struct Seg {
    double a, b, value, error;
};

Seg gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 15; ++i) {
        double v = f(c + h * kXgk[i]);
        resk += kWk[i] * v;
        if (i % 2 == 1) resg += kWg[i / 2] * v;
    }
    Seg s;
    s.a = a;
    s.b = b;
    s.value = resk * h;
    s.error = std::fabs((resk - resg) * h);
    return s;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return {0.0, 0.0};
    std::vector<Seg> heap;
    heap.push_back(gk15(f, a, b));
    double total = heap[0].value, err = heap[0].error;
    auto cmp = [](const Seg& x, const Seg& y) { return x.error < y.error; };
    std::make_heap(heap.begin(), heap.end(), cmp);
    int splits = 0;
    const int max_splits = 1 << std::min(max_depth, 20);
    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && splits < max_splits) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Seg worst = heap.back();
        heap.pop_back();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // subdivision exhausted
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        Seg left = gk15(f, worst.a, mid);
        Seg right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
        ++splits;
    }
    return {total, err};
}

QuadResult integrate_from_singularity(const std::function<double(double)>& f_of_offset,
                                      double length, double p, double rel_tol) {
    if (length <= 0.0) return {0.0, 0.0};
    if (p <= 0.0) return integrate(f_of_offset, 0.0, length, rel_tol);
    // u = s^(1/(1-p)); du = s^(p/(1-p))/(1-p) ds kills the singularity
    const double q = 1.0 - p;
    const double smax = std::pow(length, q);
    auto g = [&](double s) {
        double u = std::pow(s, 1.0 / q);
        return f_of_offset(u) * std::pow(s, p / q) / q;
    };
    return integrate(g, 0.0, smax, rel_tol);
}

QuadResult integrate_singular_lower(const std::function<double(double)>& f, double a, double b,
                                    double p, double rel_tol) {
    return integrate_from_singularity([&](double u) { return f(a + u); }, b - a, p, rel_tol);
}

QuadResult integrate_singular_upper(const std::function<double(double)>& f, double a, double b,
                                    double p, double rel_tol) {
    return integrate_from_singularity([&](double u) { return f(b - u); }, b - a, p, rel_tol);
}

}  // namespace soup
