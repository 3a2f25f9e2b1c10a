#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "soup/markov_kernel.hpp"
#include "soup/util.hpp"

namespace soup {

// A based loop: either a single-point sojourn or a jump skeleton with one
// holding time per visited state (cyclically, consecutive states differ).
struct BasedLoop {
    std::vector<int> states;      // size 1 for a trivial loop
    std::vector<double> durations;

    bool trivial() const { return states.size() == 1; }
    double total_duration() const {
        double t = 0.0;
        for (double d : durations) t += d;
        return t;
    }
    double occupation(int x) const {
        double t = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == x) t += durations[i];
        return t;
    }
    // dense occupation vector over m states
    std::vector<double> occupation_vector(int m) const {
        std::vector<double> occ(m, 0.0);
        for (std::size_t i = 0; i < states.size(); ++i) occ[states[i]] += durations[i];
        return occ;
    }
};

BasedLoop make_trivial_loop(int state, double duration);
BasedLoop make_skeleton_loop(std::vector<int> states, std::vector<double> durations);

// Sparse polynomial in the occupation variables L(0..m-1): a sum of
// monomials coeff * prod_x L(x)^{e_x}. The exponent map of a monomial is
// sorted by state.
class OccupationPolynomial {
  public:
    using Monomial = std::map<int, int>;

    OccupationPolynomial() = default;
    static OccupationPolynomial constant(double c);
    static OccupationPolynomial occupation(int state);  // L(state)

    void add_term(const Monomial& mono, double coeff);
    OccupationPolynomial& operator+=(const OccupationPolynomial& o);
    OccupationPolynomial& operator*=(double c);
    OccupationPolynomial operator*(const OccupationPolynomial& o) const;
    OccupationPolynomial operator+(const OccupationPolynomial& o) const;
    OccupationPolynomial operator-(const OccupationPolynomial& o) const;

    double constant_term() const;
    bool empty() const { return terms_.empty(); }
    const std::map<Monomial, double>& terms() const { return terms_; }

    double evaluate(const std::vector<double>& occupation) const;
    double evaluate(const BasedLoop& loop) const;

  private:
    std::map<Monomial, double> terms_;
    static constexpr double kDropTol = 0.0;  // keep exact cancellations out
};

// univariate polynomial in L(state): sum_d coeffs[d] * L(state)^d
OccupationPolynomial poly_in_state(int state, const std::vector<double>& coeffs);

struct LoopSoup {
    double alpha = 1.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::vector<BasedLoop> loops;
    const MarkovKernel* kernel = nullptr;

    std::size_t nontrivial_count() const {
        std::size_t c = 0;
        for (const auto& l : loops) c += !l.trivial();
        return c;
    }
};

// Text format: one loop per line, "T x t" or "S x1 ... xk | t1 ... tk";
// soups are introduced by a "soup <index> <count>" line.
void write_soups(std::ostream& os, const std::vector<LoopSoup>& soups);
std::vector<LoopSoup> parse_soups(std::istream& is);

}  // namespace soup
