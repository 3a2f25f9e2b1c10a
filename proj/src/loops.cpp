#include "soup/loops.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace soup {

BasedLoop make_trivial_loop(int state, double duration) {
    if (duration <= 0.0) throw Error("trivial loop needs positive duration");
    return BasedLoop{{state}, {duration}};
}

BasedLoop make_skeleton_loop(std::vector<int> states, std::vector<double> durations) {
    if (states.size() < 2 || states.size() != durations.size())
        throw Error("skeleton loop needs k >= 2 states with matching durations");
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (durations[i] <= 0.0) throw Error("skeleton loop durations must be positive");
        if (states[i] == states[(i + 1) % states.size()])
            throw Error("skeleton loop states must differ cyclically");
    }
    return BasedLoop{std::move(states), std::move(durations)};
}

OccupationPolynomial OccupationPolynomial::constant(double c) {
    OccupationPolynomial p;
    if (c != 0.0) p.terms_[{}] = c;
    return p;
}

OccupationPolynomial OccupationPolynomial::occupation(int state) {
    OccupationPolynomial p;
    p.terms_[{{state, 1}}] = 1.0;
    return p;
}

void OccupationPolynomial::add_term(const Monomial& mono, double coeff) {
    if (coeff == 0.0) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_[mono] = coeff;
    } else {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

OccupationPolynomial& OccupationPolynomial::operator+=(const OccupationPolynomial& o) {
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
}

OccupationPolynomial& OccupationPolynomial::operator*=(double c) {
    if (c == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [mono, v] : terms_) v *= c;
    return *this;
}

OccupationPolynomial OccupationPolynomial::operator*(const OccupationPolynomial& o) const {
    OccupationPolynomial out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            Monomial m = ma;
            for (const auto& [s, e] : mb) m[s] += e;
            out.add_term(m, ca * cb);
        }
    }
    return out;
}

OccupationPolynomial OccupationPolynomial::operator+(const OccupationPolynomial& o) const {
    OccupationPolynomial out = *this;
    out += o;
    return out;
}

OccupationPolynomial OccupationPolynomial::operator-(const OccupationPolynomial& o) const {
    OccupationPolynomial out = *this;
    OccupationPolynomial neg = o;
    neg *= -1.0;
    out += neg;
    return out;
}

double OccupationPolynomial::constant_term() const {
    auto it = terms_.find({});
    return it == terms_.end() ? 0.0 : it->second;
}

double OccupationPolynomial::evaluate(const std::vector<double>& occ) const {
    double v = 0.0;
    for (const auto& [mono, c] : terms_) {
        double t = c;
        for (const auto& [s, e] : mono) {
            double base = s < static_cast<int>(occ.size()) ? occ[s] : 0.0;
            for (int i = 0; i < e; ++i) t *= base;
        }
        v += t;
    }
    return v;
}

double OccupationPolynomial::evaluate(const BasedLoop& loop) const {
    double v = 0.0;
    for (const auto& [mono, c] : terms_) {
        double t = c;
        for (const auto& [s, e] : mono) {
            double base = loop.occupation(s);
            if (base == 0.0 && e > 0) {
                t = 0.0;
                break;
            }
            for (int i = 0; i < e; ++i) t *= base;
        }
        v += t;
    }
    return v;
}

OccupationPolynomial poly_in_state(int state, const std::vector<double>& coeffs) {
    OccupationPolynomial p;
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        if (coeffs[d] == 0.0) continue;
        OccupationPolynomial::Monomial m;
        if (d > 0) m[state] = static_cast<int>(d);
        p.add_term(m, coeffs[d]);
    }
    return p;
}

void write_soups(std::ostream& os, const std::vector<LoopSoup>& soups) {
    os.precision(17);
    for (std::size_t i = 0; i < soups.size(); ++i) {
        const LoopSoup& s = soups[i];
        os << "soup " << i << ' ' << s.loops.size() << '\n';
        for (const BasedLoop& l : s.loops) {
            if (l.trivial()) {
                os << "T " << l.states[0] << ' ' << l.durations[0] << '\n';
            } else {
                os << "S";
                for (int x : l.states) os << ' ' << x;
                os << " |";
                for (double t : l.durations) os << ' ' << t;
                os << '\n';
            }
        }
    }
}

std::vector<LoopSoup> parse_soups(std::istream& is) {
    std::vector<LoopSoup> soups;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "soup") {
            soups.emplace_back();
        } else if (tag == "T") {
            if (soups.empty()) throw Error("parse_soups: loop before soup header");
            int x;
            double t;
            if (!(ls >> x >> t)) throw Error("parse_soups: bad trivial loop line");
            soups.back().loops.push_back(make_trivial_loop(x, t));
        } else if (tag == "S") {
            if (soups.empty()) throw Error("parse_soups: loop before soup header");
            std::vector<int> states;
            std::vector<double> durs;
            std::string tok;
            while (ls >> tok && tok != "|") states.push_back(std::stoi(tok));
            double t;
            while (ls >> t) durs.push_back(t);
            soups.back().loops.push_back(make_skeleton_loop(std::move(states), std::move(durs)));
        } else {
            throw Error("parse_soups: unknown line tag '" + tag + "'");
        }
    }
    return soups;
}

}  // namespace soup
