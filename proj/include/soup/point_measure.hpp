#pragma once

#include <vector>

#include "soup/util.hpp"

namespace soup {

// Atomic measure on the state space: weight per state.
struct PointMeasure {
    std::vector<double> weights;

    PointMeasure() = default;
    explicit PointMeasure(std::vector<double> w) : weights(std::move(w)) {}

    static PointMeasure delta(int state, int num_states) {
        std::vector<double> w(num_states, 0.0);
        w[state] = 1.0;
        return PointMeasure(std::move(w));
    }

    int num_states() const { return static_cast<int>(weights.size()); }
    double operator()(int x) const { return weights[x]; }

    bool positive() const {
        for (double w : weights)
            if (w < 0.0) return false;
        return true;
    }

    std::vector<int> support() const {
        std::vector<int> s;
        for (int x = 0; x < num_states(); ++x)
            if (weights[x] != 0.0) s.push_back(x);
        return s;
    }
};

}  // namespace soup
