// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace glrtfuse {

// Kahan-compensated accumulator.
template <typename Real = double>
struct KahanAccumulator {
    Real sum = 0;
    Real carry = 0;

    void add(Real x) {
        Real y = x - carry;
        Real t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    Real value() const { return sum; }

    void scale(Real f) {
        sum *= f;
        carry *= f;
    }
};

using KahanSum = KahanAccumulator<double>;
using KahanSumL = KahanAccumulator<long double>;

}  // namespace glrtfuse
