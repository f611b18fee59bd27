/*
 * Copyright 2026 The quartwave Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace quartwave {

using Complex = std::complex<double>;
// Compare Rationals only against Rationals: boost 1.74 recurses forever on
// mixed "rational == int" under C++20 rewritten comparisons.
using Rational = boost::rational<std::int64_t>;

inline constexpr double pi = std::numbers::pi;

/// Malformed or out-of-range arguments.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Curvature requested at a point where the profile touches the axis of rotation.
class AxisPointError : public InputError {
public:
    using InputError::InputError;
};

/// One of the structural assumptions (A1)-(A3) on the symbol fails.
class AssumptionViolation : public std::runtime_error {
public:
    AssumptionViolation(std::string assumption, const std::string& what)
        : std::runtime_error(what), assumption_(std::move(assumption)) {}

    /// "A1", "A2" or "A3".
    const std::string& assumption() const noexcept { return assumption_; }

private:
    std::string assumption_;
};

/// Root bracketing, quadrature or resolution failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before reaching its tolerance.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

} // namespace quartwave
