// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Periodic box discretization and FFTW plans for the spectral solver.

#include "quartwave/common.hpp"
#include "quartwave/numerics.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

namespace quartwave {

using Field = std::vector<Complex>;

/// Box [-L, L)^N with n points per axis. Axis 0 is the direction of V.
struct FourierGrid {
    int dim = 2;
    double half_length = 40.0;
    int points = 256;

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(points);
        return s;
    }
    double spacing() const { return 2.0 * half_length / points; }
    double cell_volume() const { return std::pow(spacing(), dim); }
    double coordinate(int i) const { return (i - points / 2) * spacing(); }
    double frequency(int i) const { return pi / half_length * (i < points / 2 ? i : i - points); }
    double nyquist() const { return pi * points / (2.0 * half_length); }

    std::array<int, 3> multi_index(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % points);
            flat /= points;
        }
        return idx;
    }
    std::array<double, 3> point(std::size_t flat) const {
        const auto idx = multi_index(flat);
        std::array<double, 3> x{0, 0, 0};
        for (int d = 0; d < dim; ++d) x[d] = coordinate(idx[d]);
        return x;
    }
    std::array<double, 3> wavevector(std::size_t flat) const {
        const auto idx = multi_index(flat);
        std::array<double, 3> k{0, 0, 0};
        for (int d = 0; d < dim; ++d) k[d] = frequency(idx[d]);
        return k;
    }
};

inline void validate(const FourierGrid& g) {
    if (g.dim < 1 || g.dim > 3) throw InputError("grid dimension must be 1, 2 or 3");
    if (g.points < 64 || (g.points & (g.points - 1)) != 0) throw InputError("points per axis must be a power of two >= 64");
    if (!(g.half_length > 0.0) || !std::isfinite(g.half_length)) throw InputError("box half-length must be positive");
}

/// Radius of the smallest ball containing M (0 if M is empty).
inline double outer_radius(const ModelParams& p) {
    // min of F over |xi| = r is r^4 - beta r^2 - |V| r + alpha
    double best = 0.0;
    for (double r : num::real_roots({p.alpha, -p.v_mag, -p.beta, 0.0, 1.0}))
        if (r > best) best = r;
    return best;
}

/// Nyquist must exceed the outer radius of M by a factor 4.
inline void check_resolution(const FourierGrid& g, const ModelParams& p) {
    validate(g);
    if (g.dim != p.dim) throw InputError("grid and model dimensions differ");
    if (g.nyquist() < 4.0 * outer_radius(p))
        throw InputError("grid too coarse: Nyquist frequency must be at least 4x the outer radius of M");
}

inline double lattice_symbol(const ModelParams& p, const std::array<double, 3>& k, int dim) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += k[d] * k[d];
    return r2 * r2 - p.beta * r2 + p.alpha - p.v_mag * k[0];
}

inline std::vector<double> symbol_on_lattice(const FourierGrid& g, const ModelParams& p) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lattice_symbol(p, g.wavevector(i), g.dim);
    return out;
}

/// min |F| over the frequency lattice.
inline double lattice_gap(const FourierGrid& g, const ModelParams& p) {
    // F depends on the axis-0 frequency and the sum of squares of the others,
    // so scanning the distinct pairs is enough.
    std::vector<double> tail{0.0};
    for (int d = 1; d < g.dim; ++d) {
        std::vector<double> next;
        for (double t : tail)
            for (int i = 0; i < g.points; ++i) next.push_back(t + g.frequency(i) * g.frequency(i));
        tail.swap(next);
    }
    double gap = INFINITY;
    for (int i = 0; i < g.points; ++i) {
        const double k1 = g.frequency(i);
        for (double t : tail) {
            const double r2 = k1 * k1 + t;
            gap = std::min(gap, std::abs(r2 * r2 - p.beta * r2 + p.alpha - p.v_mag * k1));
        }
    }
    return gap;
}

struct LatticeTuning {
    FourierGrid grid;
    double requested_half_length = 0.0;
    double relative_offset = 0.0;
    double gap = 0.0;
};

/// Stretch L by at most `max_offset` (relative) to push lattice points off M.
inline LatticeTuning tune_half_length(const FourierGrid& g, const ModelParams& p, double max_offset = 0.015,
                                      int samples = 601) {
    validate(g);
    LatticeTuning best{g, g.half_length, 0.0, lattice_gap(g, p)};
    for (int s = 1; s < samples; ++s) {
        const double off = max_offset * s / (samples - 1);
        FourierGrid trial = g;
        trial.half_length = g.half_length * (1.0 + off);
        const double gap = lattice_gap(trial, p);
        if (gap > best.gap) best = {trial, g.half_length, off, gap};
    }
    return best;
}

namespace detail {

// The FFTW planner is not reentrant; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace detail

/// Thread count for plans created afterwards (no-op without threaded FFTW).
inline void set_fft_threads(int n) {
#ifdef QUARTWAVE_HAVE_FFTW_THREADS
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    static const bool ready = fftw_init_threads() != 0;
    if (ready) fftw_plan_with_nthreads(std::max(1, n));
#else
    (void)n;
#endif
}

/// In-place forward/backward transforms on Fields of one grid. Backward is unnormalized.
class FftPlan {
public:
    explicit FftPlan(const FourierGrid& g) : size_(g.size()) {
        validate(g);
        std::vector<int> n(g.dim, g.points);
        Field scratch(size_);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft(g.dim, n.data(), buf, buf, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft(g.dim, n.data(), buf, buf, FFTW_BACKWARD, flags);
        if (!forward_ || !backward_) throw NumericalError("FFTW could not create a plan");
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
    }

    void forward(Field& f) const { run(forward_, f); }
    void backward(Field& f) const { run(backward_, f); }
    std::size_t size() const { return size_; }

private:
    void run(fftw_plan plan, Field& f) const {
        if (f.size() != size_) throw InputError("field size does not match the grid");
        auto* buf = reinterpret_cast<fftw_complex*>(f.data());
        fftw_execute_dft(plan, buf, buf);
    }

    std::size_t size_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

} // namespace quartwave
