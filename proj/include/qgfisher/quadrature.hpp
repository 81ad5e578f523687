#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace qgfisher::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_intervals = 5000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21 tables).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208844893181, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    double abs_sum = std::abs(kronrod);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kWgk[j] * pair;
        abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = kronrod * half;
    const double res_abs = abs_sum * std::abs(half);
    const double res_asc = asc * std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
    if (!std::isfinite(value) || !std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return {a, b, value, err};
}

} // namespace detail

//! Globally adaptive Gauss-Kronrod (G10/K21) over the union of consecutive intervals
//! [points[0], points[1]], [points[1], points[2]], ... The worst interval is bisected
//! until the summed error estimate meets max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
    Result out;
    if (points.size() < 2) return out;
    std::priority_queue<detail::Segment> heap;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        auto s = detail::kronrod21(f, points[i], points[i + 1]);
        value += s.value;
        error += s.error;
        heap.push(s);
    }
    int intervals = static_cast<int>(heap.size());
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };
    while (!heap.empty() && error > tolerance() && intervals < opt.max_intervals && std::isfinite(error)) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {  // interval below floating-point resolution
            heap.push({worst.a, worst.b, worst.value, 0.0});
            error -= worst.error;
            continue;
        }
        auto left = detail::kronrod21(f, worst.a, mid);
        auto right = detail::kronrod21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Recompute sums from scratch to shed accumulated rounding.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.error = error;
    out.intervals = intervals;
    out.converged = std::isfinite(value) && std::isfinite(error) && error <= tolerance();
    return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    const std::array<double, 2> pts{a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

//! Integral of f over [a, inf). The range [a, a + scale] is integrated directly and the
//! tail [c, inf), c = a + scale, through r = c + scale (1 - t) / t, t in (0, 1].
//! Both pieces share one adaptive pool so the error budget is global.
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
    const double c = a + scale;
    auto mapped = [&](double t) -> double {
        if (t <= 1.0) return scale * f(a + t * scale);
        const double s = t - 1.0;  // in (0, 1]
        const double r = c + scale * (1.0 - s) / s;
        if (!std::isfinite(r)) return 0.0;
        const double v = f(r);
        return v == 0.0 ? 0.0 : v * scale / (s * s);
    };
    const std::array<double, 3> pts{0.0, 1.0, 2.0};
    return integrate(mapped, std::span<const double>(pts), opt);
}

} // namespace qgfisher::quad
