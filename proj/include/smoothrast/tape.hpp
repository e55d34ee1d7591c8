#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace smoothrast {

// Reverse-mode autodiff over a flat Wengert list. Every elementary
// operation is recorded as a node with at most two parents and the
// local partial derivatives frozen at record time, so backward() is a
// single reverse sweep. Values are double precision throughout.
//
/// Numeric policy: exp() arguments are clamped to [-60, 60] and log()
// arguments lifted to at least 1e-300, so no recorded value is ever
// NaN or infinite for finite inputs.

inline constexpr double kExpClamp = 60.0;
inline constexpr double kLogFloor = 1e-300;
inline constexpr double kSmoothAbsEps = 1e-12;

class Tape;

// Handle to a differentiable scalar living on one Tape.
struct Var {
    Tape* tape = nullptr;
    int32_t idx = -1;

    double value() const;
    bool valid() const { return tape != nullptr && idx >= 0; }
};

class Tape {
public:
    struct Node {
        int32_t a, b;    // parent indices, -1 if unused
        double wa, wb;   // local partials d(value)/d(parent)
    };

    Var leaf(double value, bool requires_grad = true) {
        if (!std::isfinite(value))
            throw std::invalid_argument("Tape::leaf: non-finite value");
        Var v = push(value, -1, -1, 0.0, 0.0);
        if (requires_grad) grad_leaves_.push_back(v.idx);
        return v;
    }

    Var constant(double value) { return leaf(value, false); }

    Var push(double value, int32_t a, int32_t b, double wa, double wb) {
        assert(std::isfinite(value));
        vals_.push_back(value);
        nodes_.push_back(Node{a, b, wa, wb});
        return Var{this, static_cast<int32_t>(vals_.size() - 1)};
    }

    double value(int32_t i) const { return vals_[i]; }
    size_t size() const { return vals_.size(); }

    void clear() {
        vals_.clear();
        nodes_.clear();
        grad_leaves_.clear();
    }
    void reserve(size_t n) {
        vals_.reserve(n);
        nodes_.reserve(n);
    }

    // Adjoints of every node with respect to `output`; adjoint of the
    // output itself is 1.
    std::vector<double> backward(Var output) const {
        check(output);
        std::vector<double> adj(vals_.size(), 0.0);
        adj[output.idx] = 1.0;
        for (int32_t i = output.idx; i >= 0; --i) {
            const double a = adj[i];
            if (a == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.a >= 0) adj[n.a] += n.wa * a;
            if (n.b >= 0) adj[n.b] += n.wb * a;
        }
        return adj;
    }

    // Gradient map restricted to requires_grad leaves.
    std::unordered_map<int32_t, double> gradient(Var output) const {
        std::vector<double> adj = backward(output);
        std::unordered_map<int32_t, double> g;
        g.reserve(grad_leaves_.size());
        for (int32_t i : grad_leaves_)
            if (i <= output.idx) g.emplace(i, adj[i]);
        return g;
    }

    void check(Var v) const {
        if (v.tape != this)
            throw std::invalid_argument("Var belongs to a different tape");
        if (v.idx < 0 || static_cast<size_t>(v.idx) >= vals_.size())
            throw std::out_of_range("Var index out of range");
    }

private:
    std::vector<double> vals_;
    std::vector<Node> nodes_;
    std::vector<int32_t> grad_leaves_;
};

inline double Var::value() const { return tape->value(idx); }

namespace detail {
inline Tape& same_tape(Var a, Var b) {
    a.tape->check(a);
    a.tape->check(b);
    return *a.tape;
}
inline double clamped_exp(double x) {
    if (x > kExpClamp) x = kExpClamp;
    if (x < -kExpClamp) x = -kExpClamp;
    return std::exp(x);
}
}  // namespace detail

// ---- elementary operations ----

inline Var operator+(Var a, Var b) {
    Tape& t = detail::same_tape(a, b);
    return t.push(a.value() + b.value(), a.idx, b.idx, 1.0, 1.0);
}
inline Var operator-(Var a, Var b) {
    Tape& t = detail::same_tape(a, b);
    return t.push(a.value() - b.value(), a.idx, b.idx, 1.0, -1.0);
}
inline Var operator*(Var a, Var b) {
    Tape& t = detail::same_tape(a, b);
    return t.push(a.value() * b.value(), a.idx, b.idx, b.value(), a.value());
}
inline Var operator/(Var a, Var b) {
    Tape& t = detail::same_tape(a, b);
    double d = b.value();
    if (std::abs(d) < kLogFloor) d = (d < 0.0) ? -kLogFloor : kLogFloor;
    const double inv = 1.0 / d;
    return t.push(a.value() * inv, a.idx, b.idx, inv, -a.value() * inv * inv);
}
inline Var operator-(Var a) { return a.tape->push(-a.value(), a.idx, -1, -1.0, 0.0); }

inline Var operator+(Var a, double c) { return a.tape->push(a.value() + c, a.idx, -1, 1.0, 0.0); }
inline Var operator+(double c, Var a) { return a + c; }
inline Var operator-(Var a, double c) { return a + (-c); }
inline Var operator-(double c, Var a) { return a.tape->push(c - a.value(), a.idx, -1, -1.0, 0.0); }
inline Var operator*(Var a, double c) { return a.tape->push(a.value() * c, a.idx, -1, c, 0.0); }
inline Var operator*(double c, Var a) { return a * c; }
inline Var operator/(Var a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, Var a) {
    double d = a.value();
    if (std::abs(d) < kLogFloor) d = (d < 0.0) ? -kLogFloor : kLogFloor;
    const double inv = 1.0 / d;
    return a.tape->push(c * inv, a.idx, -1, -c * inv * inv, 0.0);
}

inline Var exp(Var a) {
    const double e = detail::clamped_exp(a.value());
    // derivative of the clamped exp is 0 outside the window
    const double d = (std::abs(a.value()) > kExpClamp) ? 0.0 : e;
    return a.tape->push(e, a.idx, -1, d, 0.0);
}
inline Var log(Var a) {
    const double x = std::max(a.value(), kLogFloor);
    return a.tape->push(std::log(x), a.idx, -1, 1.0 / x, 0.0);
}
inline Var sqrt(Var a) {
    const double r = std::sqrt(std::max(a.value(), 0.0));
    const double d = (r > kLogFloor) ? 0.5 / r : 0.0;
    return a.tape->push(r, a.idx, -1, d, 0.0);
}
inline Var sigmoid(Var a) {
    const double x = a.value();
    const double s = (x >= 0.0) ? 1.0 / (1.0 + detail::clamped_exp(-x))
                                : detail::clamped_exp(x) / (1.0 + detail::clamped_exp(x));
    return a.tape->push(s, a.idx, -1, s * (1.0 - s), 0.0);
}
inline Var softplus(Var a) {
    const double x = a.value();
    const double v = (x > kExpClamp) ? x : std::log1p(detail::clamped_exp(x));
    const double s = (x >= 0.0) ? 1.0 / (1.0 + detail::clamped_exp(-x))
                                : detail::clamped_exp(x) / (1.0 + detail::clamped_exp(x));
    return a.tape->push(v, a.idx, -1, s, 0.0);
}
// x^p via exp(p*log(x)); domain x > 0 enforced by the log floor.
inline Var pow(Var a, double p) {
    const double x = std::max(a.value(), kLogFloor);
    const double v = std::pow(x, p);
    return a.tape->push(v, a.idx, -1, p * v / x, 0.0);
}
inline Var square(Var a) { return a * a; }

// Smooth |x| = sqrt(x^2 + eps^2); C-infinity at 0.
inline Var smooth_abs(Var a, double eps = kSmoothAbsEps) {
    const double x = a.value();
    const double r = std::sqrt(x * x + eps * eps);
    return a.tape->push(r, a.idx, -1, x / r, 0.0);
}

// log(sum_i exp(x_i)) with a constant max shift; exact and stable.
inline Var log_sum_exp(std::span<const Var> xs) {
    assert(!xs.empty());
    Tape& t = *xs[0].tape;
    double m = xs[0].value();
    for (const Var& x : xs) m = std::max(m, x.value());
    Var acc = exp(xs[0] - m);
    for (size_t i = 1; i < xs.size(); ++i) acc = acc + exp(xs[i] - m);
    return log(acc) + m;
    (void)t;
}

inline Var dot2(Var ax, Var ay, Var bx, Var by) { return ax * bx + ay * by; }
inline Var det2(Var a, Var b, Var c, Var d) { return a * d - b * c; }

// ---- finite-difference checking ----

struct FdReport {
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
};

// Compares the reverse-mode gradient of `f` against central differences.
// `f` maps a point to (value, gradient); `eval` maps a point to a value.
template <typename GradFn, typename EvalFn>
FdReport finite_diff_check(GradFn&& f, EvalFn&& eval, std::vector<double> x, double step) {
    if (step <= 0.0) throw std::invalid_argument("finite_diff_check: step must be > 0");
    const std::vector<double> grad = f(x);
    FdReport rep;
    for (size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + step;
        const double fp = eval(x);
        x[i] = x0 - step;
        const double fm = eval(x);
        x[i] = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("finite_diff_check: non-finite probe");
        const double fd = (fp - fm) / (2.0 * step);
        const double abs_err = std::abs(grad[i] - fd);
        const double scale = std::max({std::abs(grad[i]), std::abs(fd), 1e-12});
        rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        rep.max_rel_err = std::max(rep.max_rel_err, abs_err / scale);
    }
    return rep;
}

}  // namespace smoothrast
