#pragma once

// Truncated Taylor series ("jets") used to differentiate multiplier symbols
// exactly. A Jet<N> holds the coefficients c_0..c_N of f(x0 + e) in powers of e,
// so the k-th derivative at x0 is k! * c_k.

#include <array>
#include <cmath>
#include <cstddef>

namespace patchflow {

template <int N>
struct Jet {
    static_assert(N >= 0);
    std::array<double, N + 1> c{};

    Jet() = default;
    explicit Jet(double v) { c[0] = v; }

    /// The independent variable at x0.
    static Jet variable(double x0) {
        Jet j(x0);
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    [[nodiscard]] double value() const { return c[0]; }

    /// k-th derivative (k <= N).
    [[nodiscard]] double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator+=(double v) {
        c[0] += v;
        return *this;
    }
    Jet& operator-=(double v) {
        c[0] -= v;
        return *this;
    }
    Jet& operator*=(double v) {
        for (auto& x : c) x *= v;
        return *this;
    }
    Jet& operator/=(double v) {
        for (auto& x : c) x /= v;
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet operator-(Jet a) {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double b) { return a += b; }
    friend Jet operator+(double a, Jet b) { return b += a; }
    friend Jet operator-(Jet a, double b) { return a -= b; }
    friend Jet operator-(double a, const Jet& b) { return -b + a; }
    friend Jet operator*(Jet a, double b) { return a *= b; }
    friend Jet operator*(double a, Jet b) { return b *= a; }
    friend Jet operator/(Jet a, double b) { return a /= b; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
            r.c[k] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) {
            double s = a.c[k];
            for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
            r.c[k] = s / b.c[0];
        }
        return r;
    }

    friend Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

    friend Jet exp(const Jet& a) {
        Jet r;
        r.c[0] = std::exp(a.c[0]);
        for (int k = 1; k <= N; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
            r.c[k] = s / k;
        }
        return r;
    }

    // log of (shift + a); shift lets log1p stay accurate for tiny a0.
    static Jet log_shifted(const Jet& a, double shift, double value) {
        Jet r;
        r.c[0] = value;
        const double a0 = shift + a.c[0];
        for (int k = 1; k <= N; ++k) {
            double s = 0.0;
            for (int j = 1; j < k; ++j) s += j * r.c[j] * a.c[k - j];
            r.c[k] = (a.c[k] - s / k) / a0;
        }
        return r;
    }

    friend Jet log(const Jet& a) { return log_shifted(a, 0.0, std::log(a.c[0])); }
    friend Jet log1p(const Jet& a) { return log_shifted(a, 1.0, std::log1p(a.c[0])); }

    friend Jet pow(const Jet& a, double p) {
        Jet r;
        r.c[0] = std::pow(a.c[0], p);
        for (int k = 1; k <= N; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += ((p + 1.0) * j - k) * a.c[j] * r.c[k - j];
            r.c[k] = s / (k * a.c[0]);
        }
        return r;
    }

    friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }

    friend void sincos_jet(const Jet& a, Jet& s, Jet& co) {
        s.c[0] = std::sin(a.c[0]);
        co.c[0] = std::cos(a.c[0]);
        for (int k = 1; k <= N; ++k) {
            double ss = 0.0;
            double cc = 0.0;
            for (int j = 1; j <= k; ++j) {
                ss += j * a.c[j] * co.c[k - j];
                cc -= j * a.c[j] * s.c[k - j];
            }
            s.c[k] = ss / k;
            co.c[k] = cc / k;
        }
    }

    friend Jet sin(const Jet& a) {
        Jet s;
        Jet co;
        sincos_jet(a, s, co);
        return s;
    }

    friend Jet cos(const Jet& a) {
        Jet s;
        Jet co;
        sincos_jet(a, s, co);
        return co;
    }

    friend bool operator<(const Jet& a, double b) { return a.c[0] < b; }
    friend bool operator>(const Jet& a, double b) { return a.c[0] > b; }
};

/// Plain value of a scalar or jet.
inline double primal(double x) { return x; }
template <int N>
double primal(const Jet<N>& x) {
    return x.c[0];
}

/// pow with a real exponent for both scalars and jets.
inline double rpow(double x, double p) { return std::pow(x, p); }
template <int N>
Jet<N> rpow(const Jet<N>& x, double p) {
    return pow(x, p);
}

/// log(1 + e^x) without overflow.
template <class T>
T softplus(const T& x) {
    using std::exp;
    using std::log1p;
    if (primal(x) > 0.0) return x + log1p(exp(-x));
    return log1p(exp(x));
}

}  // namespace patchflow
