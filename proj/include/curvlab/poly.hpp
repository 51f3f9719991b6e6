#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

// Dense univariate polynomials, coefficient index = power.
namespace curvlab::poly {

template <class T>
T eval(const std::vector<T>& p, const T& x) {
    T acc{};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<T> out(a.size() + b.size() - 1, T{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// a * b truncated to powers < n.
template <class T>
std::vector<T> mul_trunc(const std::vector<T>& a, const std::vector<T>& b, std::size_t n) {
    std::vector<T> out(n, T{});
    for (std::size_t i = 0; i < a.size() && i < n; ++i)
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
    return out;
}

template <class T>
std::vector<T> add(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out(std::max(a.size(), b.size()), T{});
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

template <class T>
std::vector<T> pow(const std::vector<T>& a, int n) {
    std::vector<T> out{T{1}};
    for (int i = 0; i < n; ++i) out = mul(out, a);
    return out;
}

// Degree under an exact-zero predicate; -1 for the zero polynomial.
template <class T, class IsZero>
int degree(const std::vector<T>& p, IsZero is_zero) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (!is_zero(p[i])) return static_cast<int>(i);
    return -1;
}

template <class T>
std::vector<T> derivative(const std::vector<T>& p) {
    if (p.size() <= 1) return {};
    std::vector<T> out(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * T(static_cast<double>(i));
    return out;
}

}  // namespace curvlab::poly
