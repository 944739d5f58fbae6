#pragma once

// Truncated univariate power series sum_{i<=N} c_i z^i over a coefficient ring
// (Rational or MultiPoly). Operations never read or produce coefficients past N.

#include "flatvol/multipoly.hpp"
#include "flatvol/rational.hpp"

#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatvol {

template <typename C>
concept SeriesCoefficient = requires(C a, const C& b, const Rational& r) {
    C(r);
    { a + b } -> std::convertible_to<C>;
    { a - b } -> std::convertible_to<C>;
    { a * b } -> std::convertible_to<C>;
    { a * r } -> std::convertible_to<C>;
    { a.is_zero() } -> std::convertible_to<bool>;
};

inline Rational invert_unit(const Rational& c) {
    if (c.is_zero()) {
        throw std::domain_error("series inverse: constant term is zero");
    }
    return inverse(c);
}

inline MultiPoly invert_unit(const MultiPoly& c) {
    if (!c.is_constant() || c.is_zero()) {
        throw std::domain_error("series inverse: constant term is not a nonzero constant");
    }
    return MultiPoly(inverse(c.constant_term()));
}

template <SeriesCoefficient C>
class TruncatedSeries {
public:
    explicit TruncatedSeries(std::size_t order) : coeffs_(order + 1, C(Rational(0))) {}
    TruncatedSeries(std::size_t order, std::vector<C> coeffs) : coeffs_(std::move(coeffs)) {
        coeffs_.resize(order + 1, C(Rational(0)));
    }

    static TruncatedSeries constant(std::size_t order, const C& c) {
        TruncatedSeries s(order);
        s.coeffs_[0] = c;
        return s;
    }

    std::size_t order() const { return coeffs_.size() - 1; }

    const C& coeff(std::size_t i) const {
        if (i > order()) {
            throw std::out_of_range("series coefficient " + std::to_string(i) +
                                    " beyond truncation order " + std::to_string(order()));
        }
        return coeffs_[i];
    }
    void set(std::size_t i, C value) {
        if (i > order()) {
            throw std::out_of_range("series coefficient " + std::to_string(i) +
                                    " beyond truncation order " + std::to_string(order()));
        }
        coeffs_[i] = std::move(value);
    }

    TruncatedSeries& operator+=(const TruncatedSeries& rhs) {
        check_order(rhs);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            coeffs_[i] = coeffs_[i] + rhs.coeffs_[i];
        }
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& rhs) {
        check_order(rhs);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            coeffs_[i] = coeffs_[i] - rhs.coeffs_[i];
        }
        return *this;
    }
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    TruncatedSeries operator-() const { return scaled(Rational(-1)); }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_order(b);
        TruncatedSeries out(a.order());
        for (std::size_t i = 0; i <= a.order(); ++i) {
            if (a.coeffs_[i].is_zero()) {
                continue;
            }
            for (std::size_t j = 0; i + j <= a.order(); ++j) {
                if (!b.coeffs_[j].is_zero()) {
                    out.coeffs_[i + j] = out.coeffs_[i + j] + a.coeffs_[i] * b.coeffs_[j];
                }
            }
        }
        return out;
    }

    TruncatedSeries scaled(const Rational& r) const {
        TruncatedSeries out = *this;
        for (auto& c : out.coeffs_) {
            c = c * r;
        }
        return out;
    }

    /// Multiplies every coefficient by a ring element.
    TruncatedSeries times(const C& c) const {
        TruncatedSeries out = *this;
        for (auto& x : out.coeffs_) {
            x = x * c;
        }
        return out;
    }

    /// z * d/dz
    TruncatedSeries euler_derivative() const {
        TruncatedSeries out(order());
        for (std::size_t i = 1; i <= order(); ++i) {
            out.coeffs_[i] = coeffs_[i] * Rational(static_cast<long>(i));
        }
        return out;
    }

    bool operator==(const TruncatedSeries&) const = default;

private:
    void check_order(const TruncatedSeries& other) const {
        if (other.order() != order()) {
            throw std::logic_error("series truncation orders differ");
        }
    }

    std::vector<C> coeffs_;
};

/// exp(s) for s with zero constant term, via n E_n = sum_k k s_k E_{n-k}.
template <SeriesCoefficient C>
TruncatedSeries<C> series_exp(const TruncatedSeries<C>& s) {
    if (!s.coeff(0).is_zero()) {
        throw std::domain_error("series_exp: constant term must be zero");
    }
    const std::size_t n = s.order();
    TruncatedSeries<C> out(n);
    out.set(0, C(Rational(1)));
    for (std::size_t m = 1; m <= n; ++m) {
        C acc(Rational(0));
        for (std::size_t k = 1; k <= m; ++k) {
            if (!s.coeff(k).is_zero()) {
                acc = acc + s.coeff(k) * out.coeff(m - k) * Rational(static_cast<long>(k));
            }
        }
        out.set(m, acc * Rational(1, static_cast<long>(m)));
    }
    return out;
}

/// Multiplicative inverse; the constant term must be a unit.
template <SeriesCoefficient C>
TruncatedSeries<C> series_inverse(const TruncatedSeries<C>& s) {
    const C inv0 = invert_unit(s.coeff(0));
    const std::size_t n = s.order();
    TruncatedSeries<C> out(n);
    out.set(0, inv0);
    for (std::size_t m = 1; m <= n; ++m) {
        C acc(Rational(0));
        for (std::size_t k = 1; k <= m; ++k) {
            if (!s.coeff(k).is_zero()) {
                acc = acc + s.coeff(k) * out.coeff(m - k);
            }
        }
        out.set(m, -(acc * inv0));
    }
    return out;
}

/// log(s) for s with constant term 1.
template <SeriesCoefficient C>
TruncatedSeries<C> series_log(const TruncatedSeries<C>& s) {
    if (!(s.coeff(0) - C(Rational(1))).is_zero()) {
        throw std::domain_error("series_log: constant term must be 1");
    }
    // z (log s)' = z s' / s, then divide the i-th coefficient by i.
    const auto zd = s.euler_derivative() * series_inverse(s);
    TruncatedSeries<C> out(s.order());
    for (std::size_t i = 1; i <= s.order(); ++i) {
        out.set(i, zd.coeff(i) * Rational(1, static_cast<long>(i)));
    }
    return out;
}

template <SeriesCoefficient C>
TruncatedSeries<C> series_pow(const TruncatedSeries<C>& s, unsigned exponent) {
    auto result = TruncatedSeries<C>::constant(s.order(), C(Rational(1)));
    auto base = s;
    while (exponent != 0) {
        if (exponent & 1U) {
            result = result * base;
        }
        exponent >>= 1U;
        if (exponent != 0) {
            base = base * base;
        }
    }
    return result;
}

}  // namespace flatvol
