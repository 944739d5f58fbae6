#pragma once

// Sparse multivariate polynomials with exact rational coefficients, plus the
// affine expressions used for substitutions and domain descriptions.

#include "flatvol/rational.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flatvol {

using VarId = std::uint32_t;

/// Interned variable names, for diagnostics only. Arithmetic never consults it.
class VariableRegistry {
public:
    VarId intern(const std::string& name);
    /// Always creates a fresh id, even if the name was seen before.
    VarId fresh(const std::string& name);
    std::string name(VarId id) const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarId> index_;
};

/// Power product, stored as (variable, exponent) pairs sorted by variable with
/// strictly positive exponents.
class Monomial {
public:
    Monomial() = default;
    static Monomial variable(VarId v, std::uint32_t exponent = 1);
    static Monomial from_pairs(std::vector<std::pair<VarId, std::uint32_t>> pairs);

    const std::vector<std::pair<VarId, std::uint32_t>>& factors() const { return factors_; }
    std::uint32_t degree() const;
    std::uint32_t exponent(VarId v) const;
    bool is_one() const { return factors_.empty(); }

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend auto operator<=>(const Monomial&, const Monomial&) = default;
    friend bool operator==(const Monomial&, const Monomial&) = default;

private:
    std::vector<std::pair<VarId, std::uint32_t>> factors_;
};

class AffineExpr;

class MultiPoly {
public:
    using TermMap = std::map<Monomial, Rational>;

    MultiPoly() = default;
    MultiPoly(const Rational& constant);  // NOLINT(google-explicit-constructor)
    MultiPoly(long constant) : MultiPoly(Rational(constant)) {}  // NOLINT
    static MultiPoly variable(VarId v);
    static MultiPoly monomial(const Monomial& m, const Rational& coeff);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;
    Rational coefficient(const Monomial& m) const;
    std::uint32_t total_degree() const;
    std::uint32_t degree_in(VarId v) const;
    std::vector<VarId> variables() const;

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& rhs);
    MultiPoly& operator-=(const MultiPoly& rhs);
    MultiPoly& operator*=(const MultiPoly& rhs);
    MultiPoly& operator*=(const Rational& scalar);

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
    friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }
    friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

    /// Full evaluation. Throws std::invalid_argument if a variable has no value.
    Rational evaluate(const std::map<VarId, Rational>& point) const;

    /// Substitutes every variable by its affine image and expands.
    /// Throws std::invalid_argument if a variable of the polynomial has no image.
    MultiPoly compose_affine(const std::map<VarId, AffineExpr>& images) const;

    std::string str(const VariableRegistry* names = nullptr) const;

private:
    void add_term(const Monomial& m, const Rational& c);

    TermMap terms_;
};

MultiPoly pow(const MultiPoly& base, unsigned exponent);

/// c + sum_v a_v * v
class AffineExpr {
public:
    AffineExpr() = default;
    AffineExpr(const Rational& constant) : constant_(constant) {}  // NOLINT
    AffineExpr(long constant) : constant_(constant) {}             // NOLINT
    static AffineExpr variable(VarId v, const Rational& coeff = Rational(1));

    const Rational& constant() const { return constant_; }
    const std::map<VarId, Rational>& linear() const { return linear_; }
    Rational coeff(VarId v) const;
    bool is_constant() const { return linear_.empty(); }

    AffineExpr& operator+=(const AffineExpr& rhs);
    AffineExpr& operator-=(const AffineExpr& rhs);
    AffineExpr& operator*=(const Rational& s);
    AffineExpr operator-() const;
    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator*(AffineExpr a, const Rational& s) { return a *= s; }
    friend AffineExpr operator*(const Rational& s, AffineExpr a) { return a *= s; }
    friend bool operator==(const AffineExpr&, const AffineExpr&) = default;

    /// Replaces variables by affine images; variables without an image are kept.
    AffineExpr substitute(const std::map<VarId, AffineExpr>& images) const;
    Rational evaluate(const std::map<VarId, Rational>& point) const;
    MultiPoly to_poly() const;
    std::string str(const VariableRegistry* names = nullptr) const;

private:
    Rational constant_;
    std::map<VarId, Rational> linear_;
};

}  // namespace flatvol
