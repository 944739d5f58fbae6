#pragma once

// Series kernels: S(z) = sinh(z/2)/(z/2), the A-kernel of the flat recursion,
// the abelian table a^ab_g, and the trigonometric normalizations q and Q.

#include "flatvol/multipoly.hpp"
#include "flatvol/rational.hpp"
#include "flatvol/series.hpp"
#include "flatvol/weight_vector.hpp"

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flatvol {

/// Exponent E of S(z)^{-E} in the A-kernel.
enum class SExponent {
    printed,  // 2g - 2 + n
    shifted,  // 2g - 1 + n
};

/// Per-node sign of a star-graph term.
enum class TermSign {
    printed,    // (-1)^l
    prefactor,  // (-w_{i0})^{j0}, j0 = 2g0 - 3 + n0 + e0
};

struct ConventionFlags {
    SExponent s_exponent = SExponent::shifted;
    TermSign term_sign = TermSign::prefactor;

    /// The shipped default: shifted exponent, prefactor sign.
    static ConventionFlags validated() { return {}; }
    /// The formula exactly as printed.
    static ConventionFlags printed() { return {SExponent::printed, TermSign::printed}; }
    static std::array<ConventionFlags, 4> matrix();

    bool is_validated() const { return *this == validated(); }
    std::string s_exponent_name() const;
    std::string term_sign_name() const;
    std::string str() const;

    friend bool operator==(const ConventionFlags&, const ConventionFlags&) = default;
    friend auto operator<=>(const ConventionFlags&, const ConventionFlags&) = default;
};

SExponent parse_s_exponent(const std::string& name);
TermSign parse_term_sign(const std::string& name);

/// E for a vertex of genus g0 with `slots` half-edges (legs plus edges).
int s_exponent_value(const ConventionFlags& conv, int g0, std::size_t slots);

/// A weight slot of the kernel: a fixed rational or a formal variable.
struct KernelSlot {
    std::optional<Rational> fixed;
    VarId var = 0;

    static KernelSlot value(const Rational& r) { return {r, 0}; }
    static KernelSlot formal(VarId v) { return {std::nullopt, v}; }
    bool is_fixed() const { return fixed.has_value(); }
};

struct KernelPolynomial {
    int genus = 0;
    std::vector<KernelSlot> slots;
    std::size_t i0 = 0;
    ConventionFlags convention;
    /// Polynomial in the formal slot variables; constant when all slots are fixed.
    MultiPoly body;
};

/// S(z) = sinh(z/2)/(z/2); coefficient of z^{2m} is 1/(4^m (2m+1)!).
TruncatedSeries<Rational> series_S(std::size_t order);

/// z S'(z) / S(z).
TruncatedSeries<Rational> series_zlogS(std::size_t order);

/// [z^{2 g0}] exp(w_{i0} z S'/S) prod_{j != i0} S(w_j z) S(z)^{-E}.
/// `i0` is a 0-based slot index. Throws std::out_of_range for a bad index.
KernelPolynomial kernel_A(int g0, std::vector<KernelSlot> slots, std::size_t i0,
                          ConventionFlags conv);

/// Same kernel with every slot fixed, computed on Rational series directly.
Rational kernel_A_value(int g0, std::span<const Rational> weights, std::size_t i0,
                        ConventionFlags conv);

/// Kernel with every slot formal, slot k bound to VarId k. Memoized.
const MultiPoly& generic_kernel(int g0, std::size_t slots, std::size_t i0, ConventionFlags conv);

struct AbelianTable {
    int g_max = 0;
    std::map<int, Rational> values;  // g -> a^ab_g
};

/// Solves [z^{2g}] F(z)^{2g} = (2g)! [z^{2g}] S(z)^{-1} with
/// F(z) = 1 + sum_{g>0} (2g-1) a^ab_g z^{2g}, triangularly in g.
AbelianTable solve_aab(int g_max);

/// F(z) for a table, truncated at z^{2 g_max}.
TruncatedSeries<Rational> aab_generating_series(const AbelianTable& table);

struct AabIdentityRow {
    int g = 0;
    Rational lhs;  // [z^{2g}] F^{2g}
    Rational rhs;  // (2g)! [z^{2g}] S^{-1}
};

/// Re-substitutes the table into both sides of the defining identity.
std::vector<AabIdentityRow> aab_identity_check(const AbelianTable& table);

/// q(alpha) = (-1)^{g-1+n} / 2^{2-n} * prod sin(pi alpha_i), in double precision.
double q_factor(const WeightVector& alpha);

struct QFactor {
    std::complex<double> symmetric_form;  // product/cotangent expression
    std::complex<double> closed_form;     // (2i)^{2g} (-4)^{n-1} prod sin(pi alpha_i)
};

/// Both expressions of Q(alpha). Throws std::domain_error when one of
/// alpha_1..alpha_{n-1} is an integer (cotangent pole).
QFactor Q_factor(const WeightVector& alpha);

/// Elementary symmetric polynomial e_k of the given values.
double elementary_symmetric(std::span<const double> values, std::size_t k);

}  // namespace flatvol
