#include "flatvol/kernel.hpp"

#include "flatvol/errors.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace flatvol {

std::array<ConventionFlags, 4> ConventionFlags::matrix() {
    return {{
        {SExponent::shifted, TermSign::prefactor},
        {SExponent::printed, TermSign::prefactor},
        {SExponent::shifted, TermSign::printed},
        {SExponent::printed, TermSign::printed},
    }};
}

std::string ConventionFlags::s_exponent_name() const {
    return s_exponent == SExponent::printed ? "printed" : "shifted";
}

std::string ConventionFlags::term_sign_name() const {
    return term_sign == TermSign::printed ? "printed" : "prefactor";
}

std::string ConventionFlags::str() const {
    return "s_exponent=" + s_exponent_name() + ",term_sign=" + term_sign_name();
}

SExponent parse_s_exponent(const std::string& name) {
    if (name == "printed") {
        return SExponent::printed;
    }
    if (name == "shifted") {
        return SExponent::shifted;
    }
    throw InputError("unknown s-exponent convention '" + name + "' (printed|shifted)");
}

TermSign parse_term_sign(const std::string& name) {
    if (name == "printed") {
        return TermSign::printed;
    }
    if (name == "prefactor") {
        return TermSign::prefactor;
    }
    throw InputError("unknown term-sign convention '" + name + "' (printed|prefactor)");
}

int s_exponent_value(const ConventionFlags& conv, int g0, std::size_t slots) {
    const int base = 2 * g0 - 2 + static_cast<int>(slots);
    return conv.s_exponent == SExponent::printed ? base : base + 1;
}

TruncatedSeries<Rational> series_S(std::size_t order) {
    TruncatedSeries<Rational> s(order);
    for (std::size_t m = 0; 2 * m <= order; ++m) {
        const Rational denom = pow(Rational(4), static_cast<unsigned>(m)) *
                               factorial(static_cast<unsigned>(2 * m + 1));
        s.set(2 * m, inverse(denom));
    }
    return s;
}

TruncatedSeries<Rational> series_zlogS(std::size_t order) {
    const auto s = series_S(order);
    return s.euler_derivative() * series_inverse(s);
}

namespace {

// S(w z) where w is a ring element.
template <typename C>
TruncatedSeries<C> scaled_S(const TruncatedSeries<Rational>& s, const C& w) {
    TruncatedSeries<C> out(s.order());
    C w2 = w * w;
    C power(Rational(1));
    for (std::size_t i = 0; i <= s.order(); i += 2) {
        out.set(i, power * s.coeff(i));
        power = power * w2;
    }
    return out;
}

template <typename C>
TruncatedSeries<C> lift(const TruncatedSeries<Rational>& s) {
    TruncatedSeries<C> out(s.order());
    for (std::size_t i = 0; i <= s.order(); ++i) {
        out.set(i, C(s.coeff(i)));
    }
    return out;
}

template <typename C>
C kernel_coefficient(int g0, const std::vector<C>& w, std::size_t i0, ConventionFlags conv) {
    if (i0 >= w.size()) {
        throw std::out_of_range("kernel_A: slot index " + std::to_string(i0) + " out of range");
    }
    if (g0 < 0) {
        throw std::invalid_argument("kernel_A: negative genus");
    }
    const auto order = static_cast<std::size_t>(2 * g0);
    if (order == 0) {
        return C(Rational(1));
    }
    const auto S = series_S(order);
    const auto zlogS = series_zlogS(order);

    TruncatedSeries<C> exponent(order);
    for (std::size_t i = 0; i <= order; ++i) {
        exponent.set(i, w[i0] * zlogS.coeff(i));
    }
    auto product = series_exp(exponent);
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (j != i0) {
            product = product * scaled_S(S, w[j]);
        }
    }
    const int E = s_exponent_value(conv, g0, w.size());
    const auto s_inv = series_inverse(S);
    const auto s_power = E >= 0 ? series_pow(s_inv, static_cast<unsigned>(E))
                                : series_pow(S, static_cast<unsigned>(-E));
    product = product * lift<C>(s_power);
    return product.coeff(order);
}

}  // namespace

KernelPolynomial kernel_A(int g0, std::vector<KernelSlot> slots, std::size_t i0,
                          ConventionFlags conv) {
    std::vector<MultiPoly> w;
    w.reserve(slots.size());
    for (const auto& slot : slots) {
        w.push_back(slot.is_fixed() ? MultiPoly(*slot.fixed) : MultiPoly::variable(slot.var));
    }
    KernelPolynomial k;
    k.body = kernel_coefficient(g0, w, i0, conv);
    k.genus = g0;
    k.slots = std::move(slots);
    k.i0 = i0;
    k.convention = conv;
    return k;
}

Rational kernel_A_value(int g0, std::span<const Rational> weights, std::size_t i0,
                        ConventionFlags conv) {
    return kernel_coefficient(g0, std::vector<Rational>(weights.begin(), weights.end()), i0, conv);
}

const MultiPoly& generic_kernel(int g0, std::size_t slots, std::size_t i0, ConventionFlags conv) {
    using Key = std::tuple<int, std::size_t, std::size_t, ConventionFlags>;
    static std::mutex mutex;
    static std::map<Key, MultiPoly> cache;
    const Key key{g0, slots, i0, conv};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    std::vector<KernelSlot> formal;
    for (std::size_t k = 0; k < slots; ++k) {
        formal.push_back(KernelSlot::formal(static_cast<VarId>(k)));
    }
    MultiPoly body = kernel_A(g0, std::move(formal), i0, conv).body;
    std::lock_guard lock(mutex);
    // std::map nodes are stable; a concurrent identical insert keeps the first value.
    return cache.try_emplace(key, std::move(body)).first->second;
}

TruncatedSeries<Rational> aab_generating_series(const AbelianTable& table) {
    const auto order = static_cast<std::size_t>(2 * table.g_max);
    TruncatedSeries<Rational> F(order);
    F.set(0, Rational(1));
    for (const auto& [g, a] : table.values) {
        F.set(static_cast<std::size_t>(2 * g), Rational(2 * g - 1) * a);
    }
    return F;
}

AbelianTable solve_aab(int g_max) {
    if (g_max < 1) {
        throw InputError("solve_aab: g_max must be >= 1");
    }
    AbelianTable table;
    table.g_max = g_max;
    const auto order = static_cast<std::size_t>(2 * g_max);
    const auto s_inv = series_inverse(series_S(order));
    for (int g = 1; g <= g_max; ++g) {
        const auto deg = static_cast<std::size_t>(2 * g);
        // With a_g unknown (set to zero), [z^{2g}] F^{2g} = c + 2g (2g-1) a_g.
        table.values[g] = Rational(0);
        const auto F = aab_generating_series(table);
        const Rational c = series_pow(F, static_cast<unsigned>(2 * g)).coeff(deg);
        const Rational rhs = factorial(static_cast<unsigned>(2 * g)) * s_inv.coeff(deg);
        table.values[g] = (rhs - c) / Rational(2L * g * (2L * g - 1));
    }
    return table;
}

std::vector<AabIdentityRow> aab_identity_check(const AbelianTable& table) {
    const auto order = static_cast<std::size_t>(2 * table.g_max);
    const auto F = aab_generating_series(table);
    const auto s_inv = series_inverse(series_S(order));
    std::vector<AabIdentityRow> rows;
    for (int g = 1; g <= table.g_max; ++g) {
        const auto deg = static_cast<std::size_t>(2 * g);
        rows.push_back({g, series_pow(F, static_cast<unsigned>(2 * g)).coeff(deg),
                        factorial(static_cast<unsigned>(2 * g)) * s_inv.coeff(deg)});
    }
    return rows;
}

double q_factor(const WeightVector& alpha) {
    const int g = alpha.genus();
    const int n = static_cast<int>(alpha.n());
    double value = ((g - 1 + n) % 2 == 0 ? 1.0 : -1.0) / std::ldexp(1.0, 2 - n);
    for (const auto& a : alpha.entries()) {
        // sin(pi a) computed on the reduced argument so integers give exactly 0.
        const Rational frac = a - Rational(a.floor());
        const double s = frac.is_zero() ? 0.0 : std::sin(std::numbers::pi * frac.to_double());
        const bool odd_floor = mpz_odd_p(a.floor().get_mpz_t()) != 0;
        value *= odd_floor ? -s : s;
    }
    return value == 0.0 ? 0.0 : value;
}

double elementary_symmetric(std::span<const double> values, std::size_t k) {
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double x : values) {
        for (std::size_t j = k; j >= 1; --j) {
            e[j] += x * e[j - 1];
        }
    }
    return e[k];
}

QFactor Q_factor(const WeightVector& alpha) {
    using namespace std::complex_literals;
    const int g = alpha.genus();
    const std::size_t n = alpha.n();
    const double pi = std::numbers::pi;

    const std::complex<double> two_i_pow = std::pow(2.0i, 2 * g);

    std::vector<double> cot;
    double modulus_product = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Rational& a = alpha.entries()[i];
        if (a.is_integer()) {
            throw std::domain_error("Q_factor: cotangent pole at integral alpha_" +
                                    std::to_string(i + 1));
        }
        const double x = a.to_double();
        const std::complex<double> u = 1.0 - std::exp(2.0i * pi * x);
        modulus_product *= std::norm(u);
        cot.push_back(std::cos(pi * x) / std::sin(pi * x));
    }
    double sym = 0.0;
    if (n >= 2) {
        for (std::size_t a = 0; 2 * a <= n - 2; ++a) {
            const double e = elementary_symmetric(cot, n - 2 - 2 * a);
            sym += (a % 2 == 0 ? e : -e);
        }
    }

    double sines = 1.0;
    for (const auto& a : alpha.entries()) {
        sines *= std::sin(pi * a.to_double());
    }
    QFactor q;
    q.symmetric_form = two_i_pow * modulus_product * sym;
    q.closed_form = two_i_pow * std::pow(-4.0, static_cast<int>(n) - 1) * sines;
    return q;
}

}  // namespace flatvol
