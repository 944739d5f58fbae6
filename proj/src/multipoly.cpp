#include "flatvol/multipoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace flatvol {

// ---------------------------------------------------------------------------
// VariableRegistry

VarId VariableRegistry::intern(const std::string& name) {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(name); it != index_.end()) {
        return it->second;
    }
    const auto id = static_cast<VarId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

VarId VariableRegistry::fresh(const std::string& name) {
    std::lock_guard lock(mutex_);
    const auto id = static_cast<VarId>(names_.size());
    names_.push_back(name);
    index_.try_emplace(name, id);
    return id;
}

std::string VariableRegistry::name(VarId id) const {
    std::lock_guard lock(mutex_);
    if (id < names_.size()) {
        return names_[id];
    }
    return "x" + std::to_string(id);
}

std::size_t VariableRegistry::size() const {
    std::lock_guard lock(mutex_);
    return names_.size();
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::variable(VarId v, std::uint32_t exponent) {
    Monomial m;
    if (exponent != 0) {
        m.factors_.emplace_back(v, exponent);
    }
    return m;
}

Monomial Monomial::from_pairs(std::vector<std::pair<VarId, std::uint32_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    Monomial m;
    for (const auto& [v, e] : pairs) {
        if (e == 0) {
            continue;
        }
        if (!m.factors_.empty() && m.factors_.back().first == v) {
            m.factors_.back().second += e;
        } else {
            m.factors_.emplace_back(v, e);
        }
    }
    return m;
}

std::uint32_t Monomial::degree() const {
    std::uint32_t d = 0;
    for (const auto& f : factors_) {
        d += f.second;
    }
    return d;
}

std::uint32_t Monomial::exponent(VarId v) const {
    for (const auto& [var, e] : factors_) {
        if (var == v) {
            return e;
        }
    }
    return 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
        if (i->first < j->first) {
            out.factors_.push_back(*i++);
        } else if (j->first < i->first) {
            out.factors_.push_back(*j++);
        } else {
            out.factors_.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    out.factors_.insert(out.factors_.end(), i, a.factors_.end());
    out.factors_.insert(out.factors_.end(), j, b.factors_.end());
    return out;
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(const Rational& constant) {
    if (!constant.is_zero()) {
        terms_.emplace(Monomial{}, constant);
    }
}

MultiPoly MultiPoly::variable(VarId v) { return monomial(Monomial::variable(v), Rational(1)); }

MultiPoly MultiPoly::monomial(const Monomial& m, const Rational& coeff) {
    MultiPoly p;
    if (!coeff.is_zero()) {
        p.terms_.emplace(m, coeff);
    }
    return p;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational MultiPoly::constant_term() const { return coefficient(Monomial{}); }

Rational MultiPoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

std::uint32_t MultiPoly::total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) {
        d = std::max(d, m.degree());
    }
    return d;
}

std::uint32_t MultiPoly::degree_in(VarId v) const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) {
        d = std::max(d, m.exponent(v));
    }
    return d;
}

std::vector<VarId> MultiPoly::variables() const {
    std::vector<VarId> out;
    for (const auto& [m, c] : terms_) {
        for (const auto& f : m.factors()) {
            out.push_back(f.first);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void MultiPoly::add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto& [m, c] : out.terms_) {
        c = -c;
    }
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, c);
    }
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, -c);
    }
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly out;
    if (a.is_zero() || b.is_zero()) {
        return out;
    }
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            out.add_term(ma * mb, ca * cb);
        }
    }
    return out;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& rhs) {
    *this = *this * rhs;
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& scalar) {
    if (scalar.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) {
        c *= scalar;
    }
    return *this;
}

Rational MultiPoly::evaluate(const std::map<VarId, Rational>& point) const {
    Rational total;
    for (const auto& [m, c] : terms_) {
        Rational term = c;
        for (const auto& [v, e] : m.factors()) {
            auto it = point.find(v);
            if (it == point.end()) {
                throw std::invalid_argument("evaluate: no value for variable " + std::to_string(v));
            }
            term *= pow(it->second, e);
        }
        total += term;
    }
    return total;
}

MultiPoly MultiPoly::compose_affine(const std::map<VarId, AffineExpr>& images) const {
    // powers[v][e] = image(v)^e, filled lazily
    std::map<VarId, std::vector<MultiPoly>> powers;
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m.factors()) {
            auto img = images.find(v);
            if (img == images.end()) {
                throw std::invalid_argument("compose_affine: no image for variable " +
                                            std::to_string(v));
            }
            auto& table = powers[v];
            if (table.empty()) {
                table.emplace_back(Rational(1));
            }
            while (table.size() <= e) {
                table.push_back(table.back() * img->second.to_poly());
            }
        }
    }
    MultiPoly out;
    for (const auto& [m, c] : terms_) {
        MultiPoly term(c);
        for (const auto& [v, e] : m.factors()) {
            term *= powers[v][e];
        }
        out += term;
    }
    return out;
}

std::string MultiPoly::str(const VariableRegistry* names) const {
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) {
            os << " + ";
        }
        first = false;
        os << c;
        for (const auto& [v, e] : m.factors()) {
            os << '*' << (names ? names->name(v) : "x" + std::to_string(v));
            if (e > 1) {
                os << '^' << e;
            }
        }
    }
    return os.str();
}

MultiPoly pow(const MultiPoly& base, unsigned exponent) {
    MultiPoly result(Rational(1));
    MultiPoly b = base;
    while (exponent != 0) {
        if (exponent & 1U) {
            result *= b;
        }
        exponent >>= 1U;
        if (exponent != 0) {
            b *= b;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr AffineExpr::variable(VarId v, const Rational& coeff) {
    AffineExpr e;
    if (!coeff.is_zero()) {
        e.linear_.emplace(v, coeff);
    }
    return e;
}

Rational AffineExpr::coeff(VarId v) const {
    auto it = linear_.find(v);
    return it == linear_.end() ? Rational(0) : it->second;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& rhs) {
    constant_ += rhs.constant_;
    for (const auto& [v, c] : rhs.linear_) {
        auto [it, inserted] = linear_.try_emplace(v, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                linear_.erase(it);
            }
        }
    }
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& rhs) { return *this += -rhs; }

AffineExpr& AffineExpr::operator*=(const Rational& s) {
    if (s.is_zero()) {
        constant_ = Rational(0);
        linear_.clear();
        return *this;
    }
    constant_ *= s;
    for (auto& [v, c] : linear_) {
        c *= s;
    }
    return *this;
}

AffineExpr AffineExpr::operator-() const {
    AffineExpr out = *this;
    out *= Rational(-1);
    return out;
}

AffineExpr AffineExpr::substitute(const std::map<VarId, AffineExpr>& images) const {
    AffineExpr out(constant_);
    for (const auto& [v, c] : linear_) {
        auto it = images.find(v);
        if (it == images.end()) {
            out += variable(v, c);
        } else {
            out += it->second * c;
        }
    }
    return out;
}

Rational AffineExpr::evaluate(const std::map<VarId, Rational>& point) const {
    Rational total = constant_;
    for (const auto& [v, c] : linear_) {
        auto it = point.find(v);
        if (it == point.end()) {
            throw std::invalid_argument("evaluate: no value for variable " + std::to_string(v));
        }
        total += c * it->second;
    }
    return total;
}

MultiPoly AffineExpr::to_poly() const {
    MultiPoly p(constant_);
    for (const auto& [v, c] : linear_) {
        p += MultiPoly::monomial(Monomial::variable(v), c);
    }
    return p;
}

std::string AffineExpr::str(const VariableRegistry* names) const {
    std::ostringstream os;
    os << constant_;
    for (const auto& [v, c] : linear_) {
        os << (c.sign() < 0 ? " - " : " + ");
        const Rational a = abs(c);
        if (a != Rational(1)) {
            os << a << '*';
        }
        os << (names ? names->name(v) : "x" + std::to_string(v));
    }
    return os.str();
}

}  // namespace flatvol
