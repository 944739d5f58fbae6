#pragma once

#include "flatvol/rational.hpp"

#include <string>
#include <vector>

namespace flatvol {

/// Cone-angle vector alpha for genus g with n markings.
///
/// Construction enforces 2g - 2 + n > 0 and the Gauss-Bonnet condition
/// sum(alpha) = 2g - 2 + n. Entries may be non-positive (central-vertex weight
/// lists carry negated twists); positivity is queried with is_positive().
class WeightVector {
public:
    WeightVector(int genus, std::vector<Rational> entries);

    /// Parses a comma-separated list of rationals ("1/2,3/2").
    static WeightVector parse(int genus, const std::string& list);

    int genus() const { return genus_; }
    std::size_t n() const { return entries_.size(); }
    int euler() const { return 2 * genus_ - 2 + static_cast<int>(entries_.size()); }
    const std::vector<Rational>& entries() const { return entries_; }
    /// 1-based marking access.
    const Rational& at(std::size_t label) const { return entries_.at(label - 1); }

    bool is_positive() const;
    bool has_integral_entry() const;
    std::string str() const;

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    int genus_;
    std::vector<Rational> entries_;
};

}  // namespace flatvol
