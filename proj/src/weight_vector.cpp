#include "flatvol/weight_vector.hpp"

#include "flatvol/errors.hpp"

#include <sstream>

namespace flatvol {

WeightVector::WeightVector(int genus, std::vector<Rational> entries)
    : genus_(genus), entries_(std::move(entries)) {
    if (genus_ < 0) {
        throw InputError("genus must be non-negative");
    }
    if (euler() <= 0) {
        throw InputError("unstable (g, n) = (" + std::to_string(genus_) + ", " +
                         std::to_string(entries_.size()) + "): need 2g-2+n > 0");
    }
    Rational sum;
    for (const auto& a : entries_) {
        sum += a;
    }
    if (sum != Rational(euler())) {
        throw InputError("Gauss-Bonnet violated: sum(alpha) = " + sum.str() +
                         " != 2g-2+n = " + std::to_string(euler()));
    }
}

WeightVector WeightVector::parse(int genus, const std::string& list) {
    std::vector<Rational> entries;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        entries.push_back(Rational::parse(item));
    }
    return WeightVector(genus, std::move(entries));
}

bool WeightVector::is_positive() const {
    for (const auto& a : entries_) {
        if (a.sign() <= 0) {
            return false;
        }
    }
    return true;
}

bool WeightVector::has_integral_entry() const {
    for (const auto& a : entries_) {
        if (a.is_integer()) {
            return true;
        }
    }
    return false;
}

std::string WeightVector::str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i != 0) {
            out += ",";
        }
        out += entries_[i].str();
    }
    return out + ")";
}

}  // namespace flatvol
