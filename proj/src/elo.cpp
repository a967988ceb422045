#include "waynav/elo.hpp"

#include <algorithm>
#include <cmath>

#include "waynav/error.hpp"

namespace waynav {

double elo_expected(double ra, double rb) noexcept {
    return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0));
}

EloTable::EloTable(double k_factor, double initial) : k_(k_factor), initial_(initial) {
    if (!(k_factor > 0.0) || !std::isfinite(k_factor))
        throw ConfigError("k factor must be positive and finite");
    if (!std::isfinite(initial)) throw ConfigError("initial rating must be finite");
}

void EloTable::add(const std::string& policy) { add(policy, initial_); }

void EloTable::add(const std::string& policy, double rating) {
    if (!std::isfinite(rating)) throw ContractError("rating must be finite");
    rows_.try_emplace(policy, Row{rating, 0});
}

bool EloTable::contains(const std::string& policy) const { return rows_.count(policy) != 0; }

double EloTable::rating(const std::string& policy) const {
    const auto it = rows_.find(policy);
    if (it == rows_.end()) throw ContractError("unknown policy '" + policy + "'");
    return it->second.rating;
}

int EloTable::matches(const std::string& policy) const {
    const auto it = rows_.find(policy);
    if (it == rows_.end()) throw ContractError("unknown policy '" + policy + "'");
    return it->second.matches;
}

void EloTable::update(const std::string& a, const std::string& b, double score_a) {
    if (score_a != 0.0 && score_a != 0.5 && score_a != 1.0)
        throw ContractError("score must be 0, 0.5 or 1");
    auto ia = rows_.find(a);
    auto ib = rows_.find(b);
    if (ia == rows_.end()) throw ContractError("unknown policy '" + a + "'");
    if (ib == rows_.end()) throw ContractError("unknown policy '" + b + "'");
    if (ia == ib) throw ContractError("policy '" + a + "' cannot play itself");
    const double delta = k_ * (score_a - elo_expected(ia->second.rating, ib->second.rating));
    ia->second.rating += delta;
    ib->second.rating -= delta;
    ++ia->second.matches;
    ++ib->second.matches;
}

std::vector<EloEntry> EloTable::standings() const {
    std::vector<EloEntry> out;
    for (const auto& [name, row] : rows_) out.push_back({name, row.rating, row.matches});
    std::stable_sort(out.begin(), out.end(),
                     [](const EloEntry& x, const EloEntry& y) { return x.rating > y.rating; });
    return out;
}

}  // namespace waynav
