#pragma once

#include <map>
#include <string>
#include <vector>

namespace waynav {

struct EloEntry {
    std::string policy;
    double rating = 0.0;
    int matches = 0;
};

/// Standard ELO: expected_a = 1 / (1 + 10^((Rb - Ra) / 400)),
/// Ra += k (score_a - expected_a), Rb symmetrically. Zero-sum for a shared k.
class EloTable {
public:
    explicit EloTable(double k_factor = 16.0, double initial = 1200.0);

    /// No-op for a policy already present.
    void add(const std::string& policy);
    /// Registers a policy at a given rating. No-op if already present.
    void add(const std::string& policy, double rating);
    bool contains(const std::string& policy) const;
    /// Throws ContractError for an unknown policy.
    double rating(const std::string& policy) const;
    int matches(const std::string& policy) const;
    double k_factor() const noexcept { return k_; }

    /// score_a in {0, 0.5, 1}. Throws ContractError for unknown policies or
    /// another score.
    void update(const std::string& a, const std::string& b, double score_a);

    /// Highest rating first; ties by name.
    std::vector<EloEntry> standings() const;

private:
    struct Row {
        double rating;
        int matches;
    };
    double k_;
    double initial_;
    std::map<std::string, Row> rows_;
};

double elo_expected(double ra, double rb) noexcept;

}  // namespace waynav
