#ifndef PREFMCTS_BANDITS_HPP
#define PREFMCTS_BANDITS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "prefmcts/ordinal.hpp"
#include "prefmcts/rng.hpp"

namespace prefmcts {

/// Running reward statistics of one arm.
struct ArmStats
{
    double reward_sum = 0.0;
    std::uint64_t pulls = 0;

    void add(double reward) noexcept
    {
        reward_sum += reward;
        ++pulls;
    }
    /// Only meaningful when pulls > 0.
    double mean() const noexcept { return reward_sum / static_cast<double>(pulls); }
};

/// mean + sqrt(2 ln n / n_j); +inf for an unpulled arm.
double ucb1(const ArmStats& stats, double n) noexcept;

/// mean + 2 C_p sqrt(2 ln n / n_j); +inf for an unpulled arm.
double uct(const ArmStats& stats, double n, double cp) noexcept;

/// Relative upper confidence bound of arm i against arm j:
/// w_ij / (w_ij + w_ji) + sqrt(alpha_hat ln t / (w_ij + w_ji)), +inf without comparisons.
/// The diagonal (fixed at 0.5) is the caller's business.
double rucb_bound(double w_ij, double w_ji, std::uint64_t t, double alpha_hat) noexcept;

/**
 * Pairwise win credits over a node's actions. w(i, j) is the credit of i
 * against j; a tie gives half a credit to each side. The diagonal stays 0.
 */
class PreferenceMatrix
{
public:
    PreferenceMatrix() = default;
    explicit PreferenceMatrix(std::size_t arms) : arms_(arms), w_(arms * arms, 0.0) {}

    std::size_t size() const noexcept { return arms_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return w_[i * arms_ + j]; }
    /// Comparisons recorded between i and j.
    double mass(std::size_t i, std::size_t j) const noexcept { return (*this)(i, j) + (*this)(j, i); }
    /// All comparisons recorded in this matrix.
    double total_mass() const noexcept;

    /// `outcome` is from i's point of view. Throws std::invalid_argument when i == j.
    void record(std::size_t i, std::size_t j, Preference outcome);

    const std::vector<double>& entries() const noexcept { return w_; }
    bool operator==(const PreferenceMatrix&) const = default;

private:
    std::size_t arms_ = 0;
    std::vector<double> w_;
};

/// Free-function spelling of PreferenceMatrix::record.
inline void record_preference(PreferenceMatrix& w, std::size_t i, std::size_t j, Preference outcome)
{
    w.record(i, j, outcome);
}

/// Square matrix of u_ij values with the diagonal fixed at 0.5.
class BoundMatrix
{
public:
    BoundMatrix() = default;
    explicit BoundMatrix(std::size_t arms) : arms_(arms), u_(arms * arms, 0.5) {}

    std::size_t size() const noexcept { return arms_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return u_[i * arms_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return u_[i * arms_ + j]; }

private:
    std::size_t arms_ = 0;
    std::vector<double> u_;
};

BoundMatrix rucb_bounds(const PreferenceMatrix& w, std::uint64_t t, double alpha_hat);

/// Arms whose bound against every arm is at least 0.5, ascending. May be empty.
std::vector<std::size_t> condorcet_candidates(const BoundMatrix& u);

struct PairSelection
{
    std::size_t first = 0;   ///< a1, the Condorcet pick (also the node's new last pick)
    std::size_t second = 0;  ///< a2, a1's hardest challenger; may equal first
    std::vector<std::size_t> candidates;
};

/**
 * RUCB pair selection.
 *
 * Random draws, in order: for a1, a coin when the last pick is one of
 * several candidates (heads keeps it), then an index into the remaining
 * candidates (or into all arms when there are none); for a2, an index into
 * the tied maximizers of u(l, a1) when more than one ties. Draws are
 * skipped when the choice is forced.
 */
PairSelection select_action_pair(const PreferenceMatrix& w, std::optional<std::size_t> last_pick, std::uint64_t t,
                                 double alpha_hat, RngStream& rng);

}  // namespace prefmcts

#endif  // PREFMCTS_BANDITS_HPP
