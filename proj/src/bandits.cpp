#include "prefmcts/bandits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace prefmcts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double ucb1(const ArmStats& stats, double n) noexcept { return uct(stats, n, 0.5); }

double uct(const ArmStats& stats, double n, double cp) noexcept
{
    if (stats.pulls == 0)
        return kInf;
    const double nj = static_cast<double>(stats.pulls);
    return stats.mean() + 2.0 * cp * std::sqrt(2.0 * std::log(n) / nj);
}

double rucb_bound(double w_ij, double w_ji, std::uint64_t t, double alpha_hat) noexcept
{
    const double comparisons = w_ij + w_ji;
    if (comparisons <= 0.0)
        return kInf;
    return w_ij / comparisons + std::sqrt(alpha_hat * std::log(static_cast<double>(t)) / comparisons);
}

double PreferenceMatrix::total_mass() const noexcept { return std::accumulate(w_.begin(), w_.end(), 0.0); }

void PreferenceMatrix::record(std::size_t i, std::size_t j, Preference outcome)
{
    if (i == j)
        throw std::invalid_argument("an action cannot be compared with itself");
    if (i >= arms_ || j >= arms_)
        throw std::out_of_range("preference index out of range");
    switch (outcome) {
    case Preference::first_preferred:
        w_[i * arms_ + j] += 1.0;
        break;
    case Preference::second_preferred:
        w_[j * arms_ + i] += 1.0;
        break;
    case Preference::indifferent:
        w_[i * arms_ + j] += 0.5;
        w_[j * arms_ + i] += 0.5;
        break;
    }
}

BoundMatrix rucb_bounds(const PreferenceMatrix& w, std::uint64_t t, double alpha_hat)
{
    const std::size_t k = w.size();
    BoundMatrix u(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j)
                u(i, j) = rucb_bound(w(i, j), w(j, i), t, alpha_hat);
    return u;
}

std::vector<std::size_t> condorcet_candidates(const BoundMatrix& u)
{
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < u.size(); ++i) {
        bool candidate = true;
        for (std::size_t j = 0; j < u.size() && candidate; ++j)
            candidate = u(i, j) >= 0.5;
        if (candidate)
            c.push_back(i);
    }
    return c;
}

PairSelection select_action_pair(const PreferenceMatrix& w, std::optional<std::size_t> last_pick, std::uint64_t t,
                                 double alpha_hat, RngStream& rng)
{
    const std::size_t k = w.size();
    if (k == 0)
        throw std::invalid_argument("select_action_pair needs at least one action");

    const BoundMatrix u = rucb_bounds(w, t, alpha_hat);
    PairSelection sel;
    sel.candidates = condorcet_candidates(u);
    const auto& c = sel.candidates;

    const bool last_in_c = last_pick && std::find(c.begin(), c.end(), *last_pick) != c.end();
    if (c.empty()) {
        sel.first = rng.index(k);
    } else if (last_in_c && c.size() == 1) {
        sel.first = *last_pick;
    } else if (last_in_c) {
        if (rng.coin()) {
            sel.first = *last_pick;
        } else {
            std::size_t pick = rng.index(c.size() - 1);
            for (std::size_t cand : c) {
                if (cand == *last_pick)
                    continue;
                if (pick-- == 0) {
                    sel.first = cand;
                    break;
                }
            }
        }
    } else {
        sel.first = c[rng.index(c.size())];
    }

    // Hardest challenger: argmax_l u(l, a1), with u(a1, a1) = 0.5 competing too.
    double best = -kInf;
    std::vector<std::size_t> maximizers;
    maximizers.reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
        const double v = u(l, sel.first);
        if (v > best) {
            best = v;
            maximizers.clear();
        }
        if (v == best)
            maximizers.push_back(l);
    }
    sel.second = maximizers.size() == 1 ? maximizers.front() : maximizers[rng.index(maximizers.size())];
    return sel;
}

}  // namespace prefmcts
