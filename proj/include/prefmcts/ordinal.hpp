#ifndef PREFMCTS_ORDINAL_HPP
#define PREFMCTS_ORDINAL_HPP

namespace prefmcts {

/**
 * Qualitative evaluation of a state: either the goal, or a non-goal state
 * carrying a distance-to-go estimate. Only the order of keys is meaningful;
 * the magnitude of `distance` is never used arithmetically.
 */
struct OrdinalKey
{
    bool goal = false;
    double distance = 0.0;  ///< heuristic distance-to-go; ignored when goal

    static constexpr OrdinalKey goal_key() noexcept { return {true, 0.0}; }
    static constexpr OrdinalKey non_goal(double h) noexcept { return {false, h}; }
};

enum class Preference { first_preferred, second_preferred, indifferent };

/// Goal beats every non-goal key; among non-goal keys the smaller distance wins.
constexpr Preference compare_keys(const OrdinalKey& a, const OrdinalKey& b) noexcept
{
    if (a.goal || b.goal) {
        if (a.goal && b.goal)
            return Preference::indifferent;
        return a.goal ? Preference::first_preferred : Preference::second_preferred;
    }
    if (a.distance < b.distance)
        return Preference::first_preferred;
    if (b.distance < a.distance)
        return Preference::second_preferred;
    return Preference::indifferent;
}

constexpr bool operator==(const OrdinalKey& a, const OrdinalKey& b) noexcept
{
    return compare_keys(a, b) == Preference::indifferent;
}

}  // namespace prefmcts

#endif  // PREFMCTS_ORDINAL_HPP
