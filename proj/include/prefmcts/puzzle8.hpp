#ifndef PREFMCTS_PUZZLE8_HPP
#define PREFMCTS_PUZZLE8_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefmcts/ordinal.hpp"
#include "prefmcts/rng.hpp"

namespace prefmcts::puzzle8 {

inline constexpr int kSide = 3;
inline constexpr int kCells = kSide * kSide;
inline constexpr std::size_t kReachableStates = 181440;  // 9!/2
inline constexpr int kDiameter = 31;
/// Cap applied to the distance estimate before normalizing it into [0,1].
inline constexpr int kHeuristicCap = 40;

class MalformedBoard : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class IllegalMove : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class UnreachableDistance : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

/// Direction the blank travels; the neighbouring tile slides the opposite way.
enum class Move : std::uint8_t { up, down, left, right };

inline constexpr std::array<Move, 4> kAllMoves{Move::up, Move::down, Move::left, Move::right};

Move inverse(Move m) noexcept;
std::string_view to_string(Move m) noexcept;

/// Fixed-capacity list of legal moves (at most four).
class MoveList
{
public:
    void push(Move m) noexcept { moves_[count_++] = m; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    Move operator[](std::size_t i) const noexcept { return moves_[i]; }
    const Move* begin() const noexcept { return moves_.data(); }
    const Move* end() const noexcept { return moves_.data() + count_; }

private:
    std::array<Move, 4> moves_{};
    std::uint8_t count_ = 0;
};

/// A 3x3 position in row-major order; 0 is the blank.
class Board
{
public:
    using Cells = std::array<std::uint8_t, kCells>;

    /// The default goal, "123456780".
    Board() noexcept;

    /// Throws MalformedBoard unless `cells` is a permutation of 0..8.
    explicit Board(const Cells& cells);

    const Cells& cells() const noexcept { return cells_; }
    std::uint8_t operator[](int index) const noexcept { return cells_[index]; }
    int blank() const noexcept { return blank_; }

    friend bool operator==(const Board& a, const Board& b) noexcept { return a.cells_ == b.cells_; }
    friend auto operator<=>(const Board& a, const Board& b) noexcept { return a.cells_ <=> b.cells_; }

private:
    struct Trusted {};
    Board(const Cells& cells, int blank, Trusted) noexcept : cells_(cells), blank_(static_cast<std::uint8_t>(blank)) {}

    friend Board apply_move(const Board& b, Move m);
    friend Board apply_legal_move(const Board& b, Move m) noexcept;

    Cells cells_;
    std::uint8_t blank_;
};

/// A goal board together with each value's target row and column.
class Goal
{
public:
    Goal() noexcept : Goal(Board()) {}
    explicit Goal(const Board& board) noexcept;

    const Board& board() const noexcept { return board_; }
    int row(int value) const noexcept { return row_[value]; }
    int col(int value) const noexcept { return col_[value]; }

private:
    Board board_;
    std::array<std::int8_t, kCells> row_{};
    std::array<std::int8_t, kCells> col_{};
};

const Goal& default_goal() noexcept;

MoveList legal_moves(const Board& b) noexcept;
/// Throws IllegalMove if the blank would leave the grid.
Board apply_move(const Board& b, Move m);
/// Precondition: m is legal for b (not checked).
Board apply_legal_move(const Board& b, Move m) noexcept;
bool is_goal(const Board& b, const Goal& goal = default_goal()) noexcept;

int manhattan(const Board& b, const Goal& goal = default_goal()) noexcept;
/// Unordered pairs of tiles sharing their goal row (or column) in inverted order.
int linear_conflicts(const Board& b, const Goal& goal = default_goal()) noexcept;
/// Per row and column, the fewest tiles that must step out of the line to let the
/// others pass. Equals linear_conflicts unless three tiles conflict in one line.
int conflict_removals(const Board& b, const Goal& goal = default_goal()) noexcept;
/// Manhattan distance plus two moves per tile that has to leave its goal line.
int mdc(const Board& b, const Goal& goal = default_goal()) noexcept;
bool is_solvable(const Board& b, const Goal& goal = default_goal()) noexcept;

/// 1.0 at the goal, otherwise 1 - min(mdc, 40) / 41.
double heuristic_value(const Board& b, const Goal& goal = default_goal()) noexcept;
OrdinalKey ordinal_key(const Board& b, const Goal& goal = default_goal()) noexcept;

/// Nine digits, row-major, '0' for the blank. Throws MalformedBoard.
Board parse_board(std::string_view text);
std::string format_board(const Board& b);

/// Exact optimal solution lengths for every board reachable from a goal.
class DistanceTable
{
public:
    /// Breadth-first search from the goal.
    explicit DistanceTable(const Board& goal);

    const Board& goal() const noexcept { return goal_; }
    std::optional<int> distance(const Board& b) const noexcept;
    std::size_t size() const noexcept { return size_; }
    int max_distance() const noexcept { return max_distance_; }
    /// All reachable boards, in ascending (lexicographic) order.
    std::vector<Board> boards() const;
    /// Boards at exactly distance d, in ascending order.
    std::vector<Board> boards_at(int d) const;
    std::size_t count_at(int d) const noexcept;
    /// The i-th board (ascending order) at distance d.
    Board board_at(int d, std::size_t i) const;

    /// Binary cache: one record per board, 9 ASCII digits then one distance byte,
    /// sorted by board string.
    void save(const std::filesystem::path& path) const;
    static DistanceTable load(const std::filesystem::path& path);

private:
    DistanceTable() = default;
    void index_by_distance();

    Board goal_;
    std::vector<std::int8_t> by_rank_;  // indexed by lexicographic permutation rank; -1 = unreachable
    std::vector<std::vector<std::uint32_t>> ranks_by_distance_;
    std::size_t size_ = 0;
    int max_distance_ = 0;
};

/// Shared, lazily built table for the default goal.
const DistanceTable& default_distance_table();

/// Lexicographic rank of a board among all 9! permutations.
std::uint32_t permutation_rank(const Board& b) noexcept;
Board permutation_unrank(std::uint32_t rank) noexcept;

struct RandomStartOptions
{
    /// When set, the board is drawn uniformly from boards at exactly this optimal distance.
    std::optional<int> distance;
    /// Required when `distance` is set; must be built for `goal`.
    const DistanceTable* table = nullptr;
};

/// Uniformly random board in the goal's reachability class.
Board random_solvable(RngStream& rng, const RandomStartOptions& opts = {},
                      const Goal& goal = default_goal());

}  // namespace prefmcts::puzzle8

#endif  // PREFMCTS_PUZZLE8_HPP
