#include "prefmcts/puzzle8.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace prefmcts::puzzle8 {

namespace {

constexpr std::array<std::uint32_t, kCells + 1> kFactorial{1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880};

bool tile_parity(const Board& b) noexcept
{
    int inversions = 0;
    for (int i = 0; i < kCells; ++i) {
        if (b[i] == 0)
            continue;
        for (int j = i + 1; j < kCells; ++j)
            if (b[j] != 0 && b[j] < b[i])
                ++inversions;
    }
    return (inversions & 1) != 0;
}

// Inverted pairs among `tiles` (in line order) whose goal positions along the line are `target`.
int inverted_pairs(const std::array<int, kSide>& target, int count) noexcept
{
    int pairs = 0;
    for (int a = 0; a < count; ++a)
        for (int b = a + 1; b < count; ++b)
            if (target[a] > target[b])
                ++pairs;
    return pairs;
}

// Fewest tiles that must leave the line so the rest are in goal order:
// count minus the longest increasing run of targets (lines hold at most three tiles).
int tiles_to_remove(const std::array<int, kSide>& target, int count) noexcept
{
    std::array<int, kSide> longest{};
    int best = 0;
    for (int a = 0; a < count; ++a) {
        longest[a] = 1;
        for (int b = 0; b < a; ++b)
            if (target[b] < target[a])
                longest[a] = std::max(longest[a], longest[b] + 1);
        best = std::max(best, longest[a]);
    }
    return count - best;
}

template <class PerLine>
int sum_over_lines(const Board& b, const Goal& goal, PerLine per_line) noexcept
{
    int total = 0;
    std::array<int, kSide> target{};
    for (int line = 0; line < kSide; ++line) {
        // Row `line`: tiles whose goal row is this row, ordered by current column.
        int n = 0;
        for (int c = 0; c < kSide; ++c) {
            const int v = b[line * kSide + c];
            if (v != 0 && goal.row(v) == line)
                target[n++] = goal.col(v);
        }
        total += per_line(target, n);

        n = 0;
        for (int r = 0; r < kSide; ++r) {
            const int v = b[r * kSide + line];
            if (v != 0 && goal.col(v) == line)
                target[n++] = goal.row(v);
        }
        total += per_line(target, n);
    }
    return total;
}

}  // namespace

Move inverse(Move m) noexcept
{
    switch (m) {
    case Move::up: return Move::down;
    case Move::down: return Move::up;
    case Move::left: return Move::right;
    case Move::right: return Move::left;
    }
    return m;
}

std::string_view to_string(Move m) noexcept
{
    switch (m) {
    case Move::up: return "up";
    case Move::down: return "down";
    case Move::left: return "left";
    case Move::right: return "right";
    }
    return "?";
}

Board::Board() noexcept : cells_{1, 2, 3, 4, 5, 6, 7, 8, 0}, blank_(8) {}

Board::Board(const Cells& cells) : cells_(cells), blank_(0)
{
    std::array<bool, kCells> seen{};
    for (int i = 0; i < kCells; ++i) {
        const auto v = cells[i];
        if (v >= kCells)
            throw MalformedBoard("cell value out of range: " + std::to_string(v));
        if (seen[v])
            throw MalformedBoard("duplicate cell value: " + std::to_string(v));
        seen[v] = true;
        if (v == 0)
            blank_ = static_cast<std::uint8_t>(i);
    }
}

Goal::Goal(const Board& board) noexcept : board_(board)
{
    for (int i = 0; i < kCells; ++i) {
        row_[board[i]] = static_cast<std::int8_t>(i / kSide);
        col_[board[i]] = static_cast<std::int8_t>(i % kSide);
    }
}

const Goal& default_goal() noexcept
{
    static const Goal goal;
    return goal;
}

MoveList legal_moves(const Board& b) noexcept
{
    MoveList list;
    const int r = b.blank() / kSide;
    const int c = b.blank() % kSide;
    if (r > 0)
        list.push(Move::up);
    if (r < kSide - 1)
        list.push(Move::down);
    if (c > 0)
        list.push(Move::left);
    if (c < kSide - 1)
        list.push(Move::right);
    return list;
}

Board apply_legal_move(const Board& b, Move m) noexcept
{
    static constexpr std::array<int, 4> kOffset{-kSide, kSide, -1, 1};
    const int from = b.blank();
    const int to = from + kOffset[static_cast<int>(m)];
    Board::Cells cells = b.cells();
    cells[from] = cells[to];
    cells[to] = 0;
    return Board(cells, to, Board::Trusted{});
}

Board apply_move(const Board& b, Move m)
{
    const auto legal = legal_moves(b);
    if (std::find(legal.begin(), legal.end(), m) == legal.end())
        throw IllegalMove("illegal move '" + std::string(to_string(m)) + "' on board " + format_board(b));
    return apply_legal_move(b, m);
}

bool is_goal(const Board& b, const Goal& goal) noexcept { return b == goal.board(); }

int manhattan(const Board& b, const Goal& goal) noexcept
{
    int sum = 0;
    for (int i = 0; i < kCells; ++i) {
        const int v = b[i];
        if (v == 0)
            continue;
        sum += std::abs(i / kSide - goal.row(v)) + std::abs(i % kSide - goal.col(v));
    }
    return sum;
}

int linear_conflicts(const Board& b, const Goal& goal) noexcept
{
    return sum_over_lines(b, goal, inverted_pairs);
}

int conflict_removals(const Board& b, const Goal& goal) noexcept
{
    return sum_over_lines(b, goal, tiles_to_remove);
}

int mdc(const Board& b, const Goal& goal) noexcept
{
    return manhattan(b, goal) + 2 * conflict_removals(b, goal);
}

bool is_solvable(const Board& b, const Goal& goal) noexcept
{
    // On an odd-width board, moves never change the tile inversion parity.
    return tile_parity(b) == tile_parity(goal.board());
}

double heuristic_value(const Board& b, const Goal& goal) noexcept
{
    if (is_goal(b, goal))
        return 1.0;
    const int h = std::min(mdc(b, goal), kHeuristicCap);
    return 1.0 - static_cast<double>(h) / (kHeuristicCap + 1);
}

OrdinalKey ordinal_key(const Board& b, const Goal& goal) noexcept
{
    if (is_goal(b, goal))
        return OrdinalKey::goal_key();
    return OrdinalKey::non_goal(static_cast<double>(mdc(b, goal)));
}

Board parse_board(std::string_view text)
{
    if (text.size() != kCells)
        throw MalformedBoard("board must have 9 digits, got " + std::to_string(text.size()) + " characters");
    Board::Cells cells{};
    for (int i = 0; i < kCells; ++i) {
        const char ch = text[i];
        if (ch < '0' || ch > '8')
            throw MalformedBoard(std::string("invalid board character '") + ch + "'");
        cells[i] = static_cast<std::uint8_t>(ch - '0');
    }
    return Board(cells);
}

std::string format_board(const Board& b)
{
    std::string s(kCells, '0');
    for (int i = 0; i < kCells; ++i)
        s[i] = static_cast<char>('0' + b[i]);
    return s;
}

std::uint32_t permutation_rank(const Board& b) noexcept
{
    std::uint32_t rank = 0;
    for (int i = 0; i < kCells; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < kCells; ++j)
            if (b[j] < b[i])
                ++smaller;
        rank += smaller * kFactorial[kCells - 1 - i];
    }
    return rank;
}

Board permutation_unrank(std::uint32_t rank) noexcept
{
    std::array<std::uint8_t, kCells> pool{0, 1, 2, 3, 4, 5, 6, 7, 8};
    int pool_size = kCells;
    Board::Cells cells{};
    for (int i = 0; i < kCells; ++i) {
        const std::uint32_t f = kFactorial[kCells - 1 - i];
        const auto k = static_cast<int>(rank / f);
        rank %= f;
        cells[i] = pool[k];
        std::copy(pool.begin() + k + 1, pool.begin() + pool_size, pool.begin() + k);
        --pool_size;
    }
    return Board(cells);
}

DistanceTable::DistanceTable(const Board& goal) : goal_(goal), by_rank_(kFactorial[kCells], -1)
{
    std::vector<Board> frontier{goal};
    by_rank_[permutation_rank(goal)] = 0;
    size_ = 1;
    int depth = 0;
    while (!frontier.empty()) {
        std::vector<Board> next;
        for (const Board& b : frontier) {
            for (Move m : legal_moves(b)) {
                const Board n = apply_legal_move(b, m);
                auto& slot = by_rank_[permutation_rank(n)];
                if (slot < 0) {
                    slot = static_cast<std::int8_t>(depth + 1);
                    next.push_back(n);
                }
            }
        }
        if (!next.empty())
            ++depth;
        size_ += next.size();
        frontier = std::move(next);
    }
    max_distance_ = depth;
    index_by_distance();
}

std::optional<int> DistanceTable::distance(const Board& b) const noexcept
{
    const auto d = by_rank_[permutation_rank(b)];
    if (d < 0)
        return std::nullopt;
    return d;
}

std::vector<Board> DistanceTable::boards() const
{
    std::vector<Board> out;
    out.reserve(size_);
    for (std::uint32_t r = 0; r < by_rank_.size(); ++r)
        if (by_rank_[r] >= 0)
            out.push_back(permutation_unrank(r));
    return out;
}

std::vector<Board> DistanceTable::boards_at(int d) const
{
    std::vector<Board> out;
    for (std::size_t i = 0; i < count_at(d); ++i)
        out.push_back(board_at(d, i));
    return out;
}

std::size_t DistanceTable::count_at(int d) const noexcept
{
    if (d < 0 || d >= static_cast<int>(ranks_by_distance_.size()))
        return 0;
    return ranks_by_distance_[d].size();
}

Board DistanceTable::board_at(int d, std::size_t i) const
{
    return permutation_unrank(ranks_by_distance_.at(d).at(i));
}

void DistanceTable::index_by_distance()
{
    ranks_by_distance_.assign(max_distance_ + 1, {});
    for (std::uint32_t r = 0; r < by_rank_.size(); ++r)
        if (by_rank_[r] >= 0)
            ranks_by_distance_[by_rank_[r]].push_back(r);
}

void DistanceTable::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::uint32_t r = 0; r < by_rank_.size(); ++r) {
        if (by_rank_[r] < 0)
            continue;
        const std::string s = format_board(permutation_unrank(r));
        out.write(s.data(), kCells);
        out.put(static_cast<char>(by_rank_[r]));
    }
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

DistanceTable DistanceTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    DistanceTable table;
    table.by_rank_.assign(kFactorial[kCells], -1);
    std::array<char, kCells + 1> record{};
    bool have_goal = false;
    while (in.read(record.data(), record.size())) {
        const Board b = parse_board(std::string_view(record.data(), kCells));
        const auto d = static_cast<std::int8_t>(record[kCells]);
        if (d < 0 || d > kDiameter)
            throw std::runtime_error("corrupt distance byte in " + path.string());
        table.by_rank_[permutation_rank(b)] = d;
        ++table.size_;
        table.max_distance_ = std::max<int>(table.max_distance_, d);
        if (d == 0) {
            table.goal_ = b;
            have_goal = true;
        }
    }
    if (in.gcount() != 0 || !have_goal)
        throw std::runtime_error("truncated or goal-less distance table " + path.string());
    table.index_by_distance();
    return table;
}

const DistanceTable& default_distance_table()
{
    static const DistanceTable table(default_goal().board());
    return table;
}

Board random_solvable(RngStream& rng, const RandomStartOptions& opts, const Goal& goal)
{
    if (opts.distance) {
        const int d = *opts.distance;
        if (opts.table == nullptr)
            throw std::invalid_argument("a distance table is required to draw a board at a fixed distance");
        if (opts.table->goal() != goal.board())
            throw std::invalid_argument("distance table was built for a different goal");
        if (d < 0 || d > opts.table->max_distance())
            throw UnreachableDistance("no board at optimal distance " + std::to_string(d));
        const std::size_t n = opts.table->count_at(d);
        if (n == 0)
            throw UnreachableDistance("no board at optimal distance " + std::to_string(d));
        return opts.table->board_at(d, rng.index(n));
    }

    Board::Cells cells{0, 1, 2, 3, 4, 5, 6, 7, 8};
    for (int i = kCells - 1; i > 0; --i)
        std::swap(cells[i], cells[rng.index(static_cast<std::size_t>(i) + 1)]);
    Board b(cells);
    if (!is_solvable(b, goal)) {
        // Swapping the first two tiles is a bijection between the two parity classes.
        int first = cells[0] == 0 ? 1 : 0;
        int second = first + 1;
        if (cells[second] == 0)
            ++second;
        std::swap(cells[first], cells[second]);
        b = Board(cells);
    }
    return b;
}

}  // namespace prefmcts::puzzle8
