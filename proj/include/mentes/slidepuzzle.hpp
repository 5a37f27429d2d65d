#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/rng.hpp"

namespace mentes::slidepuzzle {

/// Motion of the blank tile.
enum class SlideMove { Up, Down, Left, Right };

inline constexpr std::array<SlideMove, 4> kMoveOrder = {SlideMove::Up, SlideMove::Down, SlideMove::Left, SlideMove::Right};

inline const char* to_string(SlideMove m) {
    switch (m) {
        case SlideMove::Up: return "up";
        case SlideMove::Down: return "down";
        case SlideMove::Left: return "left";
        case SlideMove::Right: return "right";
    }
    return "?";
}

inline std::optional<SlideMove> move_from_string(const std::string& s) {
    if (s == "up") return SlideMove::Up;
    if (s == "down") return SlideMove::Down;
    if (s == "left") return SlideMove::Left;
    if (s == "right") return SlideMove::Right;
    return std::nullopt;
}

inline SlideMove inverse(SlideMove m) {
    switch (m) {
        case SlideMove::Up: return SlideMove::Down;
        case SlideMove::Down: return SlideMove::Up;
        case SlideMove::Left: return SlideMove::Right;
        case SlideMove::Right: return SlideMove::Left;
    }
    return m;
}

inline std::string format_moves(const std::vector<SlideMove>& moves) {
    std::string out;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (i) out += ' ';
        out += to_string(moves[i]);
    }
    return out;
}

/// perm[cell] = original tile index; the tile `blank_tile` is drawn black.
struct Board {
    int n = 3;
    std::vector<int> perm;
    int blank = 0;  // cell currently holding the blank tile

    int blank_tile() const { return perm[static_cast<std::size_t>(blank)]; }

    bool solved() const {
        for (std::size_t i = 0; i < perm.size(); ++i)
            if (perm[i] != static_cast<int>(i)) return false;
        return true;
    }

    static Board identity(int n, int blank_cell) {
        Board b{n, std::vector<int>(static_cast<std::size_t>(n * n)), blank_cell};
        for (int i = 0; i < n * n; ++i) b.perm[static_cast<std::size_t>(i)] = i;
        return b;
    }

    bool operator==(const Board&) const = default;
};

inline void validate(const Board& b) {
    if (b.n < 2) fail(ErrorKind::InvalidState, "grid side must be at least 2");
    if (b.perm.size() != static_cast<std::size_t>(b.n * b.n)) fail(ErrorKind::InvalidState, "perm has the wrong size");
    std::vector<bool> seen(b.perm.size(), false);
    for (int t : b.perm) {
        if (t < 0 || t >= b.n * b.n || seen[static_cast<std::size_t>(t)]) fail(ErrorKind::InvalidState, "perm is not a permutation");
        seen[static_cast<std::size_t>(t)] = true;
    }
    if (b.blank < 0 || b.blank >= b.n * b.n) fail(ErrorKind::InvalidState, "blank cell out of range");
}

/// Target cell of the blank, or nullopt when the move leaves the grid.
inline std::optional<int> target_cell(const Board& b, SlideMove m) {
    const int r = b.blank / b.n, c = b.blank % b.n;
    switch (m) {
        case SlideMove::Up: return r > 0 ? std::optional(b.blank - b.n) : std::nullopt;
        case SlideMove::Down: return r + 1 < b.n ? std::optional(b.blank + b.n) : std::nullopt;
        case SlideMove::Left: return c > 0 ? std::optional(b.blank - 1) : std::nullopt;
        case SlideMove::Right: return c + 1 < b.n ? std::optional(b.blank + 1) : std::nullopt;
    }
    return std::nullopt;
}

inline Board apply(const Board& b, SlideMove m) {
    const auto t = target_cell(b, m);
    if (!t) fail(ErrorKind::InvalidMove, std::string("blank cannot move ") + to_string(m));
    Board out = b;
    std::swap(out.perm[static_cast<std::size_t>(out.blank)], out.perm[static_cast<std::size_t>(*t)]);
    out.blank = *t;
    return out;
}

namespace detail {

inline std::uint64_t encode(const Board& b) {
    // 4 bits per cell: fine up to 4x4; larger boards go through IDA*.
    std::uint64_t key = 0;
    for (int t : b.perm) key = (key << 4) | static_cast<std::uint64_t>(t);
    return key;
}

struct Parent {
    std::uint64_t prev;
    SlideMove move;  // move applied to `prev` (in search direction)
};

inline std::vector<SlideMove> bidirectional_bfs(const Board& start) {
    if (start.solved()) return {};
    const Board goal = Board::identity(start.n, start.blank_tile());
    std::unordered_map<std::uint64_t, Parent> fwd_parent, bwd_parent;
    const auto ks = encode(start), kg = encode(goal);
    fwd_parent.emplace(ks, Parent{ks, SlideMove::Up});
    bwd_parent.emplace(kg, Parent{kg, SlideMove::Up});
    std::vector<Board> fwd_frontier{start}, bwd_frontier{goal};

    auto rebuild = [&](std::uint64_t meet) {
        std::vector<SlideMove> head, tail;
        for (auto k = meet; k != ks;) {
            const auto& p = fwd_parent.at(k);
            head.push_back(p.move);
            k = p.prev;
        }
        std::reverse(head.begin(), head.end());
        for (auto k = meet; k != kg;) {
            const auto& p = bwd_parent.at(k);
            tail.push_back(inverse(p.move));
            k = p.prev;
        }
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };

    while (!fwd_frontier.empty() && !bwd_frontier.empty()) {
        const bool forward = fwd_frontier.size() <= bwd_frontier.size();
        auto& frontier = forward ? fwd_frontier : bwd_frontier;
        auto& mine = forward ? fwd_parent : bwd_parent;
        auto& theirs = forward ? bwd_parent : fwd_parent;
        std::vector<Board> next;
        std::optional<std::vector<SlideMove>> best;
        for (const auto& b : frontier) {
            const auto kb = encode(b);
            for (auto m : kMoveOrder) {
                if (!target_cell(b, m)) continue;
                Board nb = apply(b, m);
                const auto kn = encode(nb);
                if (mine.contains(kn)) continue;
                mine.emplace(kn, Parent{kb, m});
                if (theirs.contains(kn)) {
                    auto path = rebuild(kn);
                    // Finish the layer so the pick does not depend on hash order.
                    if (!best || path.size() < best->size() || (path.size() == best->size() && path < *best)) best = std::move(path);
                    continue;
                }
                next.push_back(std::move(nb));
            }
        }
        if (best) return *best;
        frontier = std::move(next);
    }
    fail(ErrorKind::Unsolvable, "board is not reachable from the solved state");
}

inline int manhattan(const Board& b) {
    int h = 0;
    const int blank_tile = b.blank_tile();
    for (int cell = 0; cell < b.n * b.n; ++cell) {
        const int t = b.perm[static_cast<std::size_t>(cell)];
        if (t == blank_tile) continue;
        h += std::abs(cell / b.n - t / b.n) + std::abs(cell % b.n - t % b.n);
    }
    return h;
}

inline std::vector<SlideMove> ida_star(const Board& start) {
    Board b = start;
    std::vector<SlideMove> path;
    int bound = manhattan(b);
    constexpr int kFound = -1;
    std::function<int(int, std::optional<SlideMove>)> search = [&](int g, std::optional<SlideMove> last) -> int {
        const int f = g + manhattan(b);
        if (f > bound) return f;
        if (b.solved()) return kFound;
        int min_next = std::numeric_limits<int>::max();
        for (auto m : kMoveOrder) {
            if (last && inverse(*last) == m) continue;
            if (!target_cell(b, m)) continue;
            const Board saved = b;
            b = apply(b, m);
            path.push_back(m);
            const int t = search(g + 1, m);
            if (t == kFound) return kFound;
            min_next = std::min(min_next, t);
            path.pop_back();
            b = saved;
        }
        return min_next;
    };
    while (true) {
        const int t = search(0, std::nullopt);
        if (t == kFound) return path;
        if (t == std::numeric_limits<int>::max()) fail(ErrorKind::Unsolvable, "board is not solvable");
        bound = t;
    }
}

}  // namespace detail

/// Shortest move sequence back to the identity permutation.
inline std::vector<SlideMove> solve(const Board& board) {
    validate(board);
    if (board.n <= 3) return detail::bidirectional_bfs(board);
    return detail::ida_star(board);
}

// ---------------------------------------------------------------------------
// Generation

struct Generated {
    Board board;
    std::vector<SlideMove> solution;
    std::size_t attempts = 0;
};

struct GeneratorParams {
    int n = 3;
    std::size_t attempts = 10'000;
};

/// Scramble by random non-backtracking moves until the optimal length is `level`.
inline Generated generate(int level, std::uint64_t seed, const GeneratorParams& params = {}) {
    if (level < 1 || level > 5) fail(ErrorKind::GenerationFailed, "sliding puzzle level must be in 1..5");
    Rng rng(splitmix64(seed ^ 0x534c494445ULL));
    const int cells = params.n * params.n;
    for (std::size_t attempt = 1; attempt <= params.attempts; ++attempt) {
        Board b = Board::identity(params.n, static_cast<int>(rng.integer(0, cells - 1)));
        std::optional<SlideMove> last;
        for (int step = 0; step < level; ++step) {
            std::vector<SlideMove> options;
            for (auto m : kMoveOrder)
                if (target_cell(b, m) && !(last && inverse(*last) == m)) options.push_back(m);
            const auto m = options[rng.index(options.size())];
            b = apply(b, m);
            last = m;
        }
        auto sol = solve(b);
        if (static_cast<int>(sol.size()) != level) continue;
        return {std::move(b), std::move(sol), attempt};
    }
    fail(ErrorKind::GenerationFailed, "sliding puzzle generator exhausted its attempt budget");
}

}  // namespace mentes::slidepuzzle
