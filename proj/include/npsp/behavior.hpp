#pragma once

#include <npsp/error.hpp>
#include <npsp/maze.hpp>

#include <cmath>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace npsp {

    /// Splits a map into 3x3-cell squares numbered row-major from the top-left,
    /// starting at 1. Squares on the right and bottom edges may be smaller.
    struct RegionPartition {
        static constexpr int kSquare = 3;

        int width = 0;
        int height = 0;

        RegionPartition() = default;
        RegionPartition(int w, int h) : width(w), height(h) {}
        explicit RegionPartition(const MazeMap& map) : width(map.width()), height(map.height()) {}

        int columns() const { return (width + kSquare - 1) / kSquare; }
        int rows() const { return (height + kSquare - 1) / kSquare; }
        int region_count() const { return columns() * rows(); }

        int region_of(Cell c) const
        {
            if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height)
                throw ContractViolation("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is outside the map");
            return (c.y / kSquare) * columns() + (c.x / kSquare) + 1;
        }
    };

    struct BehaviorToken {
        int region = 0;
        bool press = false;
        friend bool operator==(BehaviorToken, BehaviorToken) = default;
    };

    /// Sequence of visited squares with `k*` marking a press in square k. Consecutive
    /// duplicates are dropped.
    class BehaviorString {
    public:
        void enter(int region) { append({region, false}); }
        void press(int region) { append({region, true}); }

        void append(BehaviorToken t)
        {
            if (!_tokens.empty() && _tokens.back() == t)
                return;
            _tokens.push_back(t);
        }

        const std::vector<BehaviorToken>& tokens() const { return _tokens; }
        std::size_t size() const { return _tokens.size(); }

        std::string str() const
        {
            std::string out;
            for (std::size_t i = 0; i < _tokens.size(); ++i) {
                if (i)
                    out += '-';
                out += std::to_string(_tokens[i].region);
                if (_tokens[i].press)
                    out += '*';
            }
            return out;
        }

    private:
        std::vector<BehaviorToken> _tokens;
    };

    /// Distinct behaviors divided by the episode budget.
    inline double novelty_score(std::span<const std::string> behaviors, int n_episodes)
    {
        if (n_episodes <= 0)
            throw ContractViolation("novelty needs a positive episode count");
        std::unordered_set<std::string_view> unique(behaviors.begin(), behaviors.end());
        return static_cast<double>(unique.size()) / static_cast<double>(n_episodes);
    }

    /// Two-regime distance score in [0, 2]. Not reaching the goal room maps to
    /// [1 + door/max, 2]; inside the goal room the score stays strictly below 1 and
    /// is 0 on the goal.
    inline double distance_measure(int trial_min_distance, const DistanceField& field)
    {
        if (trial_min_distance < 0)
            throw ContractViolation("trial minimum distance must be finite");
        if (trial_min_distance >= field.door_distance)
            return 1.0 + static_cast<double>(trial_min_distance) / static_cast<double>(field.max_dist);
        // One past the farthest goal-room distance, so the farthest goal-room cell
        // still scores below 1.
        return static_cast<double>(trial_min_distance) / static_cast<double>(field.max_dist_second_room + 1);
    }

    inline bool entered_second_room(int trial_min_distance, const DistanceField& field)
    {
        return trial_min_distance < field.door_distance;
    }

} // namespace npsp
