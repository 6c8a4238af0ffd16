#pragma once

#include <npsp/error.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace npsp {

    enum class CellKind : std::uint8_t { Empty, Wall, Goal, Button, Door };

    enum class Heading : std::uint8_t { N, E, S, W };

    /// Output-neuron order is part of the external contract.
    enum class Action : std::uint8_t { Stop, Left, Right, Straight, Press };
    inline constexpr std::size_t kNumActions = 5;

    struct Cell {
        int x = 0; // column
        int y = 0; // row
        friend constexpr bool operator==(Cell, Cell) = default;
        friend constexpr auto operator<=>(Cell, Cell) = default;
    };

    constexpr Cell offset(Heading h)
    {
        switch (h) {
        case Heading::N: return {0, -1};
        case Heading::E: return {1, 0};
        case Heading::S: return {0, 1};
        case Heading::W: return {-1, 0};
        }
        return {0, 0};
    }

    constexpr Cell neighbor(Cell c, Heading h)
    {
        auto d = offset(h);
        return {c.x + d.x, c.y + d.y};
    }

    constexpr Heading turn_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
    constexpr Heading turn_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }

    inline char heading_char(Heading h) { return "NESW"[static_cast<int>(h)]; }

    inline Heading parse_heading(std::string_view s)
    {
        if (s == "N") return Heading::N;
        if (s == "E") return Heading::E;
        if (s == "S") return Heading::S;
        if (s == "W") return Heading::W;
        throw ParseError("invalid heading '" + std::string(s) + "' (expected N, E, S or W)");
    }

    struct StartPosition {
        Cell cell;
        Heading heading = Heading::E;
    };

    /// Static grid of a maze. Immutable after construction; start cells are stored
    /// as Empty and listed separately.
    class MazeMap {
    public:
        MazeMap() = default;

        MazeMap(std::string name, int width, int height, std::vector<CellKind> grid, std::vector<StartPosition> starts)
            : _name(std::move(name)), _width(width), _height(height), _grid(std::move(grid)), _starts(std::move(starts))
        {
            if (_width <= 0 || _height <= 0 || _grid.size() != static_cast<std::size_t>(_width) * _height)
                throw ValidationError("grid size does not match width x height");
            for (int y = 0; y < _height; ++y)
                for (int x = 0; x < _width; ++x) {
                    switch (kind({x, y})) {
                    case CellKind::Door: _doors.push_back({x, y}); break;
                    case CellKind::Goal: _goals.push_back({x, y}); break;
                    case CellKind::Button: _buttons.push_back({x, y}); break;
                    default: break;
                    }
                }
        }

        const std::string& name() const { return _name; }
        int width() const { return _width; }
        int height() const { return _height; }
        std::size_t cell_count() const { return _grid.size(); }

        bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < _width && c.y < _height; }
        std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * _width + c.x; }
        CellKind kind(Cell c) const { return _grid[index(c)]; }

        /// Walls always block; doors block while closed. Out-of-bounds blocks.
        bool blocking(Cell c, bool door_open) const
        {
            if (!in_bounds(c))
                return true;
            auto k = kind(c);
            return k == CellKind::Wall || (k == CellKind::Door && !door_open);
        }

        const std::vector<StartPosition>& starts() const { return _starts; }
        const std::vector<Cell>& door_cells() const { return _doors; }
        const std::vector<Cell>& goal_cells() const { return _goals; }
        const std::vector<Cell>& button_cells() const { return _buttons; }

        /// Canonical map document: the inverse of load_map for canonical input.
        std::string serialize() const
        {
            std::string out = "name: " + _name + "\n";
            for (std::size_t i = 0; i < _starts.size(); ++i)
                out += "heading" + std::to_string(i + 1) + ": " + heading_char(_starts[i].heading) + "\n";
            out += "\n";
            std::string rows(_grid.size() + _height, '\n');
            for (int y = 0; y < _height; ++y)
                for (int x = 0; x < _width; ++x)
                    rows[static_cast<std::size_t>(y) * (_width + 1) + x] = cell_char(kind({x, y}));
            for (std::size_t i = 0; i < _starts.size(); ++i) {
                auto c = _starts[i].cell;
                rows[static_cast<std::size_t>(c.y) * (_width + 1) + c.x] = static_cast<char>('1' + i);
            }
            return out + rows;
        }

        static char cell_char(CellKind k)
        {
            switch (k) {
            case CellKind::Empty: return '.';
            case CellKind::Wall: return '#';
            case CellKind::Goal: return 'G';
            case CellKind::Button: return 'B';
            case CellKind::Door: return 'D';
            }
            return '?';
        }

    private:
        std::string _name;
        int _width = 0;
        int _height = 0;
        std::vector<CellKind> _grid;
        std::vector<StartPosition> _starts;
        std::vector<Cell> _doors;
        std::vector<Cell> _goals;
        std::vector<Cell> _buttons;
    };

    /// BFS distances to the nearest goal cell on the door-open map.
    struct DistanceField {
        static constexpr int kUnreachable = -1;

        int width = 0;
        int height = 0;
        std::vector<int> dist;
        /// Minimum distance over door cells; max_dist + 1 when the map has no door,
        /// which makes the whole reachable map count as the goal room.
        int door_distance = 0;
        int max_dist = 0;
        /// Largest distance strictly below door_distance.
        int max_dist_second_room = 0;

        int at(Cell c) const { return dist[static_cast<std::size_t>(c.y) * width + c.x]; }
        bool reachable(Cell c) const { return at(c) != kUnreachable; }

        std::string to_csv() const
        {
            std::string out;
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    if (x)
                        out += ',';
                    out += std::to_string(at({x, y}));
                }
                out += '\n';
            }
            return out;
        }
    };

    inline DistanceField compute_distance_field(const MazeMap& map)
    {
        DistanceField f;
        f.width = map.width();
        f.height = map.height();
        f.dist.assign(map.cell_count(), DistanceField::kUnreachable);

        std::deque<Cell> queue;
        for (auto g : map.goal_cells()) {
            f.dist[map.index(g)] = 0;
            queue.push_back(g);
        }
        while (!queue.empty()) {
            auto c = queue.front();
            queue.pop_front();
            int d = f.dist[map.index(c)];
            for (auto h : {Heading::N, Heading::E, Heading::S, Heading::W}) {
                auto n = neighbor(c, h);
                if (map.blocking(n, true) || f.dist[map.index(n)] != DistanceField::kUnreachable)
                    continue;
                f.dist[map.index(n)] = d + 1;
                queue.push_back(n);
            }
        }

        for (std::size_t i = 0; i < map.starts().size(); ++i)
            if (!f.reachable(map.starts()[i].cell))
                throw ValidationError("map '" + map.name() + "': goal unreachable from start " + std::to_string(i + 1));

        f.max_dist = *std::max_element(f.dist.begin(), f.dist.end());
        if (map.door_cells().empty()) {
            f.door_distance = f.max_dist + 1;
        }
        else {
            f.door_distance = f.max_dist + 1;
            for (auto d : map.door_cells())
                if (f.reachable(d))
                    f.door_distance = std::min(f.door_distance, f.at(d));
        }
        f.max_dist_second_room = 0;
        for (int d : f.dist)
            if (d != DistanceField::kUnreachable && d < f.door_distance)
                f.max_dist_second_room = std::max(f.max_dist_second_room, d);
        return f;
    }

    /// Parses and validates a map document:
    ///
    ///     name: DM1
    ///     heading1: E
    ///
    ///     #####
    ///     #1.G#
    ///     #####
    inline MazeMap load_map(std::string_view doc)
    {
        std::vector<std::string> lines;
        {
            std::string cur;
            for (char c : doc) {
                if (c == '\n') {
                    lines.push_back(std::move(cur));
                    cur.clear();
                }
                else
                    cur += c;
            }
            if (!cur.empty())
                lines.push_back(std::move(cur));
        }

        std::string name;
        bool have_name = false;
        std::map<int, Heading> headings;
        std::size_t li = 0;
        for (; li < lines.size() && !lines[li].empty(); ++li) {
            const auto& line = lines[li];
            auto colon = line.find(':');
            if (colon == std::string::npos)
                throw ParseError("header line " + std::to_string(li + 1) + ": missing ':'");
            std::string key = line.substr(0, colon);
            std::string value = line.substr(colon + 1);
            value.erase(0, value.find_first_not_of(' '));
            while (!value.empty() && value.back() == ' ')
                value.pop_back();
            if (key == "name") {
                name = value;
                have_name = true;
            }
            else if (key.rfind("heading", 0) == 0 && key.size() == 8 && key[7] >= '1' && key[7] <= '9') {
                headings[key[7] - '0'] = parse_heading(value);
            }
            else
                throw ParseError("header line " + std::to_string(li + 1) + ": unknown key '" + key + "'");
        }
        if (!have_name)
            throw ParseError("map header lacks 'name:'");
        if (li >= lines.size())
            throw ParseError("map document has no grid");
        ++li; // blank separator

        std::vector<std::string> rows(lines.begin() + static_cast<std::ptrdiff_t>(li), lines.end());
        if (rows.empty())
            throw ParseError("map document has no grid");
        const int width = static_cast<int>(rows.front().size());
        const int height = static_cast<int>(rows.size());
        if (width == 0)
            throw ParseError("empty grid row");

        std::vector<CellKind> grid;
        grid.reserve(static_cast<std::size_t>(width) * height);
        std::map<int, Cell> start_cells;
        for (int y = 0; y < height; ++y) {
            if (static_cast<int>(rows[y].size()) != width)
                throw ParseError("ragged grid: row " + std::to_string(y + 1) + " has " + std::to_string(rows[y].size()) + " cells, expected " + std::to_string(width));
            for (int x = 0; x < width; ++x) {
                char c = rows[y][x];
                switch (c) {
                case '#': grid.push_back(CellKind::Wall); break;
                case '.': grid.push_back(CellKind::Empty); break;
                case 'G': grid.push_back(CellKind::Goal); break;
                case 'B': grid.push_back(CellKind::Button); break;
                case 'D': grid.push_back(CellKind::Door); break;
                default:
                    if (c >= '1' && c <= '9') {
                        if (start_cells.count(c - '0'))
                            throw ParseError(std::string("start '") + c + "' appears twice");
                        start_cells[c - '0'] = {x, y};
                        grid.push_back(CellKind::Empty);
                    }
                    else
                        throw ParseError(std::string("bad grid character '") + c + "' at row " + std::to_string(y + 1) + ", column " + std::to_string(x + 1));
                }
            }
        }

        std::vector<StartPosition> starts;
        for (auto [id, cell] : start_cells) {
            if (id != static_cast<int>(starts.size()) + 1)
                throw ValidationError("start ids must be contiguous from 1");
            auto h = headings.count(id) ? headings[id] : Heading::E;
            starts.push_back({cell, h});
        }
        for (auto [id, h] : headings)
            if (!start_cells.count(id))
                throw ValidationError("heading" + std::to_string(id) + " given for a start that is not on the grid");

        MazeMap map(name, width, height, std::move(grid), std::move(starts));

        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                bool border = x == 0 || y == 0 || x == width - 1 || y == height - 1;
                if (!border)
                    continue;
                for (std::size_t i = 0; i < map.starts().size(); ++i)
                    if (map.starts()[i].cell == Cell{x, y})
                        throw ValidationError("start " + std::to_string(i + 1) + " lies on the boundary wall");
                if (map.kind({x, y}) != CellKind::Wall)
                    throw ValidationError("boundary cell (" + std::to_string(x) + "," + std::to_string(y) + ") is not a wall");
            }
        if (map.goal_cells().empty())
            throw ValidationError("map has no goal cell");
        if (map.button_cells().empty())
            throw ValidationError("map has no button cell");
        if (map.starts().empty())
            throw ValidationError("map has no start position");

        compute_distance_field(map); // throws if a start cannot reach a goal
        return map;
    }

    inline MazeMap load_map_file(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ParseError("cannot open map file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return load_map(ss.str());
    }

    struct SensorReading {
        std::uint8_t left = 0;
        std::uint8_t front = 0;
        std::uint8_t right = 0;
        friend bool operator==(const SensorReading&, const SensorReading&) = default;
    };

    /// Mutable episode state; references an immutable map.
    struct EnvState {
        const MazeMap* map = nullptr;
        Cell pos;
        Heading heading = Heading::E;
        bool door_open = false;
        int step_count = 0;
    };

    inline EnvState reset_env(const MazeMap& map, const StartPosition& start)
    {
        return EnvState{&map, start.cell, start.heading, false, 0};
    }

    inline SensorReading sense(const EnvState& s)
    {
        auto free = [&](Heading h) -> std::uint8_t { return s.map->blocking(neighbor(s.pos, h), s.door_open) ? 0 : 1; };
        return {free(turn_left(s.heading)), free(s.heading), free(turn_right(s.heading))};
    }

    inline EnvState step(EnvState s, Action a)
    {
        switch (a) {
        case Action::Stop: break;
        case Action::Left: s.heading = turn_left(s.heading); break;
        case Action::Right: s.heading = turn_right(s.heading); break;
        case Action::Straight: {
            auto target = neighbor(s.pos, s.heading);
            if (!s.map->blocking(target, s.door_open))
                s.pos = target;
            break;
        }
        case Action::Press:
            if (!s.door_open && s.map->kind(s.pos) == CellKind::Button)
                s.door_open = true;
            break;
        }
        ++s.step_count;
        return s;
    }

    inline bool reached_goal(const EnvState& s) { return s.map->kind(s.pos) == CellKind::Goal; }

    /// Cells reachable from the map's starts with the door closed.
    inline std::vector<Cell> first_room_cells(const MazeMap& map)
    {
        std::vector<char> seen(map.cell_count(), 0);
        std::deque<Cell> queue;
        for (const auto& s : map.starts()) {
            if (!seen[map.index(s.cell)]) {
                seen[map.index(s.cell)] = 1;
                queue.push_back(s.cell);
            }
        }
        while (!queue.empty()) {
            auto c = queue.front();
            queue.pop_front();
            for (auto h : {Heading::N, Heading::E, Heading::S, Heading::W}) {
                auto n = neighbor(c, h);
                if (map.blocking(n, false) || seen[map.index(n)])
                    continue;
                seen[map.index(n)] = 1;
                queue.push_back(n);
            }
        }
        std::vector<Cell> cells;
        for (int y = 0; y < map.height(); ++y)
            for (int x = 0; x < map.width(); ++x)
                if (seen[map.index({x, y})])
                    cells.push_back({x, y});
        return cells;
    }

    /// A map bundled with its distance field.
    struct Environment {
        MazeMap map;
        DistanceField field;

        explicit Environment(MazeMap m) : map(std::move(m)), field(compute_distance_field(map)) {}
    };

} // namespace npsp
