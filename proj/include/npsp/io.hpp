#pragma once

#include <npsp/error.hpp>
#include <npsp/network.hpp>
#include <npsp/plasticity.hpp>
#include <npsp/trainer.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace npsp::io {

    /// Shortest text that reads back to the same double.
    inline std::string exact(double x)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    inline std::string fixed(double x, int digits = 6)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, x);
        return buf;
    }

    inline std::vector<std::string_view> split(std::string_view s, char sep)
    {
        std::vector<std::string_view> out;
        std::size_t pos = 0;
        while (true) {
            auto next = s.find(sep, pos);
            out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
            if (next == std::string_view::npos)
                return out;
            pos = next + 1;
        }
    }

    inline std::vector<std::string_view> split_ws(std::string_view s)
    {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
                ++i;
            auto j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r')
                ++j;
            if (j > i)
                out.push_back(s.substr(i, j - i));
            i = j;
        }
        return out;
    }

    inline double parse_double(std::string_view s)
    {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError("invalid number '" + std::string(s) + "'");
        return v;
    }

    inline long long parse_int(std::string_view s)
    {
        long long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError("invalid integer '" + std::string(s) + "'");
        return v;
    }

    inline std::string read_file(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ParseError("cannot open '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    inline void write_file(const std::string& path, std::string_view text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write '" + path + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out)
            throw std::runtime_error("write failed for '" + path + "'");
    }

    // Rule files --------------------------------------------------------------
    //
    //   line 1: x_1 ... x_16, each in {-1, 0, 1}
    //   line 2: eta theta [alpha_h] alpha_o

    inline std::string rule_table_text(const NpspRule& r)
    {
        std::string out;
        for (std::size_t i = 0; i < r.table.size(); ++i) {
            if (i)
                out += ' ';
            out += std::to_string(r.table[i]);
        }
        return out;
    }

    inline std::string rule_params_text(const NpspRule& r)
    {
        std::string out = exact(r.eta) + ' ' + exact(r.theta);
        if (r.has_alpha_h)
            out += ' ' + exact(r.alpha_h);
        return out + ' ' + exact(r.alpha_o);
    }

    inline std::string format_rule(const NpspRule& r) { return rule_table_text(r) + '\n' + rule_params_text(r) + '\n'; }

    /// Single-field form for CSV cells: the two rule-file lines joined by ';'.
    inline std::string format_rule_inline(const NpspRule& r) { return rule_table_text(r) + ';' + rule_params_text(r); }

    inline NpspRule parse_rule_lines(std::string_view table_line, std::string_view params_line)
    {
        NpspRule r;
        auto t = split_ws(table_line);
        if (t.size() != r.table.size())
            throw ParseError("rule table needs 16 entries, got " + std::to_string(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i) {
            auto v = parse_int(t[i]);
            if (v < -1 || v > 1)
                throw ParseError("rule entry " + std::to_string(i + 1) + " must be -1, 0 or 1");
            r.table[i] = static_cast<std::int8_t>(v);
        }
        auto p = split_ws(params_line);
        if (p.size() != 3 && p.size() != 4)
            throw ParseError("rule parameters must be 'eta theta [alpha_h] alpha_o'");
        std::vector<double> v;
        for (auto s : p) {
            double x = parse_double(s);
            if (!(x >= 0.0 && x <= 1.0))
                throw ParseError("rule parameter '" + std::string(s) + "' outside [0, 1]");
            v.push_back(x);
        }
        r.eta = v[0];
        r.theta = v[1];
        r.has_alpha_h = v.size() == 4;
        if (r.has_alpha_h)
            r.alpha_h = v[2];
        r.alpha_o = v.back();
        return r;
    }

    inline NpspRule parse_rule(std::string_view text)
    {
        std::vector<std::string_view> lines;
        for (auto l : split(text, '\n'))
            if (!split_ws(l).empty())
                lines.push_back(l);
        if (lines.size() != 2)
            throw ParseError("rule file must have exactly two non-empty lines");
        return parse_rule_lines(lines[0], lines[1]);
    }

    inline NpspRule parse_rule_inline(std::string_view text)
    {
        auto parts = split(text, ';');
        if (parts.size() != 2)
            throw ParseError("inline rule must be '<table>;<params>'");
        return parse_rule_lines(parts[0], parts[1]);
    }

    inline NpspRule load_rule_file(const std::string& path) { return parse_rule(read_file(path)); }

    // Weight snapshots ---------------------------------------------------------
    //
    //   topology,<hidden>,<alpha_h>,<alpha_o>
    //   <name>,<rows>,<cols>
    //   <row values...>            (rows lines)
    //   ...                        (one block per group, in group order)

    inline std::string format_weights(const NetworkWeights& net)
    {
        const auto& t = net.topology();
        std::string out = "topology," + std::to_string(t.hidden) + ',' + exact(t.alpha_h) + ',' + exact(t.alpha_o) + '\n';
        for (const auto& g : net.groups()) {
            out += g.name + ',' + std::to_string(g.w.rows()) + ',' + std::to_string(g.w.cols()) + '\n';
            for (Eigen::Index r = 0; r < g.w.rows(); ++r) {
                for (Eigen::Index c = 0; c < g.w.cols(); ++c) {
                    if (c)
                        out += ',';
                    out += exact(g.w(r, c));
                }
                out += '\n';
            }
        }
        return out;
    }

    inline NetworkWeights parse_weights(std::string_view text)
    {
        auto lines = split(text, '\n');
        while (!lines.empty() && lines.back().empty())
            lines.pop_back();
        if (lines.empty())
            throw ParseError("empty weight snapshot");
        auto head = split(lines[0], ',');
        if (head.size() != 4 || head[0] != "topology")
            throw ParseError("weight snapshot must start with 'topology,<hidden>,<alpha_h>,<alpha_o>'");
        Topology topo;
        topo.hidden = static_cast<int>(parse_int(head[1]));
        topo.alpha_h = parse_double(head[2]);
        topo.alpha_o = parse_double(head[3]);
        NetworkWeights net(topo);

        std::size_t li = 1;
        for (auto& g : net.groups()) {
            if (li >= lines.size())
                throw ParseError("weight snapshot truncated before group " + g.name);
            auto gh = split(lines[li++], ',');
            if (gh.size() != 3 || gh[0] != g.name || parse_int(gh[1]) != g.w.rows() || parse_int(gh[2]) != g.w.cols())
                throw ParseError("expected block header '" + g.name + "," + std::to_string(g.w.rows()) + "," + std::to_string(g.w.cols()) + "'");
            for (Eigen::Index r = 0; r < g.w.rows(); ++r) {
                if (li >= lines.size())
                    throw ParseError("weight snapshot truncated inside group " + g.name);
                auto vals = split(lines[li++], ',');
                if (static_cast<Eigen::Index>(vals.size()) != g.w.cols())
                    throw ParseError("wrong number of columns in group " + g.name);
                for (Eigen::Index c = 0; c < g.w.cols(); ++c)
                    g.w(r, c) = parse_double(vals[static_cast<std::size_t>(c)]);
            }
        }
        if (li != lines.size())
            throw ParseError("trailing data after the last weight group");
        return net;
    }

    // Trial logs ---------------------------------------------------------------

    /// One JSON object per episode.
    inline std::string format_trial_log(const TrialResult& t)
    {
        std::string out;
        for (std::size_t e = 0; e < t.episodes.size(); ++e) {
            const auto& r = t.episodes[e];
            nlohmann::ordered_json j;
            j["episode"] = e + 1;
            j["behavior"] = r.behavior;
            j["min_distance"] = r.min_distance;
            j["ep"] = r.ep ? 1 : 0;
            j["steps"] = r.steps_used;
            out += j.dump() + '\n';
        }
        return out;
    }

} // namespace npsp::io
