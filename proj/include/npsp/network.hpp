#pragma once

#include <npsp/error.hpp>
#include <npsp/maze.hpp>
#include <npsp/random.hpp>

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace npsp {

    enum class Layer : std::uint8_t { Input = 0, Hidden = 1, Output = 2 };

    struct Topology {
        static constexpr int kInputs = 3; // left, front, right sensors; bias is appended
        static constexpr int kOutputs = static_cast<int>(kNumActions);

        int hidden = 0;
        double alpha_h = 1.0; // recurrent scale, unused without a hidden layer
        double alpha_o = 1.0; // feedback scale

        int layer_size(Layer l) const
        {
            switch (l) {
            case Layer::Input: return kInputs + 1;
            case Layer::Hidden: return hidden;
            case Layer::Output: return kOutputs;
            }
            return 0;
        }

        /// Free connection parameters; zero self-connections are not counted.
        std::size_t parameter_count() const
        {
            const std::size_t o = kOutputs, i = kInputs + 1, h = static_cast<std::size_t>(hidden);
            if (h == 0)
                return i * o + (o - 1) * o;
            return i * h + (h - 1) * h + h * o + o * h;
        }
    };

    /// One weight matrix: rows index the post-synaptic layer, columns the pre-synaptic one.
    struct WeightGroup {
        std::string name;
        Layer post;
        Layer pre;
        Eigen::MatrixXd w;

        bool zero_diagonal() const { return post == pre; }

        /// Whether the pre-synaptic activation that drives this group is the one
        /// from the current step (computed earlier in the same step) rather than
        /// the previous one.
        bool pre_is_current() const { return static_cast<int>(pre) < static_cast<int>(post); }

        std::size_t parameter_count() const
        {
            auto n = static_cast<std::size_t>(w.size());
            return zero_diagonal() ? n - static_cast<std::size_t>(w.rows()) : n;
        }
    };

    /// Weight groups, in fixed order:
    ///   hidden == 0: W_oi (5x4, last column bias), W_o (5x5)
    ///   hidden  > 0: W_hi (Hx4), W_h (HxH), W_oh (5xH), W_ho (Hx5)
    class NetworkWeights {
    public:
        enum Group : std::size_t { OI = 0, O = 1, HI = 0, H = 1, OH = 2, HO = 3 };

        NetworkWeights() = default;

        explicit NetworkWeights(const Topology& topo) : _topo(topo)
        {
            if (topo.hidden < 0)
                throw ContractViolation("hidden layer size must be non-negative");
            auto add = [&](std::string name, Layer post, Layer pre) {
                _groups.push_back({std::move(name), post, pre, Eigen::MatrixXd::Zero(topo.layer_size(post), topo.layer_size(pre))});
            };
            if (topo.hidden == 0) {
                add("W_oi", Layer::Output, Layer::Input);
                add("W_o", Layer::Output, Layer::Output);
            }
            else {
                add("W_hi", Layer::Hidden, Layer::Input);
                add("W_h", Layer::Hidden, Layer::Hidden);
                add("W_oh", Layer::Output, Layer::Hidden);
                add("W_ho", Layer::Hidden, Layer::Output);
            }
        }

        const Topology& topology() const { return _topo; }
        Topology& topology() { return _topo; }
        bool has_hidden() const { return _topo.hidden > 0; }

        std::vector<WeightGroup>& groups() { return _groups; }
        const std::vector<WeightGroup>& groups() const { return _groups; }
        WeightGroup& group(std::size_t g) { return _groups[g]; }
        const WeightGroup& group(std::size_t g) const { return _groups[g]; }

        std::size_t parameter_count() const
        {
            std::size_t n = 0;
            for (const auto& g : _groups)
                n += g.parameter_count();
            return n;
        }

        void enforce_zero_diagonals()
        {
            for (auto& g : _groups)
                if (g.zero_diagonal())
                    g.w.diagonal().setZero();
        }

        /// Euclidean norm of the full incoming vector (all groups) of neuron `row` in `post`.
        double incoming_norm(Layer post, Eigen::Index row) const
        {
            double sq = 0.0;
            for (const auto& g : _groups)
                if (g.post == post)
                    sq += g.w.row(row).squaredNorm();
            return std::sqrt(sq);
        }

        /// Rescales every incoming vector to unit length. Zero vectors are left at
        /// zero; returns how many there were.
        std::size_t normalize_incoming()
        {
            std::size_t zeros = 0;
            for (auto post : {Layer::Hidden, Layer::Output}) {
                for (Eigen::Index r = 0; r < _topo.layer_size(post); ++r) {
                    double n = incoming_norm(post, r);
                    if (n == 0.0) {
                        ++zeros;
                        continue;
                    }
                    for (auto& g : _groups)
                        if (g.post == post)
                            g.w.row(r) /= n;
                }
            }
            return zeros;
        }

        friend bool operator==(const NetworkWeights& a, const NetworkWeights& b)
        {
            if (a._groups.size() != b._groups.size() || a._topo.hidden != b._topo.hidden)
                return false;
            for (std::size_t i = 0; i < a._groups.size(); ++i)
                if (a._groups[i].w != b._groups[i].w)
                    return false;
            return true;
        }

    private:
        Topology _topo;
        std::vector<WeightGroup> _groups;
    };

    /// Uniform [-1, 1] weights, zero self-connections, unit-length incoming vectors.
    inline NetworkWeights init_random(const Topology& topo, Rng& rng)
    {
        NetworkWeights net(topo);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& g : net.groups())
            for (Eigen::Index c = 0; c < g.w.cols(); ++c)
                for (Eigen::Index r = 0; r < g.w.rows(); ++r)
                    g.w(r, c) = u(rng);
        net.enforce_zero_diagonals();
        net.normalize_incoming();
        return net;
    }

    inline NetworkWeights init_random(const Topology& topo, std::uint64_t seed)
    {
        auto rng = make_rng(seed);
        return init_random(topo, rng);
    }

    /// Binary activations of one time step. `net_o` keeps the pre-threshold output
    /// sums for action selection.
    struct NetworkState {
        Eigen::VectorXd input;  // 3 sensors + bias (always 1)
        Eigen::VectorXd hidden;
        Eigen::VectorXd output;
        Eigen::VectorXd net_o;

        const Eigen::VectorXd& layer(Layer l) const
        {
            switch (l) {
            case Layer::Input: return input;
            case Layer::Hidden: return hidden;
            default: return output;
            }
        }
    };

    inline NetworkState reset_state(const Topology& topo)
    {
        NetworkState s;
        s.input = Eigen::VectorXd::Zero(Topology::kInputs + 1);
        s.input[Topology::kInputs] = 1.0;
        s.hidden = Eigen::VectorXd::Zero(topo.hidden);
        s.output = Eigen::VectorXd::Zero(Topology::kOutputs);
        s.net_o = Eigen::VectorXd::Zero(Topology::kOutputs);
        return s;
    }

    /// Step activation: 0 for negative input, 1 otherwise.
    inline Eigen::VectorXd step_activation(const Eigen::VectorXd& x)
    {
        return (x.array() >= 0.0).cast<double>().matrix();
    }

    inline NetworkState forward_step(const NetworkWeights& net, const NetworkState& prev, const SensorReading& sensors)
    {
        const auto& topo = net.topology();
        NetworkState next;
        next.input.resize(Topology::kInputs + 1);
        next.input << sensors.left, sensors.front, sensors.right, 1.0;
        if (!net.has_hidden()) {
            next.hidden.resize(0);
            next.net_o = net.group(NetworkWeights::OI).w * next.input + topo.alpha_o * (net.group(NetworkWeights::O).w * prev.output);
        }
        else {
            Eigen::VectorXd net_h = net.group(NetworkWeights::HI).w * next.input
                + topo.alpha_h * (net.group(NetworkWeights::H).w * prev.hidden)
                + topo.alpha_o * (net.group(NetworkWeights::HO).w * prev.output);
            next.hidden = step_activation(net_h);
            next.net_o = net.group(NetworkWeights::OH).w * next.hidden;
        }
        next.output = step_activation(next.net_o);
        return next;
    }

    /// Argmax of the pre-threshold output sums; ties go to the lowest index.
    inline Action select_action(const NetworkState& s)
    {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < s.net_o.size(); ++i)
            if (s.net_o[i] > s.net_o[best])
                best = i;
        return static_cast<Action>(best);
    }

} // namespace npsp
