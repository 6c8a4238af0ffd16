#pragma once

#include <npsp/error.hpp>
#include <npsp/network.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace npsp {

    /// Joint activation counters of one weight group. Counter k of connection
    /// (i <- j) counts steps with (a_i, a_j) == (k >> 1, k & 1), i.e. in the order
    /// f00, f01, f10, f11.
    struct NatTrace {
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        std::vector<std::array<std::uint32_t, 4>> counts; // row-major (post, pre)
        std::uint32_t steps = 0;

        NatTrace() = default;
        NatTrace(Eigen::Index r, Eigen::Index c) : rows(r), cols(c), counts(static_cast<std::size_t>(r * c), {0, 0, 0, 0}) {}

        const std::array<std::uint32_t, 4>& at(Eigen::Index post, Eigen::Index pre) const
        {
            return counts[static_cast<std::size_t>(post * cols + pre)];
        }

        friend bool operator==(const NatTrace&, const NatTrace&) = default;
    };

    /// One trace per weight group, aligned with NetworkWeights::groups().
    using NatSet = std::vector<NatTrace>;

    inline NatSet reset_nats(const NetworkWeights& net)
    {
        NatSet nats;
        for (const auto& g : net.groups())
            nats.emplace_back(g.w.rows(), g.w.cols());
        return nats;
    }

    inline void record_step(NatTrace& nat, const Eigen::VectorXd& post, const Eigen::VectorXd& pre)
    {
        if (post.size() != nat.rows || pre.size() != nat.cols)
            throw ContractViolation("activation vector sizes do not match the trace");
        auto* cell = nat.counts.data();
        for (Eigen::Index i = 0; i < nat.rows; ++i) {
            const unsigned hi = post[i] != 0.0 ? 2u : 0u;
            for (Eigen::Index j = 0; j < nat.cols; ++j, ++cell)
                ++(*cell)[hi | (pre[j] != 0.0 ? 1u : 0u)];
        }
        ++nat.steps;
    }

    /// Records one network step for every group. Each group pairs the new
    /// post-synaptic activation with the pre-synaptic activation that produced it.
    inline void record_step(NatSet& nats, const NetworkWeights& net, const NetworkState& prev, const NetworkState& next)
    {
        for (std::size_t g = 0; g < nats.size(); ++g) {
            const auto& grp = net.group(g);
            const auto& pre = grp.pre_is_current() ? next.layer(grp.pre) : prev.layer(grp.pre);
            record_step(nats[g], next.layer(grp.post), pre);
        }
    }

    /// Rule-table slot (0..15, i.e. x_{slot+1}) selected by thresholding the
    /// normalized counters. f00 is the most significant bit.
    inline std::size_t binarize(const std::array<std::uint32_t, 4>& counts, std::uint32_t steps, double theta)
    {
        if (steps == 0)
            throw ContractViolation("cannot binarize an activation trace of an empty episode");
        std::size_t slot = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double freq = static_cast<double>(counts[k]) / static_cast<double>(steps);
            slot = (slot << 1) | (freq >= theta ? 1u : 0u);
        }
        return slot;
    }

    /// Same thresholding over already-normalized frequencies (f00, f01, f10, f11).
    inline std::size_t binarize_frequencies(const std::array<double, 4>& freq, double theta)
    {
        std::size_t slot = 0;
        for (double f : freq)
            slot = (slot << 1) | (f >= theta ? 1u : 0u);
        return slot;
    }

    struct NpspRule {
        std::array<std::int8_t, 16> table{};
        double eta = 0.0;
        double theta = 0.0;
        double alpha_h = 1.0;
        double alpha_o = 1.0;
        /// Rules for networks without a hidden layer carry no alpha_h.
        bool has_alpha_h = false;

        friend bool operator==(const NpspRule&, const NpspRule&) = default;
    };

    /// Episode-end plasticity: w += eta * table[binarize(NAT)], then every incoming
    /// vector is rescaled to unit length. Self-connections stay zero. Returns the
    /// number of incoming vectors that were exactly zero and left unnormalized.
    inline std::size_t apply_npsp(NetworkWeights& net, const NatSet& nats, const NpspRule& rule)
    {
        if (nats.size() != net.groups().size())
            throw ContractViolation("one activation trace per weight group is required");
        for (std::size_t g = 0; g < nats.size(); ++g) {
            auto& grp = net.group(g);
            const auto& nat = nats[g];
            if (nat.rows != grp.w.rows() || nat.cols != grp.w.cols())
                throw ContractViolation("activation trace shape does not match weight group " + grp.name);
            for (Eigen::Index i = 0; i < grp.w.rows(); ++i)
                for (Eigen::Index j = 0; j < grp.w.cols(); ++j) {
                    if (grp.zero_diagonal() && i == j)
                        continue;
                    const auto delta = rule.table[binarize(nat.at(i, j), nat.steps, rule.theta)];
                    grp.w(i, j) += rule.eta * static_cast<double>(delta);
                }
        }
        return net.normalize_incoming();
    }

} // namespace npsp
