#include "coex/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace coex
{
    void RadarArray::validate() const
    {
        if (m_r < 2)
            throw std::invalid_argument("RadarArray: m_r must be >= 2");
        if (!(spacing_wavelengths > 0.0))
            throw std::invalid_argument("RadarArray: spacing_wavelengths must be > 0");
        if (!(carrier_hz > 0.0))
            throw std::invalid_argument("RadarArray: carrier_hz must be > 0");
    }

    CompTopology CompTopology::uniform(int c_t, int m_k, int n_bs)
    {
        if (c_t < 1 || m_k < 1 || n_bs < 1)
            throw std::invalid_argument("CompTopology::uniform: c_t, m_k and n_bs must be >= 1");
        return per_cluster(m_k, std::vector<int>(static_cast<std::size_t>(c_t), n_bs));
    }

    CompTopology CompTopology::per_cluster(int m_k, const std::vector<int> &n_bs_per_cluster)
    {
        if (m_k < 1 || n_bs_per_cluster.empty())
            throw std::invalid_argument("CompTopology::per_cluster: need m_k >= 1 and at least one cluster");
        std::vector<int> antennas;
        std::vector<std::vector<int>> clusters;
        for (int n_bs : n_bs_per_cluster)
        {
            std::vector<int> members;
            for (int j = 0; j < m_k; ++j)
            {
                antennas.push_back(n_bs);
                members.push_back(static_cast<int>(antennas.size()));
            }
            clusters.push_back(std::move(members));
        }
        return CompTopology(std::move(antennas), std::move(clusters));
    }

    CompTopology::CompTopology(std::vector<int> antennas_per_bs, std::vector<std::vector<int>> clusters, int k)
        : antennas_(std::move(antennas_per_bs)), clusters_(std::move(clusters)), k_(k)
    {
        if (antennas_.empty())
            throw std::invalid_argument("CompTopology: at least one BS required");
        for (int a : antennas_)
            if (a < 1)
                throw std::invalid_argument("CompTopology: every BS needs >= 1 antenna");
        if (clusters_.empty())
            throw std::invalid_argument("CompTopology: at least one cluster required");

        std::set<int> seen;
        for (const auto &c : clusters_)
        {
            if (c.empty())
                throw std::invalid_argument("CompTopology: clusters must be nonempty");
            for (int bs : c)
            {
                if (bs < 1 || bs > m())
                    throw std::invalid_argument("CompTopology: BS index " + std::to_string(bs) + " out of range");
                if (!seen.insert(bs).second)
                    throw std::invalid_argument("CompTopology: BS " + std::to_string(bs) +
                                                " belongs to more than one cluster");
            }
        }
    }

    int CompTopology::n_bs(int bs) const
    {
        if (bs < 1 || bs > m())
            throw DimensionError("CompTopology: BS index " + std::to_string(bs) + " out of range");
        return antennas_[static_cast<std::size_t>(bs - 1)];
    }

    const std::vector<int> &CompTopology::cluster(int cluster_index) const
    {
        if (cluster_index < 1 || cluster_index > c_t())
            throw DimensionError("CompTopology: cluster index " + std::to_string(cluster_index) + " out of range [1, " +
                                 std::to_string(c_t()) + "]");
        return clusters_[static_cast<std::size_t>(cluster_index - 1)];
    }

    Index CompTopology::cluster_rows(int cluster_index) const
    {
        Index rows = 0;
        for (int bs : cluster(cluster_index))
            rows += n_bs(bs);
        return rows;
    }

    Index CompTopology::total_rows() const
    {
        Index rows = 0;
        for (int a : antennas_)
            rows += a;
        return rows;
    }

    const char *to_string(CsiKind kind)
    {
        return kind == CsiKind::true_csi ? "true" : "estimated";
    }

    Eigen::Block<const ComplexMatrix> CompositeChannel::block(Index n) const
    {
        if (n < 0 || n >= blocks())
            throw DimensionError("CompositeChannel: block index out of range");
        Index start = 0;
        for (Index i = 0; i < n; ++i)
            start += block_rows[static_cast<std::size_t>(i)];
        return h.middleRows(start, block_rows[static_cast<std::size_t>(n)]);
    }

    ComplexVector steering_vector(const RadarArray &array, double theta)
    {
        ComplexVector a(array.m_r);
        const double k = 2.0 * std::numbers::pi * array.spacing_wavelengths * std::sin(theta);
        for (Index p = 0; p < array.m_r; ++p)
            a(p) = std::polar(1.0, -k * double(p));
        return a;
    }

    ComplexVector steering_derivative(const RadarArray &array, double theta)
    {
        const ComplexVector a = steering_vector(array, theta);
        const double k = 2.0 * std::numbers::pi * array.spacing_wavelengths * std::cos(theta);
        ComplexVector d(array.m_r);
        for (Index p = 0; p < array.m_r; ++p)
            d(p) = std::complex<double>(0.0, -k * double(p)) * a(p);
        return d;
    }

    std::uint64_t channel_block_seed(std::uint64_t seed, int cluster_index, int bs_index)
    {
        return derive_seed(seed, {0xC11ULL, static_cast<std::uint64_t>(cluster_index),
                                  static_cast<std::uint64_t>(bs_index)});
    }

    namespace
    {
        CompositeChannel stack_blocks(const CompTopology &topology, const std::vector<int> &members,
                                      const std::vector<int> &seed_clusters, const RadarArray &array,
                                      std::uint64_t seed, int cluster_index)
        {
            CompositeChannel ch;
            ch.cluster_index = cluster_index;
            ch.kind = CsiKind::true_csi;
            Index rows = 0;
            for (int bs : members)
                rows += topology.n_bs(bs);
            ch.h.resize(rows, array.m_r);
            Index at = 0;
            for (std::size_t j = 0; j < members.size(); ++j)
            {
                const int bs = members[j];
                const Index n = topology.n_bs(bs);
                ch.h.middleRows(at, n) =
                    random_complex_gaussian(n, array.m_r, channel_block_seed(seed, seed_clusters[j], bs));
                ch.block_rows.push_back(n);
                at += n;
            }
            return ch;
        }
    } // namespace

    CompositeChannel gen_cluster_channel(const CompTopology &topology, int cluster_index, const RadarArray &array,
                                         std::uint64_t seed)
    {
        array.validate();
        const auto &members = topology.cluster(cluster_index);
        return stack_blocks(topology, members, std::vector<int>(members.size(), cluster_index), array, seed,
                            cluster_index);
    }

    CompositeChannel gen_network_channel(const CompTopology &topology, const RadarArray &array, std::uint64_t seed)
    {
        array.validate();
        std::vector<int> owner(static_cast<std::size_t>(topology.m()), 0);
        for (int c = 1; c <= topology.c_t(); ++c)
            for (int bs : topology.cluster(c))
                owner[static_cast<std::size_t>(bs - 1)] = c;
        std::vector<int> members(owner.size());
        for (std::size_t i = 0; i < members.size(); ++i)
            members[i] = static_cast<int>(i) + 1;
        // cluster_index 0 marks the whole network
        return stack_blocks(topology, members, owner, array, seed, 0);
    }

    Index nullity(const CompositeChannel &ch, double rel_tol)
    {
        const auto s = svd(ch.h);
        return ch.h.cols() - numeric_rank(s, rel_tol);
    }

    Index nullity(const CompositeChannel &ch)
    {
        return nullity(ch, default_rank_tol(ch.h.rows(), ch.h.cols()));
    }

} // namespace coex
