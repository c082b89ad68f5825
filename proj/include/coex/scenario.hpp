#ifndef COEX_SCENARIO_HPP
#define COEX_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "coex/matops.hpp"

namespace coex
{
    // Uniform linear radar array, colocated transmit/receive
    struct RadarArray
    {
        Index m_r = 2;
        double spacing_wavelengths = 0.75;
        double carrier_hz = 3.5e9;

        void validate() const;
    };

    // Static non-overlapping CoMP clustering. BS and cluster ids are 1-based.
    class CompTopology
    {
    public:
        // c_t clusters of m_k BSs each, every BS with n_bs antennas
        static CompTopology uniform(int c_t, int m_k, int n_bs);
        // one cluster per entry of n_bs_per_cluster, m_k BSs each
        static CompTopology per_cluster(int m_k, const std::vector<int> &n_bs_per_cluster);

        CompTopology(std::vector<int> antennas_per_bs, std::vector<std::vector<int>> clusters, int k = 0);

        int m() const { return static_cast<int>(antennas_.size()); }
        int k() const { return k_; }
        int c_t() const { return static_cast<int>(clusters_.size()); }
        int n_bs(int bs) const;
        const std::vector<int> &cluster(int cluster_index) const;
        const std::vector<std::vector<int>> &clusters() const { return clusters_; }
        // M_k * N_BS for the referenced cluster
        Index cluster_rows(int cluster_index) const;
        // sum of antennas over all BSs
        Index total_rows() const;

    private:
        std::vector<int> antennas_;
        std::vector<std::vector<int>> clusters_;
        int k_ = 0;
    };

    enum class CsiKind
    {
        true_csi,
        estimated_csi
    };

    const char *to_string(CsiKind kind);

    // Stacked radar-to-cluster interference channel, (M_k N_BS) x M_R
    struct CompositeChannel
    {
        int cluster_index = 1;
        ComplexMatrix h;
        CsiKind kind = CsiKind::true_csi;
        std::vector<Index> block_rows; // antennas of each member BS, in stacking order

        Index blocks() const { return static_cast<Index>(block_rows.size()); }
        // per-BS block n (0-based position within the cluster)
        Eigen::Block<const ComplexMatrix> block(Index n) const;
    };

    struct Scenario
    {
        RadarArray array;
        CompTopology topology = CompTopology::uniform(1, 1, 1);
        double theta_rad = 0.0;
        double r0_m = 5000.0; // metadata only
    };

    ComplexVector steering_vector(const RadarArray &array, double theta);
    ComplexVector steering_derivative(const RadarArray &array, double theta);

    // Per-BS blocks drawn CN(0,1) under derive_seed(seed, {cluster, bs}) and stacked in BS order
    CompositeChannel gen_cluster_channel(const CompTopology &topology, int cluster_index, const RadarArray &array,
                                         std::uint64_t seed);

    // Seed used for the block of one BS; exposed so stacking can be checked block by block
    std::uint64_t channel_block_seed(std::uint64_t seed, int cluster_index, int bs_index);

    // Channel of every BS in the network stacked in BS-index order (cooperation mode)
    CompositeChannel gen_network_channel(const CompTopology &topology, const RadarArray &array, std::uint64_t seed);

    Index nullity(const CompositeChannel &ch, double rel_tol);
    Index nullity(const CompositeChannel &ch);

} // namespace coex

#endif // COEX_SCENARIO_HPP
