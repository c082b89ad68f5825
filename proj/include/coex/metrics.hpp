#ifndef COEX_METRICS_HPP
#define COEX_METRICS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "coex/estimation.hpp"
#include "coex/precoders.hpp"

namespace coex
{
    struct CrbInput
    {
        RadarArray array;
        ComplexMatrix r_x; // coherence matrix, M_R x M_R, Hermitian PSD
        double theta = 0.0;
        double snr = 1.0; // linear
    };

    // CRB on the target direction in rad^2 for a colocated ULA (a_r == a_t).
    // Returns +infinity when the direction is unidentifiable under r_x.
    double crb_theta(const CrbInput &inp);

    inline double rad2_to_deg2(double v)
    {
        constexpr double k = 180.0 / 3.14159265358979323846;
        return v * k * k;
    }

    // sum_n ||H_n P||_F over the per-BS blocks of the true channel
    double interference_norm(const CompositeChannel &truth, const ComplexMatrix &p);
    double interference_norm(std::span<const ComplexMatrix> per_bs, const ComplexMatrix &p);

    struct BerPoint
    {
        double rho_db = 0.0;
        std::int64_t bits = 0;
        std::int64_t errors = 0;
        std::vector<std::int64_t> stream_errors; // bits per stream = bits / streams
        double ber() const { return bits > 0 ? double(errors) / double(bits) : 0.0; }
    };

    // Gray QPSK per stream through P then the true channel, CN(0, 1/rho) noise per
    // receive antenna, sign detection per stream. The precoder is designed on
    // h_design (MMSE uses sigma^2 = 1/rho). Symbols and unit noise are shared
    // across grid points and precoder kinds for a given seed.
    std::vector<BerPoint> coop_ber(const ComplexMatrix &h_true, const ComplexMatrix &h_design, PrecoderKind kind,
                                   std::span<const double> rho_db, Index n_symbols, std::uint64_t seed,
                                   bool normalize_power = false);
    std::vector<BerPoint> coop_ber(const ComplexMatrix &h_comp, PrecoderKind kind, std::span<const double> rho_db,
                                   Index n_symbols, std::uint64_t seed, bool normalize_power = false);

    // One output row
    struct MetricRecord
    {
        std::string experiment;
        std::string scheme;
        std::string csi;
        Index m_r = 0;
        std::string n_bs; // single value or ';'-joined per-cluster list
        int m_k = 0;
        int c_t = 0;
        Index l_t = 0;
        double rho_db = 0.0;
        double snr_db = 0.0;
        double sigma_th = 0.0;
        int trial = 0;
        std::uint64_t seed = 0;
        std::string value_name;
        double value = 0.0; // +inf allowed and written as "inf"
    };

    void write_csv_header(std::ostream &os);
    void write_csv_row(std::ostream &os, const MetricRecord &r);
    void write_csv(std::ostream &os, std::span<const MetricRecord> rows);

    enum class Scheme
    {
        orthogonal,
        nsp,
        ssvsp,
        zf,
        mmse
    };

    const char *to_string(Scheme s);

    struct CrbExperiment
    {
        std::string experiment = "crb";
        std::vector<Scheme> schemes{Scheme::orthogonal, Scheme::nsp, Scheme::ssvsp};
        CsiKind csi = CsiKind::estimated_csi;
        TrainingConfig training;
        double rho_db = 10.0;
        SigmaThreshold sigma_th = SigmaThreshold::relative(0.6);
        double snr_db = 0.0;
        bool normalize_power = false;
        bool degrees = false; // extra crb_deg2 row per crb_rad2 row
        int trials = 50;
        std::uint64_t seed = 1;
        int threads = 1;
    };

    // Seed of trial t; independent of the grid point so sweeps use common random numbers
    std::uint64_t trial_seed(std::uint64_t seed, int trial);

    // Precoder for one trial, built on the channel the radar knows (true or estimated).
    // zf/mmse use the whole network channel, nsp/ssvsp cluster 1.
    struct TrialChannels
    {
        CompositeChannel truth;
        CompositeChannel known;
    };
    TrialChannels trial_channels(const Scenario &sc, Scheme scheme, CsiKind csi, const TrainingConfig &training,
                                 std::uint64_t seed);

    // Rows ordered by scheme then trial
    std::vector<MetricRecord> crb_experiment(const Scenario &sc, const CrbExperiment &cfg);

    // interference_norm on the true cluster channel with the precoder built on the known channel;
    // value names interference_norm and interference_bs1
    std::vector<MetricRecord> interference_experiment(const Scenario &sc, const CrbExperiment &cfg);

    // Fill the parameter columns of a record from a scenario and experiment config
    MetricRecord base_record(const Scenario &sc, const CrbExperiment &cfg);

    // Run fn(i) for i in [0, n) over a pool of threads; fn must only touch slot i
    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn);

    double db_to_linear(double db);

} // namespace coex

#endif // COEX_METRICS_HPP
