#ifndef COEX_CLI_HPP
#define COEX_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coex/metrics.hpp"
#include "coex/selection.hpp"

namespace coex
{
    // Validated run configuration. The text form is a JSON object with the
    // sections scenario, estimation, precoding, metrics and run; unknown
    // sections or keys are rejected.
    struct RunConfig
    {
        struct ScenarioBlock
        {
            Index m_r = 0;
            std::vector<int> n_bs; // one entry, or one per cluster
            int m_k = 0;
            int c_t = 1;
            int m = 0; // total BS count; defaults to m_k * c_t
            double carrier_hz = 3.5e9;
            double spacing_lambda = 0.75;
            double theta_deg = 0.0;
            double r0_km = 5.0;
        } scenario;

        struct EstimationBlock
        {
            std::optional<Index> l_t; // default: twice the number of trained streams
            double rho_db = 10.0;
            bool noiseless = false;
            CsiKind csi = CsiKind::estimated_csi;
        } estimation;

        struct PrecodingBlock
        {
            std::vector<std::string> schemes; // empty: subcommand default
            std::optional<double> sigma_th_rel;
            std::optional<double> sigma_th_abs;
            bool normalize_power = false;
            Index waveform_len = 128;
        } precoding;

        struct MetricsBlock
        {
            double snr_db = 0.0;
            int trials = 50;
            Index n_symbols = 100000;
            std::vector<double> rho_db_grid{0.0, 2.0, 4.0, 6.0, 8.0};
            bool degrees = false;
        } metrics;

        struct RunBlock
        {
            std::uint64_t seed = 1;
            int parallelism = 1; // 0: hardware concurrency
            std::string output;
            int pris = 10;
            bool redraw_channels = true;
        } run;

        // Cross-field checks; throws ConfigError naming the offending key
        void validate() const;

        int max_n_bs() const;
        SigmaThreshold sigma_threshold() const;
        Scenario build_scenario() const;
    };

    RunConfig parse_config(std::string_view text);
    RunConfig load_config(const std::string &path);

    // --sweep key=start:stop:step, inclusive
    struct SweepAxis
    {
        std::string key;
        std::vector<double> values;
    };

    SweepAxis parse_sweep(std::string_view spec);

    // Copy of cfg with one key overridden and revalidated
    RunConfig apply_override(const RunConfig &cfg, const std::string &key, double value);

    // Cartesian product of the axes, first axis outermost
    std::vector<RunConfig> expand_grid(const RunConfig &cfg, const std::vector<SweepAxis> &axes);

    inline constexpr std::string_view kSubcommands[] = {"crb-sweep", "interference-sweep", "selection-demo",
                                                        "coop-ber", "pri-demo"};

    // Rows of one subcommand over the expanded grid; deterministic for a given config
    std::vector<MetricRecord> run_subcommand(std::string_view name, const RunConfig &cfg,
                                             const std::vector<SweepAxis> &axes);

} // namespace coex

#endif // COEX_CLI_HPP
