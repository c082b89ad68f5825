// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "coex/cli.hpp"
#include "coex/metrics.hpp"
#include "coex/selection.hpp"
#include "oracles.hpp"

using namespace coex;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    RadarArray ula(Index m_r)
    {
        RadarArray a;
        a.m_r = m_r;
        return a;
    }

    std::string fmt(const char *f, auto... args)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    std::vector<double> values(const std::vector<MetricRecord> &rows, const std::string &scheme,
                               const std::string &name)
    {
        std::vector<double> v;
        for (const auto &r : rows)
            if (r.scheme == scheme && r.value_name == name)
                v.push_back(r.value);
        return v;
    }

    double block_norm_sum(const CompositeChannel &ch)
    {
        double s = 0.0;
        for (Index n = 0; n < ch.blocks(); ++n)
            s += ch.block(n).norm();
        return s;
    }

    // worst relative NSP leakage over 200 scenarios, precoder built on true or noiseless-estimated CSI
    double nsp_worst_leak(bool noiseless_estimate)
    {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
        {
            const int n_bs = 3 + int(seed % 6);
            const auto truth = gen_cluster_channel(CompTopology::uniform(1, 3, n_bs), 1, ula(100), seed);
            const auto known = noiseless_estimate
                                   ? estimate_composite(truth, TrainingConfig{Index(6 * n_bs), 10.0, true}, seed)
                                   : truth;
            const double leak = interference_norm(truth, nsp_precoder(known).p) / block_norm_sum(truth);
            worst = std::max(worst, leak);
        }
        return worst;
    }

    Outcome c1()
    {
        const double worst = nsp_worst_leak(false);
        return {worst <= 1e-9, fmt("worst relative interference %.3e over 200 scenarios", worst)};
    }

    Outcome c2()
    {
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
        {
            const int n_bs = 1 + int(seed % 40);
            const Index m_r = 20 + Index(mix_seed(seed) % 81);
            const auto ch = gen_cluster_channel(CompTopology::uniform(1, 3, n_bs), 1, ula(m_r), seed);
            hits += nullity(ch) == std::max<Index>(m_r - 3 * n_bs, 0);
        }
        return {hits == 200, fmt("%d/200 draws match (M_R - M_k N_BS)^+", hits)};
    }

    Outcome c3()
    {
        const double expect = 2.0 / (27.0 * std::numbers::pi * std::numbers::pi);
        const double got = crb_theta({ula(2), ComplexMatrix::Identity(2, 2), 0.0, 1.0});
        const double rel = std::abs(got - expect) / expect;
        return {rel <= 1e-9, fmt("crb %.12e rad^2, relative error %.2e", got, rel)};
    }

    CrbExperiment estimated_crb(std::vector<Scheme> schemes, Index l_t)
    {
        CrbExperiment ex;
        ex.schemes = std::move(schemes);
        ex.csi = CsiKind::estimated_csi;
        ex.training.l_t = l_t;
        ex.rho_db = 10.0;
        ex.trials = 50;
        return ex;
    }

    Outcome c4()
    {
        bool ok = true;
        double prev_nsp = 0.0;
        std::string detail;
        for (int n_bs = 3; n_bs <= 8; ++n_bs)
        {
            const Scenario sc{ula(100), CompTopology::uniform(1, 3, n_bs), 0.0, 5000.0};
            const auto rows =
                crb_experiment(sc, estimated_crb({Scheme::orthogonal, Scheme::nsp, Scheme::ssvsp}, 6 * n_bs));
            const double o = oracle::median(values(rows, "orthogonal", "crb_rad2"));
            const double n = oracle::median(values(rows, "nsp", "crb_rad2"));
            const double s = oracle::median(values(rows, "ssvsp", "crb_rad2"));
            ok = ok && o <= s && s <= n && n >= prev_nsp;
            prev_nsp = n;
            detail += fmt("N_BS=%d %.3g/%.3g/%.3g ", n_bs, o, s, n);
        }
        return {ok, "median orth/ssvsp/nsp: " + detail};
    }

    Outcome c5()
    {
        bool ok = true;
        double prev = std::numeric_limits<double>::infinity();
        std::string detail;
        for (Index m_r : {40, 60, 80, 100})
        {
            const Scenario sc{ula(m_r), CompTopology::uniform(1, 3, 8), 0.0, 5000.0};
            const double n = oracle::median(values(crb_experiment(sc, estimated_crb({Scheme::nsp}, 48)), "nsp", "crb_rad2"));
            ok = ok && n < prev;
            prev = n;
            detail += fmt("M_R=%d %.3g ", int(m_r), n);
        }
        return {ok, "median nsp crb: " + detail};
    }

    Outcome c6()
    {
        bool ok = true;
        double prev = std::numeric_limits<double>::infinity();
        std::string detail;
        const Scenario sc{ula(100), CompTopology::uniform(1, 3, 6), 0.0, 5000.0};
        for (Index l_t : {24, 48, 96, 192})
        {
            const auto rows = interference_experiment(sc, estimated_crb({Scheme::nsp}, l_t));
            const double m = oracle::median(values(rows, "nsp", "interference_norm"));
            ok = ok && m < prev;
            prev = m;
            detail += fmt("L_t=%d %.3g ", int(l_t), m);
        }
        const double noiseless = nsp_worst_leak(true);
        ok = ok && noiseless <= 1e-9;
        return {ok, "median interference: " + detail + fmt("; noiseless worst %.2e", noiseless)};
    }

    Outcome c7()
    {
        int agree = 0;
        double worst = 0.0;
        const auto x = orthogonal_waveform(100, 128);
        const auto topo = CompTopology::per_cluster(3, {6, 5, 4, 3});
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            std::vector<CompositeChannel> chans;
            for (int c = 1; c <= 4; ++c)
                chans.push_back(gen_cluster_channel(topo, c, ula(100), seed));
            const auto a = snsp_select(chans, default_rank_tol<double>(1, 100), x);
            const auto b = sssvsp_select(chans, SigmaThreshold::absolute(0.0), x);
            agree += a.best_index == b.best_index;
            for (std::size_t i = 0; i < chans.size(); ++i)
            {
                const double expect = 128.0 * (100.0 - a.scores[i]);
                worst = std::max(worst, std::abs(b.scores[i] * b.scores[i] - expect) / expect);
            }
        }
        return {agree == 100 && worst <= 1e-6,
                fmt("%d/100 same best cluster, worst score^2 relative error %.2e", agree, worst)};
    }

    Outcome c8()
    {
        double zf_worst = 0.0, mmse_worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            const Index d = 2 + Index(seed % 11);
            const ComplexMatrix h = random_complex_gaussian(d, 26, seed);
            const auto zf = zf_precoder(h);
            zf_worst = std::max(zf_worst, (h * zf.p - ComplexMatrix::Identity(d, d)).norm());
            mmse_worst = std::max(mmse_worst, (mmse_precoder(h, d, 1e-12).p - zf.p).norm());
        }
        return {zf_worst <= 1e-9 && mmse_worst <= 1e-6,
                fmt("max ||H P_zf - I|| %.2e, max ||P_mmse - P_zf|| %.2e", zf_worst, mmse_worst)};
    }

    Outcome c9()
    {
        const std::vector<double> grid{0.0, 2.0, 4.0, 6.0, 8.0};
        const Index n_symbols = 100000;
        const Scenario sc{ula(26), CompTopology::uniform(1, 4, 1), 0.0, 5000.0};

        bool oracle_ok = true;
        double worst_z = 0.0;
        {
            const auto h = gen_network_channel(sc.topology, sc.array, 1).h;
            for (const auto &pt : coop_ber(h, PrecoderKind::zf, grid, n_symbols, 1))
            {
                const double p = oracle::qpsk_ber(db_to_linear(pt.rho_db));
                const double z = std::abs(pt.ber() - p) / std::sqrt(p * (1.0 - p) / double(pt.bits));
                worst_z = std::max(worst_z, z);
                oracle_ok = oracle_ok && z <= 3.0;
            }
        }

        // estimated CSI as in the coop-ber subcommand
        const TrainingConfig training{8, db_to_linear(10.0), false};
        const std::vector<double> top(grid.end() - 2, grid.end());
        int wins = 0;
        for (int t = 0; t < 100; ++t)
        {
            const std::uint64_t seed = trial_seed(1, t);
            const auto ch = trial_channels(sc, Scheme::zf, CsiKind::estimated_csi, training, seed);
            const auto zf = coop_ber(ch.truth.h, ch.known.h, PrecoderKind::zf, top, n_symbols, seed);
            const auto mmse = coop_ber(ch.truth.h, ch.known.h, PrecoderKind::mmse, top, n_symbols, seed);
            wins += zf[0].ber() <= mmse[0].ber() && zf[1].ber() <= mmse[1].ber();
        }
        return {oracle_ok && wins >= 80,
                fmt("worst |BER - Q(sqrt(rho))| %.2f SE; ZF <= MMSE at top two points on %d/100 seeds", worst_z, wins)};
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    Outcome c10()
    {
        namespace fs = std::filesystem;
        const fs::path dir = fs::current_path() / "acceptance_determinism";
        fs::create_directories(dir);
        const fs::path cfg = dir / "config.json";
        {
            std::ofstream out(cfg);
            out << R"({"scenario": {"m_r": 40, "n_bs": [4, 3, 2], "m_k": 3},
                       "metrics": {"trials": 5, "n_symbols": 2000},
                       "run": {"seed": 11, "pris": 4}})";
        }
        bool ok = true;
        std::string detail;
        for (auto sub : kSubcommands)
        {
            std::string runs[2];
            for (int k = 0; k < 2; ++k)
            {
                const fs::path out = dir / (std::string(sub) + "_" + std::to_string(k) + ".csv");
                const std::string cmd = std::string("\"") + COEX_CLI_PATH + "\" " + std::string(sub) + " \"" +
                                        cfg.string() + "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
                if (std::system(cmd.c_str()) != 0)
                {
                    ok = false;
                    detail += std::string(sub) + " failed; ";
                }
                runs[k] = slurp(out);
            }
            const bool same = !runs[0].empty() && runs[0] == runs[1];
            ok = ok && same;
            detail += fmt("%s %s (%zu bytes) ", std::string(sub).c_str(), same ? "identical" : "DIFFERENT",
                          runs[0].size());
        }
        return {ok, detail};
    }
} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"null-space exactness", c1},      {"nullity law", c2},
        {"crb closed form", c3},           {"crb ordering over N_BS", c4},
        {"M_R compensation", c5},          {"estimation convergence", c6},
        {"selection equivalence", c7},     {"zf identity and mmse limit", c8},
        {"cooperation ber", c9},           {"cli determinism", c10}};

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
