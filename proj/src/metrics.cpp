#include "coex/metrics.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace coex
{
    double db_to_linear(double db)
    {
        return std::pow(10.0, db / 10.0);
    }

    double crb_theta(const CrbInput &inp)
    {
        inp.array.validate();
        const Index m = inp.array.m_r;
        const ComplexMatrix &r = inp.r_x;
        if (r.rows() != m || r.cols() != m)
            throw DimensionError("crb_theta: R_x must be " + std::to_string(m) + " x " + std::to_string(m));
        if (!(inp.snr > 0.0))
            throw std::invalid_argument("crb_theta: snr must be > 0");
        const double r_norm = r.norm();
        if ((r - r.adjoint()).norm() > 1e-9 * std::max(1.0, r_norm))
            throw std::invalid_argument("crb_theta: R_x is not Hermitian");

        const ComplexVector a = steering_vector(inp.array, inp.theta);
        const ComplexVector da = steering_derivative(inp.array, inp.theta);
        const ComplexMatrix rt = r.transpose();

        const std::complex<double> t1 = double(m) * da.dot(rt * da); // dot() conjugates its left operand
        const std::complex<double> ara = a.dot(rt * a);
        const std::complex<double> cross = a.dot(rt * da);
        const double dar2 = da.squaredNorm(); // ||d a_r / d theta||^2 with a_r == a_t

        const double scale = std::abs(t1) + std::abs(ara) * dar2 + std::numeric_limits<double>::min();
        const double imag = std::abs(t1.imag()) + std::abs(ara.imag()) * dar2;
        if (imag > 1e-8 * scale)
            throw NumericalError("crb_theta: Fisher information has a non-negligible imaginary part");

        const double inf = std::numeric_limits<double>::infinity();
        if (ara.real() <= 1e-12 * r_norm)
            return inf;
        const double info = t1.real() + ara.real() * dar2 - double(m) * std::norm(cross) / ara.real();
        if (!(info > 1e-12 * scale))
            return inf;
        return 1.0 / (2.0 * inp.snr * info);
    }

    double interference_norm(std::span<const ComplexMatrix> per_bs, const ComplexMatrix &p)
    {
        double total = 0.0;
        for (const auto &h : per_bs)
            total += matmul(h, p).norm();
        return total;
    }

    double interference_norm(const CompositeChannel &truth, const ComplexMatrix &p)
    {
        if (truth.h.cols() != p.rows())
            throw DimensionError("interference_norm: channel has " + std::to_string(truth.h.cols()) +
                                 " columns, precoder " + std::to_string(p.rows()) + " rows");
        double total = 0.0;
        for (Index n = 0; n < truth.blocks(); ++n)
            total += (truth.block(n) * p).norm();
        return total;
    }

    std::vector<BerPoint> coop_ber(const ComplexMatrix &h_true, const ComplexMatrix &h_design, PrecoderKind kind,
                                   std::span<const double> rho_db, Index n_symbols, std::uint64_t seed,
                                   bool normalize_power)
    {
        if (kind != PrecoderKind::zf && kind != PrecoderKind::mmse)
            throw std::invalid_argument("coop_ber: precoder kind must be zf or mmse");
        if (h_true.rows() != h_design.rows() || h_true.cols() != h_design.cols())
            throw DimensionError("coop_ber: true and design channels differ in shape");
        if (n_symbols < 1)
            throw std::invalid_argument("coop_ber: n_symbols must be >= 1");
        const Index d = h_true.rows();

        // unit-energy Gray QPSK symbols and CN(0,1) noise, reused at every grid point
        std::mt19937_64 gen(derive_seed(seed, {0xBE7ULL}));
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> b_re(d, n_symbols), b_im(d, n_symbols);
        ComplexMatrix s(d, n_symbols);
        const double amp = std::sqrt(0.5);
        for (Index n = 0; n < n_symbols; ++n)
            for (Index i = 0; i < d; ++i)
            {
                const auto bits = gen();
                b_re(i, n) = (bits & 1U) != 0;
                b_im(i, n) = (bits & 2U) != 0;
                s(i, n) = {b_re(i, n) ? -amp : amp, b_im(i, n) ? -amp : amp};
            }
        const ComplexMatrix w = random_complex_gaussian(d, n_symbols, derive_seed(seed, {0xA76ULL}));

        std::vector<BerPoint> out;
        out.reserve(rho_db.size());
        for (double db : rho_db)
        {
            const double rho = db_to_linear(db);
            const double sigma2 = 1.0 / rho;
            const Precoder pc = kind == PrecoderKind::zf ? zf_precoder(h_design, normalize_power)
                                                         : mmse_precoder(h_design, d, sigma2, normalize_power);
            const ComplexMatrix g = h_true * pc.p;
            const ComplexMatrix y = g * s + std::sqrt(sigma2) * w;

            BerPoint pt;
            pt.rho_db = db;
            pt.bits = 2 * d * n_symbols;
            pt.stream_errors.assign(static_cast<std::size_t>(d), 0);
            for (Index n = 0; n < n_symbols; ++n)
                for (Index i = 0; i < d; ++i)
                {
                    const bool re = y(i, n).real() < 0.0;
                    const bool im = y(i, n).imag() < 0.0;
                    const int e = int(re != b_re(i, n)) + int(im != b_im(i, n));
                    pt.stream_errors[static_cast<std::size_t>(i)] += e;
                    pt.errors += e;
                }
            out.push_back(std::move(pt));
        }
        return out;
    }

    std::vector<BerPoint> coop_ber(const ComplexMatrix &h_comp, PrecoderKind kind, std::span<const double> rho_db,
                                   Index n_symbols, std::uint64_t seed, bool normalize_power)
    {
        return coop_ber(h_comp, h_comp, kind, rho_db, n_symbols, seed, normalize_power);
    }

    // ---------------------------------------------------------------- csv

    namespace
    {
        std::string fmt_real(double v)
        {
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            if (std::isnan(v))
                return "nan";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }
    } // namespace

    void write_csv_header(std::ostream &os)
    {
        os << "experiment,scheme,csi,m_r,n_bs,m_k,c_t,l_t,rho_db,snr_db,sigma_th,trial,seed,value_name,value\n";
    }

    void write_csv_row(std::ostream &os, const MetricRecord &r)
    {
        os << r.experiment << ',' << r.scheme << ',' << r.csi << ',' << r.m_r << ',' << r.n_bs << ',' << r.m_k << ','
           << r.c_t << ',' << r.l_t << ',' << fmt_real(r.rho_db) << ',' << fmt_real(r.snr_db) << ','
           << fmt_real(r.sigma_th) << ',' << r.trial << ',' << r.seed << ',' << r.value_name << ','
           << fmt_real(r.value) << '\n';
    }

    void write_csv(std::ostream &os, std::span<const MetricRecord> rows)
    {
        write_csv_header(os);
        for (const auto &r : rows)
            write_csv_row(os, r);
    }

    // ---------------------------------------------------------------- experiments

    const char *to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::orthogonal:
            return "orthogonal";
        case Scheme::nsp:
            return "nsp";
        case Scheme::ssvsp:
            return "ssvsp";
        case Scheme::zf:
            return "zf";
        case Scheme::mmse:
            return "mmse";
        }
        return "?";
    }

    std::uint64_t trial_seed(std::uint64_t seed, int trial)
    {
        return derive_seed(seed, {0x7A1ULL, static_cast<std::uint64_t>(trial)});
    }

    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn)
    {
        std::size_t workers = threads > 0 ? std::size_t(threads) : std::max(1U, std::thread::hardware_concurrency());
        workers = std::min(workers, n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mu);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        pool.clear();
        if (failure)
            std::rethrow_exception(failure);
    }

    TrialChannels trial_channels(const Scenario &sc, Scheme scheme, CsiKind csi, const TrainingConfig &training,
                                 std::uint64_t seed)
    {
        TrialChannels out;
        const bool network = scheme == Scheme::zf || scheme == Scheme::mmse;
        out.truth = network ? gen_network_channel(sc.topology, sc.array, seed)
                            : gen_cluster_channel(sc.topology, 1, sc.array, seed);
        if (csi == CsiKind::true_csi)
            out.known = out.truth;
        else
            out.known = estimate_composite(out.truth, training, derive_seed(seed, {0xE57ULL}));
        return out;
    }

    MetricRecord base_record(const Scenario &sc, const CrbExperiment &cfg)
    {
        MetricRecord r;
        r.experiment = cfg.experiment;
        r.csi = to_string(cfg.csi);
        r.m_r = sc.array.m_r;
        const auto &topo = sc.topology;
        std::string n_bs;
        bool uniform = true;
        const int first = topo.n_bs(topo.cluster(1).front());
        for (int c = 1; c <= topo.c_t(); ++c)
        {
            const int v = topo.n_bs(topo.cluster(c).front());
            uniform = uniform && v == first;
            n_bs += (c > 1 ? ";" : "") + std::to_string(v);
        }
        r.n_bs = uniform ? std::to_string(first) : n_bs;
        r.m_k = static_cast<int>(topo.cluster(1).size());
        r.c_t = topo.c_t();
        r.l_t = cfg.csi == CsiKind::estimated_csi ? cfg.training.l_t : 0;
        r.rho_db = cfg.rho_db;
        r.snr_db = cfg.snr_db;
        r.sigma_th = cfg.sigma_th.value;
        return r;
    }

    namespace
    {
        TrainingConfig training_for(const CrbExperiment &cfg)
        {
            TrainingConfig t = cfg.training;
            t.rho = db_to_linear(cfg.rho_db);
            return t;
        }

        // Coherence matrix of the precoded waveform, or nothing when the precoder does not exist
        std::optional<ComplexMatrix> precoded_coherence(Scheme scheme, const CompositeChannel &known,
                                                        const CrbExperiment &cfg, Precoder *keep = nullptr)
        {
            const Index m_r = known.h.cols();
            Precoder pc;
            try
            {
                switch (scheme)
                {
                case Scheme::orthogonal:
                    return ComplexMatrix::Identity(m_r, m_r);
                case Scheme::nsp:
                    pc = nsp_precoder(known);
                    break;
                case Scheme::ssvsp:
                    pc = ssvsp_precoder(known, cfg.sigma_th);
                    break;
                case Scheme::zf:
                    pc = zf_precoder(known.h, cfg.normalize_power);
                    break;
                case Scheme::mmse:
                    pc = mmse_precoder(known.h, known.h.rows(), 1.0 / db_to_linear(cfg.rho_db), cfg.normalize_power);
                    break;
                }
            }
            catch (const EmptyNullSpace &)
            {
                return std::nullopt;
            }
            if (keep)
                *keep = pc;
            return (pc.p * pc.p.adjoint()).eval();
        }
    } // namespace

    std::vector<MetricRecord> crb_experiment(const Scenario &sc, const CrbExperiment &cfg)
    {
        if (cfg.trials < 1)
            throw std::invalid_argument("crb_experiment: trials must be >= 1");
        const TrainingConfig training = training_for(cfg);
        const std::size_t per_row = cfg.degrees ? 2 : 1;
        const std::size_t jobs = cfg.schemes.size() * std::size_t(cfg.trials);
        std::vector<MetricRecord> rows(jobs * per_row);
        const MetricRecord base = base_record(sc, cfg);

        parallel_for(jobs, cfg.threads, [&](std::size_t job) {
            const Scheme scheme = cfg.schemes[job / std::size_t(cfg.trials)];
            const int trial = static_cast<int>(job % std::size_t(cfg.trials));
            const std::uint64_t seed = trial_seed(cfg.seed, trial);

            double crb = std::numeric_limits<double>::infinity();
            const auto r_x = scheme == Scheme::orthogonal
                                 ? std::optional<ComplexMatrix>(ComplexMatrix::Identity(sc.array.m_r, sc.array.m_r))
                                 : precoded_coherence(scheme, trial_channels(sc, scheme, cfg.csi, training, seed).known,
                                                      cfg);
            if (r_x)
                crb = crb_theta({sc.array, *r_x, sc.theta_rad, db_to_linear(cfg.snr_db)});

            MetricRecord r = base;
            r.scheme = to_string(scheme);
            r.trial = trial;
            r.seed = seed;
            r.value_name = "crb_rad2";
            r.value = crb;
            rows[job * per_row] = r;
            if (cfg.degrees)
            {
                r.value_name = "crb_deg2";
                r.value = rad2_to_deg2(crb);
                rows[job * per_row + 1] = r;
            }
        });
        return rows;
    }

    std::vector<MetricRecord> interference_experiment(const Scenario &sc, const CrbExperiment &cfg)
    {
        if (cfg.trials < 1)
            throw std::invalid_argument("interference_experiment: trials must be >= 1");
        const TrainingConfig training = training_for(cfg);
        const std::size_t jobs = cfg.schemes.size() * std::size_t(cfg.trials);
        std::vector<MetricRecord> rows(jobs * 2);
        const MetricRecord base = base_record(sc, cfg);

        parallel_for(jobs, cfg.threads, [&](std::size_t job) {
            const Scheme scheme = cfg.schemes[job / std::size_t(cfg.trials)];
            const int trial = static_cast<int>(job % std::size_t(cfg.trials));
            const std::uint64_t seed = trial_seed(cfg.seed, trial);
            // interference is always measured toward the radar's cluster
            const Scheme channel_scheme = scheme == Scheme::orthogonal ? Scheme::nsp : scheme;
            const auto ch = trial_channels(sc, channel_scheme, cfg.csi, training, seed);

            ComplexMatrix p;
            Precoder pc;
            if (scheme == Scheme::orthogonal)
                p = ComplexMatrix::Identity(sc.array.m_r, sc.array.m_r);
            else if (precoded_coherence(scheme, ch.known, cfg, &pc))
                p = pc.p;
            else
                p = ComplexMatrix::Zero(sc.array.m_r, sc.array.m_r);

            MetricRecord r = base;
            r.scheme = to_string(scheme);
            r.trial = trial;
            r.seed = seed;
            r.value_name = "interference_norm";
            r.value = interference_norm(ch.truth, p);
            rows[job * 2] = r;
            r.value_name = "interference_bs1";
            r.value = (ch.truth.block(0) * p).norm();
            rows[job * 2 + 1] = r;
        });
        return rows;
    }

} // namespace coex
