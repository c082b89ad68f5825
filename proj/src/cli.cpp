#include "coex/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coex
{
    using nlohmann::json;

    // ---------------------------------------------------------------- parsing

    namespace
    {
        class Section
        {
        public:
            Section(const json &root, std::string name) : name_(std::move(name))
            {
                if (!root.contains(name_))
                    return;
                const json &j = root.at(name_);
                if (!j.is_object())
                    throw ConfigError(name_, "section must be an object");
                obj_ = &j;
            }

            bool has(const std::string &key) const { return obj_ && obj_->contains(key); }

            template <typename T>
            std::optional<T> get(const std::string &key) const
            {
                if (!has(key))
                    return std::nullopt;
                used_.insert(key);
                return convert<T>(obj_->at(key), key);
            }

            template <typename T>
            T get_or(const std::string &key, T fallback) const
            {
                return get<T>(key).value_or(fallback);
            }

            template <typename T>
            T require(const std::string &key, const std::string &example) const
            {
                if (!has(key))
                    throw ConfigError(path(key), "missing required key; add e.g. \"" + key + "\": " + example +
                                                     " to the \"" + name_ + "\" section");
                return *get<T>(key);
            }

            // int or list of ints
            std::optional<std::vector<int>> get_int_list(const std::string &key) const
            {
                if (!has(key))
                    return std::nullopt;
                used_.insert(key);
                const json &v = obj_->at(key);
                if (v.is_array())
                {
                    std::vector<int> out;
                    for (const auto &e : v)
                        out.push_back(convert<int>(e, key));
                    return out;
                }
                return std::vector<int>{convert<int>(v, key)};
            }

            std::optional<std::vector<double>> get_real_list(const std::string &key) const
            {
                if (!has(key))
                    return std::nullopt;
                used_.insert(key);
                const json &v = obj_->at(key);
                if (!v.is_array())
                    return std::vector<double>{convert<double>(v, key)};
                std::vector<double> out;
                for (const auto &e : v)
                    out.push_back(convert<double>(e, key));
                return out;
            }

            std::optional<std::vector<std::string>> get_string_list(const std::string &key) const
            {
                if (!has(key))
                    return std::nullopt;
                used_.insert(key);
                const json &v = obj_->at(key);
                if (!v.is_array())
                    return std::vector<std::string>{convert<std::string>(v, key)};
                std::vector<std::string> out;
                for (const auto &e : v)
                    out.push_back(convert<std::string>(e, key));
                return out;
            }

            void reject_unknown() const
            {
                if (!obj_)
                    return;
                for (auto it = obj_->begin(); it != obj_->end(); ++it)
                    if (!used_.count(it.key()))
                        throw ConfigError(path(it.key()), "unknown key; remove it or check its spelling");
            }

            std::string path(const std::string &key) const { return name_ + "." + key; }

        private:
            template <typename T>
            T convert(const json &v, const std::string &key) const
            {
                if constexpr (std::is_same_v<T, bool>)
                {
                    if (!v.is_boolean())
                        throw ConfigError(path(key), "expected true or false");
                    return v.get<bool>();
                }
                else if constexpr (std::is_integral_v<T>)
                {
                    if (!v.is_number_integer())
                        throw ConfigError(path(key), "expected an integer");
                    if constexpr (std::is_unsigned_v<T>)
                        if (v.is_number_unsigned() || v.get<long long>() >= 0)
                            return static_cast<T>(v.get<unsigned long long>());
                    return static_cast<T>(v.get<long long>());
                }
                else if constexpr (std::is_floating_point_v<T>)
                {
                    if (!v.is_number())
                        throw ConfigError(path(key), "expected a number");
                    return v.get<T>();
                }
                else
                {
                    if (!v.is_string())
                        throw ConfigError(path(key), "expected a string");
                    return v.get<std::string>();
                }
            }

            std::string name_;
            const json *obj_ = nullptr;
            mutable std::set<std::string> used_;
        };

        const std::set<std::string> kSchemeNames{"orthogonal", "nsp", "ssvsp", "snsp", "sssvsp", "zf", "mmse"};
    } // namespace

    RunConfig parse_config(std::string_view text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
        }
        if (!root.is_object())
            throw ConfigError("", "config must be a JSON object with sections");

        static const std::set<std::string> sections{"scenario", "estimation", "precoding", "metrics", "run"};
        for (auto it = root.begin(); it != root.end(); ++it)
            if (!sections.count(it.key()))
                throw ConfigError(it.key(), "unknown section; expected scenario, estimation, precoding, metrics or run");

        RunConfig cfg;

        const Section sc(root, "scenario");
        auto &s = cfg.scenario;
        s.m_r = sc.require<Index>("m_r", "100");
        if (!sc.has("n_bs"))
            throw ConfigError("scenario.n_bs", "missing required key; add e.g. \"n_bs\": 8 to the \"scenario\" section");
        s.n_bs = *sc.get_int_list("n_bs");
        s.m_k = sc.require<int>("m_k", "3");
        s.c_t = sc.get_or<int>("c_t", s.n_bs.size() > 1 ? static_cast<int>(s.n_bs.size()) : 1);
        s.m = sc.get_or<int>("m", s.m_k * s.c_t);
        s.carrier_hz = sc.get_or<double>("carrier_hz", s.carrier_hz);
        s.spacing_lambda = sc.get_or<double>("spacing_lambda", s.spacing_lambda);
        s.theta_deg = sc.get_or<double>("theta_deg", s.theta_deg);
        s.r0_km = sc.get_or<double>("r0_km", s.r0_km);
        sc.reject_unknown();

        const Section es(root, "estimation");
        auto &e = cfg.estimation;
        e.l_t = es.get<Index>("l_t");
        e.rho_db = es.get_or<double>("rho_db", e.rho_db);
        e.noiseless = es.get_or<bool>("noiseless", e.noiseless);
        if (auto csi = es.get<std::string>("csi"))
        {
            if (*csi == "true")
                e.csi = CsiKind::true_csi;
            else if (*csi == "estimated")
                e.csi = CsiKind::estimated_csi;
            else
                throw ConfigError("estimation.csi", "expected \"true\" or \"estimated\", got \"" + *csi + "\"");
        }
        es.reject_unknown();

        const Section pr(root, "precoding");
        auto &p = cfg.precoding;
        if (auto names = pr.get_string_list("scheme"))
        {
            for (const auto &n : *names)
                if (!kSchemeNames.count(n))
                    throw ConfigError("precoding.scheme", "unknown scheme \"" + n +
                                                              "\"; expected orthogonal, nsp, ssvsp, snsp, sssvsp, zf or mmse");
            p.schemes = *names;
        }
        p.sigma_th_rel = pr.get<double>("sigma_th_rel");
        p.sigma_th_abs = pr.get<double>("sigma_th_abs");
        p.normalize_power = pr.get_or<bool>("normalize_power", p.normalize_power);
        p.waveform_len = pr.get_or<Index>("waveform_len", p.waveform_len);
        pr.reject_unknown();

        const Section me(root, "metrics");
        auto &m = cfg.metrics;
        m.snr_db = me.get_or<double>("snr_db", m.snr_db);
        m.trials = me.get_or<int>("trials", m.trials);
        m.n_symbols = me.get_or<Index>("n_symbols", m.n_symbols);
        if (auto grid = me.get_real_list("rho_db_grid"))
            m.rho_db_grid = *grid;
        m.degrees = me.get_or<bool>("degrees", m.degrees);
        me.reject_unknown();

        const Section ru(root, "run");
        auto &r = cfg.run;
        r.seed = ru.get_or<std::uint64_t>("seed", r.seed);
        r.parallelism = ru.get_or<int>("parallelism", r.parallelism);
        r.output = ru.get_or<std::string>("output", r.output);
        r.pris = ru.get_or<int>("pris", r.pris);
        r.redraw_channels = ru.get_or<bool>("redraw_channels", r.redraw_channels);
        ru.reject_unknown();

        cfg.validate();
        return cfg;
    }

    RunConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_config(buf.str());
    }

    int RunConfig::max_n_bs() const
    {
        return scenario.n_bs.empty() ? 0 : *std::max_element(scenario.n_bs.begin(), scenario.n_bs.end());
    }

    void RunConfig::validate() const
    {
        const auto &s = scenario;
        if (s.m_r < 2)
            throw ConfigError("scenario.m_r", "must be >= 2");
        if (s.n_bs.empty())
            throw ConfigError("scenario.n_bs", "must not be empty");
        for (int n : s.n_bs)
            if (n < 1)
                throw ConfigError("scenario.n_bs", "every entry must be >= 1");
        if (s.m_k < 1)
            throw ConfigError("scenario.m_k", "must be >= 1");
        if (s.c_t < 1)
            throw ConfigError("scenario.c_t", "must be >= 1");
        if (s.n_bs.size() > 1 && static_cast<int>(s.n_bs.size()) != s.c_t)
            throw ConfigError("scenario.n_bs", "per-cluster list has " + std::to_string(s.n_bs.size()) +
                                                   " entries but c_t = " + std::to_string(s.c_t));
        if (s.m < s.m_k * s.c_t)
            throw ConfigError("scenario.m", "must be >= m_k * c_t = " + std::to_string(s.m_k * s.c_t));
        if (!(s.carrier_hz > 0.0))
            throw ConfigError("scenario.carrier_hz", "must be > 0");
        if (!(s.spacing_lambda > 0.0))
            throw ConfigError("scenario.spacing_lambda", "must be > 0");
        if (!(std::abs(s.theta_deg) <= 90.0))
            throw ConfigError("scenario.theta_deg", "must lie in [-90, 90]");

        const Index cluster_streams = Index(s.m_k) * max_n_bs();
        if (estimation.l_t && *estimation.l_t < cluster_streams)
            throw ConfigError("estimation.l_t", "training length " + std::to_string(*estimation.l_t) +
                                                    " is shorter than m_k * n_bs = " + std::to_string(cluster_streams) +
                                                    "; raise l_t to at least " + std::to_string(cluster_streams));

        if (precoding.sigma_th_rel && precoding.sigma_th_abs)
            throw ConfigError("precoding.sigma_th_rel", "sigma_th_rel and sigma_th_abs are mutually exclusive; keep one");
        if (precoding.sigma_th_rel && !(*precoding.sigma_th_rel >= 0.0))
            throw ConfigError("precoding.sigma_th_rel", "must be >= 0");
        if (precoding.sigma_th_abs && !(*precoding.sigma_th_abs >= 0.0))
            throw ConfigError("precoding.sigma_th_abs", "must be >= 0");
        if (precoding.waveform_len < s.m_r)
            throw ConfigError("precoding.waveform_len", "must be >= m_r = " + std::to_string(s.m_r));

        if (metrics.trials < 1)
            throw ConfigError("metrics.trials", "must be >= 1");
        if (metrics.n_symbols < 1)
            throw ConfigError("metrics.n_symbols", "must be >= 1");
        if (metrics.rho_db_grid.empty())
            throw ConfigError("metrics.rho_db_grid", "must not be empty");
        if (run.parallelism < 0)
            throw ConfigError("run.parallelism", "must be >= 0");
        if (run.pris < 1)
            throw ConfigError("run.pris", "must be >= 1");
    }

    SigmaThreshold RunConfig::sigma_threshold() const
    {
        if (precoding.sigma_th_abs)
            return SigmaThreshold::absolute(*precoding.sigma_th_abs);
        return SigmaThreshold::relative(precoding.sigma_th_rel.value_or(0.6));
    }

    Scenario RunConfig::build_scenario() const
    {
        Scenario sc;
        sc.array.m_r = scenario.m_r;
        sc.array.spacing_wavelengths = scenario.spacing_lambda;
        sc.array.carrier_hz = scenario.carrier_hz;
        sc.theta_rad = scenario.theta_deg * std::numbers::pi / 180.0;
        sc.r0_m = scenario.r0_km * 1000.0;

        std::vector<int> per_cluster = scenario.n_bs;
        if (per_cluster.size() == 1)
            per_cluster.assign(static_cast<std::size_t>(scenario.c_t), scenario.n_bs.front());

        std::vector<int> antennas;
        std::vector<std::vector<int>> clusters;
        for (int n : per_cluster)
        {
            std::vector<int> members;
            for (int j = 0; j < scenario.m_k; ++j)
            {
                antennas.push_back(n);
                members.push_back(static_cast<int>(antennas.size()));
            }
            clusters.push_back(std::move(members));
        }
        // BSs outside every cluster take part in cooperation only
        while (static_cast<int>(antennas.size()) < scenario.m)
            antennas.push_back(scenario.n_bs.front());
        sc.topology = CompTopology(std::move(antennas), std::move(clusters));
        return sc;
    }

    // ---------------------------------------------------------------- sweeps

    namespace
    {
        const std::set<std::string> kIntegerKeys{"m_r", "n_bs", "m_k", "c_t", "m", "l_t", "trials"};
        const std::set<std::string> kRealKeys{"rho_db", "snr_db", "sigma_th_rel", "sigma_th_abs", "theta_deg"};

        double parse_number(std::string_view s, std::string_view what)
        {
            double v = 0.0;
            std::string tmp(s);
            std::size_t used = 0;
            try
            {
                v = std::stod(tmp, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != tmp.size())
                throw ConfigError("--sweep", "cannot parse " + std::string(what) + " '" + tmp + "'");
            return v;
        }
    } // namespace

    SweepAxis parse_sweep(std::string_view spec)
    {
        const auto eq = spec.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("--sweep", "expected key=start:stop:step, got '" + std::string(spec) + "'");
        SweepAxis axis;
        axis.key = std::string(spec.substr(0, eq));
        if (!kIntegerKeys.count(axis.key) && !kRealKeys.count(axis.key))
            throw ConfigError("--sweep", "unknown sweep key '" + axis.key + "'");

        std::vector<std::string_view> parts;
        std::string_view rest = spec.substr(eq + 1);
        for (std::size_t at; (at = rest.find(':')) != std::string_view::npos; rest = rest.substr(at + 1))
            parts.push_back(rest.substr(0, at));
        parts.push_back(rest);
        if (parts.size() != 3)
            throw ConfigError("--sweep", "expected key=start:stop:step, got '" + std::string(spec) + "'");

        const double start = parse_number(parts[0], "start");
        const double stop = parse_number(parts[1], "stop");
        const double step = parse_number(parts[2], "step");
        if (!(step > 0.0))
            throw ConfigError("--sweep", "step must be > 0");
        if (stop < start)
            throw ConfigError("--sweep", "stop must be >= start");
        if (kIntegerKeys.count(axis.key))
            for (double v : {start, stop, step})
                if (v != std::floor(v))
                    throw ConfigError("--sweep", "'" + axis.key + "' takes integer values");

        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i)
            axis.values.push_back(start + double(i) * step);
        return axis;
    }

    RunConfig apply_override(const RunConfig &cfg, const std::string &key, double value)
    {
        RunConfig out = cfg;
        const auto as_int = [&] { return static_cast<int>(std::lround(value)); };
        if (key == "m_r")
            out.scenario.m_r = as_int();
        else if (key == "n_bs")
            out.scenario.n_bs.assign(out.scenario.n_bs.size() > 1 ? out.scenario.n_bs.size() : 1, as_int());
        else if (key == "m_k")
        {
            const bool default_m = out.scenario.m == cfg.scenario.m_k * cfg.scenario.c_t;
            out.scenario.m_k = as_int();
            if (default_m)
                out.scenario.m = out.scenario.m_k * out.scenario.c_t;
        }
        else if (key == "c_t")
        {
            const bool default_m = out.scenario.m == cfg.scenario.m_k * cfg.scenario.c_t;
            out.scenario.c_t = as_int();
            if (out.scenario.n_bs.size() > 1)
                throw ConfigError("--sweep", "c_t cannot be swept with a per-cluster n_bs list");
            if (default_m)
                out.scenario.m = out.scenario.m_k * out.scenario.c_t;
        }
        else if (key == "m")
            out.scenario.m = as_int();
        else if (key == "l_t")
            out.estimation.l_t = as_int();
        else if (key == "trials")
            out.metrics.trials = as_int();
        else if (key == "rho_db")
            out.estimation.rho_db = value;
        else if (key == "snr_db")
            out.metrics.snr_db = value;
        else if (key == "sigma_th_rel")
        {
            out.precoding.sigma_th_abs.reset();
            out.precoding.sigma_th_rel = value;
        }
        else if (key == "sigma_th_abs")
        {
            out.precoding.sigma_th_rel.reset();
            out.precoding.sigma_th_abs = value;
        }
        else if (key == "theta_deg")
            out.scenario.theta_deg = value;
        else
            throw ConfigError("--sweep", "unknown sweep key '" + key + "'");
        if (out.precoding.waveform_len < out.scenario.m_r)
            out.precoding.waveform_len = out.scenario.m_r;
        out.validate();
        return out;
    }

    std::vector<RunConfig> expand_grid(const RunConfig &cfg, const std::vector<SweepAxis> &axes)
    {
        std::vector<RunConfig> grid{cfg};
        for (const auto &axis : axes)
        {
            std::vector<RunConfig> next;
            for (const auto &g : grid)
                for (double v : axis.values)
                    next.push_back(apply_override(g, axis.key, v));
            grid = std::move(next);
        }
        return grid;
    }

    // ---------------------------------------------------------------- subcommands

    namespace
    {
        std::vector<std::string> schemes_or(const RunConfig &cfg, std::vector<std::string> fallback,
                                            const std::set<std::string> &allowed, std::string_view sub)
        {
            auto names = cfg.precoding.schemes.empty() ? std::move(fallback) : cfg.precoding.schemes;
            for (const auto &n : names)
                if (!allowed.count(n))
                    throw ConfigError("precoding.scheme", "scheme '" + n + "' is not available in " + std::string(sub));
            return names;
        }

        Scheme scheme_from(const std::string &name)
        {
            static const std::map<std::string, Scheme> m{{"orthogonal", Scheme::orthogonal},
                                                          {"nsp", Scheme::nsp},
                                                          {"ssvsp", Scheme::ssvsp},
                                                          {"zf", Scheme::zf},
                                                          {"mmse", Scheme::mmse}};
            return m.at(name);
        }

        bool uses_network(const std::vector<Scheme> &schemes)
        {
            return std::any_of(schemes.begin(), schemes.end(),
                               [](Scheme s) { return s == Scheme::zf || s == Scheme::mmse; });
        }

        // training length for the largest trained channel of this grid point
        Index training_length(const RunConfig &cfg, const Scenario &sc, bool network)
        {
            Index streams = 0;
            if (network)
                streams = sc.topology.total_rows();
            else
                for (int c = 1; c <= sc.topology.c_t(); ++c)
                    streams = std::max(streams, sc.topology.cluster_rows(c));
            if (!cfg.estimation.l_t)
                return 2 * streams;
            if (*cfg.estimation.l_t < streams && cfg.estimation.csi == CsiKind::estimated_csi)
                throw ConfigError("estimation.l_t", "training length " + std::to_string(*cfg.estimation.l_t) +
                                                        " is shorter than the " + std::to_string(streams) +
                                                        " trained streams; raise l_t to at least " +
                                                        std::to_string(streams));
            return *cfg.estimation.l_t;
        }

        CrbExperiment experiment_config(const RunConfig &cfg, const Scenario &sc, std::string name,
                                        std::vector<Scheme> schemes)
        {
            CrbExperiment ex;
            ex.experiment = std::move(name);
            ex.csi = cfg.estimation.csi;
            ex.training.l_t = training_length(cfg, sc, uses_network(schemes));
            ex.training.noiseless = cfg.estimation.noiseless;
            ex.rho_db = cfg.estimation.rho_db;
            ex.sigma_th = cfg.sigma_threshold();
            ex.snr_db = cfg.metrics.snr_db;
            ex.normalize_power = cfg.precoding.normalize_power;
            ex.degrees = cfg.metrics.degrees;
            ex.trials = cfg.metrics.trials;
            ex.seed = cfg.run.seed;
            ex.threads = cfg.run.parallelism;
            ex.schemes = std::move(schemes);
            return ex;
        }

        std::vector<Scheme> to_schemes(const std::vector<std::string> &names)
        {
            std::vector<Scheme> out;
            for (const auto &n : names)
                out.push_back(scheme_from(n));
            return out;
        }

        void append(std::vector<MetricRecord> &dst, std::vector<MetricRecord> src)
        {
            dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
        }

        std::vector<MetricRecord> crb_sweep(const RunConfig &cfg)
        {
            const auto names = schemes_or(cfg, {"orthogonal", "nsp", "ssvsp"},
                                          {"orthogonal", "nsp", "ssvsp", "zf", "mmse"}, "crb-sweep");
            const Scenario sc = cfg.build_scenario();
            return crb_experiment(sc, experiment_config(cfg, sc, "crb-sweep", to_schemes(names)));
        }

        std::vector<MetricRecord> interference_sweep(const RunConfig &cfg)
        {
            const auto names = schemes_or(cfg, {"nsp", "ssvsp"}, {"orthogonal", "nsp", "ssvsp", "zf", "mmse"},
                                          "interference-sweep");
            const Scenario sc = cfg.build_scenario();
            return interference_experiment(sc, experiment_config(cfg, sc, "interference-sweep", to_schemes(names)));
        }

        PriConfig pri_config(const RunConfig &cfg, const Scenario &sc, SelectionScheme scheme)
        {
            PriConfig pc;
            pc.pris = cfg.run.pris;
            pc.scheme = scheme;
            pc.sigma_th = cfg.sigma_threshold();
            pc.training.l_t = training_length(cfg, sc, false);
            pc.training.rho = db_to_linear(cfg.estimation.rho_db);
            pc.training.noiseless = cfg.estimation.noiseless;
            pc.estimate = cfg.estimation.csi == CsiKind::estimated_csi;
            pc.redraw_channels = cfg.run.redraw_channels;
            pc.waveform_len = std::max(cfg.precoding.waveform_len, sc.array.m_r);
            pc.seed = cfg.run.seed;
            return pc;
        }

        SelectionScheme selection_from(const std::string &name)
        {
            return name == "snsp" ? SelectionScheme::snsp : SelectionScheme::sssvsp;
        }

        double crb_of(const Scenario &sc, const Precoder &pc, double snr_db)
        {
            if (pc.p.size() == 0 || pc.subspace_rank == 0)
                return std::numeric_limits<double>::infinity();
            return crb_theta({sc.array, pc.p * pc.p.adjoint(), sc.theta_rad, db_to_linear(snr_db)});
        }

        // precoder of the given scheme on one cluster's estimate; empty subspace maps to a zero precoder
        Precoder cluster_precoder(SelectionScheme scheme, const CompositeChannel &ch, SigmaThreshold th)
        {
            try
            {
                return scheme == SelectionScheme::snsp ? nsp_precoder(ch) : ssvsp_precoder(ch, th);
            }
            catch (const EmptyNullSpace &)
            {
                Precoder none;
                none.p = ComplexMatrix::Zero(ch.h.cols(), ch.h.cols());
                return none;
            }
        }

        std::vector<MetricRecord> selection_demo(const RunConfig &cfg, bool trace_only)
        {
            const auto names = schemes_or(cfg, trace_only ? std::vector<std::string>{"snsp"}
                                                          : std::vector<std::string>{"snsp", "sssvsp"},
                                          {"snsp", "sssvsp"}, trace_only ? "pri-demo" : "selection-demo");
            const Scenario sc = cfg.build_scenario();
            CrbExperiment ex = experiment_config(cfg, sc, trace_only ? "pri-demo" : "selection-demo", {});
            std::vector<MetricRecord> rows;

            for (const auto &name : names)
            {
                const SelectionScheme scheme = selection_from(name);
                const PriConfig pc = pri_config(cfg, sc, scheme);
                const PriRun run = run_pri_cycle(sc, pc);
                MetricRecord base = base_record(sc, ex);
                base.seed = pc.seed;

                for (std::size_t k = 0; k < run.selections.size(); ++k)
                {
                    const auto &sel = run.selections[k];
                    const auto &coop = run.trace[2 * k];
                    const auto &est = run.trace[2 * k + 1].channel_estimates;
                    const auto &truth = run.true_channels[k];
                    const auto best = static_cast<std::size_t>(sel.best_index - 1);
                    const auto worst = static_cast<std::size_t>(sel.worst_index - 1);

                    auto emit = [&](const std::string &scheme_col, const std::string &value_name, double value) {
                        MetricRecord r = base;
                        r.scheme = scheme_col;
                        r.trial = static_cast<int>(k) + 1;
                        r.value_name = value_name;
                        r.value = value;
                        rows.push_back(std::move(r));
                    };

                    if (trace_only)
                    {
                        emit(to_string(PriMode::cooperation), "estimated_clusters", double(coop.channel_estimates.size()));
                        emit(to_string(PriMode::cooperation), "coop_streams",
                             coop.coop_precoder ? double(coop.coop_precoder->p.cols()) : 0.0);
                        emit(name, "best_index", sel.best_index);
                        emit(name, "worst_index", sel.worst_index);
                        emit(name, "best_score", sel.scores[best]);
                        emit(name, "interference_norm", interference_norm(truth[best], sel.chosen_precoder.p));
                        continue;
                    }

                    const Precoder worst_pc = cluster_precoder(scheme, est[worst], pc.sigma_th);
                    emit(name, "best_index", sel.best_index);
                    emit(name, "worst_index", sel.worst_index);
                    emit(name, "crb_best_rad2", crb_of(sc, sel.chosen_precoder, cfg.metrics.snr_db));
                    emit(name, "crb_worst_rad2", crb_of(sc, worst_pc, cfg.metrics.snr_db));
                    emit(name, "interference_best", interference_norm(truth[best], sel.chosen_precoder.p));
                }
            }
            return rows;
        }

        std::vector<MetricRecord> coop_ber_run(const RunConfig &cfg)
        {
            const auto names = schemes_or(cfg, {"zf", "mmse"}, {"zf", "mmse"}, "coop-ber");
            const Scenario sc = cfg.build_scenario();
            CrbExperiment ex = experiment_config(cfg, sc, "coop-ber", to_schemes(names));
            TrainingConfig training = ex.training;
            training.rho = db_to_linear(ex.rho_db);

            const auto &grid = cfg.metrics.rho_db_grid;
            const std::size_t trials = std::size_t(ex.trials);
            // [scheme][trial] -> per-grid BER
            std::vector<std::vector<std::vector<BerPoint>>> res(names.size(),
                                                                std::vector<std::vector<BerPoint>>(trials));
            parallel_for(trials, ex.threads, [&](std::size_t t) {
                const std::uint64_t seed = trial_seed(ex.seed, static_cast<int>(t));
                const auto ch = trial_channels(sc, Scheme::zf, ex.csi, training, seed);
                for (std::size_t s = 0; s < names.size(); ++s)
                {
                    const PrecoderKind kind = names[s] == "zf" ? PrecoderKind::zf : PrecoderKind::mmse;
                    res[s][t] = coop_ber(ch.truth.h, ch.known.h, kind, grid, cfg.metrics.n_symbols, seed,
                                         ex.normalize_power);
                }
            });

            std::vector<MetricRecord> rows;
            MetricRecord base = base_record(sc, ex);
            for (std::size_t s = 0; s < names.size(); ++s)
                for (std::size_t g = 0; g < grid.size(); ++g)
                    for (std::size_t t = 0; t < trials; ++t)
                    {
                        MetricRecord r = base;
                        r.scheme = names[s];
                        r.rho_db = grid[g];
                        r.trial = static_cast<int>(t);
                        r.seed = trial_seed(ex.seed, static_cast<int>(t));
                        r.value_name = "ber";
                        r.value = res[s][t][g].ber();
                        rows.push_back(std::move(r));
                    }
            return rows;
        }
    } // namespace

    std::vector<MetricRecord> run_subcommand(std::string_view name, const RunConfig &cfg,
                                             const std::vector<SweepAxis> &axes)
    {
        std::vector<MetricRecord> rows;
        for (const auto &point : expand_grid(cfg, axes))
        {
            if (name == "crb-sweep")
                append(rows, crb_sweep(point));
            else if (name == "interference-sweep")
                append(rows, interference_sweep(point));
            else if (name == "selection-demo")
                append(rows, selection_demo(point, false));
            else if (name == "pri-demo")
                append(rows, selection_demo(point, true));
            else if (name == "coop-ber")
                append(rows, coop_ber_run(point));
            else
                throw ConfigError("", "unknown subcommand '" + std::string(name) + "'");
        }
        return rows;
    }

} // namespace coex
