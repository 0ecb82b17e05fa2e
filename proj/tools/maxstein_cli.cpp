// Command-line driver: sampling, CDF evaluation, semigroup and Stein checks,
// law distances, bound constants, and truncation-rate experiments. Every
// subcommand is a pure function of its configuration and seed; outputs are
// CSV with a '# meta:' header echoing the full configuration.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maxstein/maxstein.hpp"

namespace {

using namespace maxstein;

constexpr const char* kVersion = "0.1.0";

Vec parse_vector(const std::string& csv) {
    Vec out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("empty vector argument");
    return out;
}

// "8:512:geometric" or a plain comma list "8,16,32".
std::vector<std::size_t> parse_grid(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string lo_s, hi_s, kind;
        std::getline(ss, lo_s, ':');
        std::getline(ss, hi_s, ':');
        std::getline(ss, kind, ':');
        if (kind != "geometric" && !kind.empty())
            throw CLI::ValidationError("grid kind must be 'geometric'");
        return geometric_grid(std::stoull(lo_s), std::stoull(hi_s));
    }
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoull(item));
    if (out.empty()) throw CLI::ValidationError("empty grid argument");
    return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_doubles(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_full(v[i]);
    return s;
}

MaxStableLaw load_law_checked(const std::string& path,
                              std::optional<double> alpha_override,
                              double moment_tol = 1e-9) {
    MaxStableLaw law = load_law(path);
    if (alpha_override) law = MaxStableLaw(*alpha_override, law.angular());
    if (!law.angular().satisfies_moment_constraints(moment_tol)) {
        throw std::runtime_error("law file " + path +
                                 ": angular measure violates the marginal "
                                 "moment constraints (tolerance " +
                                 format_full(moment_tol) + ")");
    }
    return law;
}

void emit(const ExperimentReport& report, const std::string& out_path) {
    if (out_path.empty())
        report.write(std::cout);
    else
        report.write(out_path);
}

struct CommonArgs {
    std::string law_path;
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_path;
};

int run_sample(const CommonArgs& c, std::size_t n, const std::string& method,
               std::size_t trunc, std::size_t stream) {
    MaxStableLaw law = load_law_checked(c.law_path, c.alpha);
    const std::size_t d = law.dimension();
    ExperimentReport rep;
    rep.add_meta("command", std::string("sample"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law", c.law_path);
    rep.add_meta("alpha", law.alpha());
    rep.add_meta("n", static_cast<std::uint64_t>(n));
    rep.add_meta("seed", c.seed);
    rep.add_meta("stream", static_cast<std::uint64_t>(stream));
    rep.add_meta("method", method);
    for (std::size_t j = 0; j < d; ++j)
        rep.columns.push_back("z" + std::to_string(j + 1));

    if (method == "exact") {
        const std::vector<double> draws =
            sample_exact(law, RngStream(c.seed, stream), n);
        for (std::size_t i = 0; i < n; ++i)
            rep.add_row(Vec(draws.begin() + i * d, draws.begin() + (i + 1) * d));
    } else if (method == "lepage") {
        rep.add_meta("trunc", static_cast<std::uint64_t>(trunc));
        const std::vector<double> draws = sample_partial_maxima(
            law, {trunc}, trunc, RngStream(c.seed, stream), n, c.threads);
        for (std::size_t i = 0; i < n; ++i)
            rep.add_row(Vec(draws.begin() + i * d, draws.begin() + (i + 1) * d));
    } else {
        throw CLI::ValidationError("method must be exact or lepage");
    }
    emit(rep, c.out_path);
    return 0;
}

int run_cdf(const CommonArgs& c, const std::string& z_csv) {
    MaxStableLaw law = load_law_checked(c.law_path, c.alpha);
    const Vec z = parse_vector(z_csv);
    if (z.size() != law.dimension())
        throw std::runtime_error("--z dimension does not match the law");
    std::printf("%.7g\n", cdf(law, z));
    return 0;
}

int run_semigroup(const CommonArgs& c, double t, const std::string& x_csv,
                  const std::string& z_csv, bool use_bank, std::size_t reps) {
    MaxStableLaw law = load_law_checked(c.law_path, c.alpha);
    const Vec x = parse_vector(x_csv);
    if (x.size() != law.dimension())
        throw std::runtime_error("--x dimension does not match the law");
    const RngStream rng(c.seed, 0);

    ExperimentReport rep;
    rep.add_meta("command", std::string("semigroup"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law", c.law_path);
    rep.add_meta("alpha", law.alpha());
    rep.add_meta("t", t);
    rep.add_meta("x", join_doubles(x));
    rep.add_meta("reps", static_cast<std::uint64_t>(reps));
    rep.add_meta("seed", c.seed);

    if (!z_csv.empty()) {
        const Vec z = parse_vector(z_csv);
        if (z.size() != law.dimension())
            throw std::runtime_error("--indicator dimension does not match the law");
        rep.add_meta("indicator", join_doubles(z));
        rep.columns = {"estimator", "estimate", "std_error"};
        auto h = [&z](const double* y, std::size_t d) {
            for (std::size_t j = 0; j < d; ++j)
                if (y[j] > z[j]) return 0.0;
            return 1.0;
        };
        const Estimate mc = semigroup_mc(law, t, x, h, rng, reps, c.threads);
        const ChaosEstimate chaos =
            semigroup_chaos(law, t, x, h, rng.substream(1u << 30), reps,
                            c.threads);
        const double closed = semigroup_indicator(law, t, x, z);
        rep.rows.push_back({"mc", format_full(mc.value),
                            format_full(mc.std_error)});
        rep.rows.push_back({"chaos", format_full(chaos.value),
                            format_full(chaos.std_error)});
        rep.rows.push_back({"closed_form", format_full(closed), "0"});
    } else if (use_bank) {
        rep.add_meta("bank", std::string("smooth"));
        rep.columns = {"function", "estimate", "std_error"};
        TestFunctionBank bank = make_smooth_bank(law.dimension());
        for (const TestFunction& f : bank.members) {
            auto h = [&f](const double* y, std::size_t d) {
                return f.value(y, d);
            };
            const Estimate e = semigroup_mc(law, t, x, h, rng, reps, c.threads);
            rep.rows.push_back({f.name, format_full(e.value),
                                format_full(e.std_error)});
        }
    } else {
        throw CLI::ValidationError("semigroup needs --indicator or --bank");
    }
    emit(rep, c.out_path);
    return 0;
}

int run_stein_check(const CommonArgs& c, const std::string& mode,
                    const std::string& z_csv, std::size_t points, double tol) {
    MaxStableLaw law = load_law_checked(c.law_path, c.alpha);
    const std::size_t d = law.dimension();
    const RngStream rng(c.seed, 0);

    ExperimentReport rep;
    rep.add_meta("command", std::string("stein-check"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law", c.law_path);
    rep.add_meta("alpha", law.alpha());
    rep.add_meta("mode", mode);
    rep.add_meta("points", static_cast<std::uint64_t>(points));
    rep.add_meta("seed", c.seed);

    bool failed = false;
    if (mode == "indicator") {
        Vec z(d, 1.0);
        if (!z_csv.empty()) z = parse_vector(z_csv);
        if (z.size() != d)
            throw std::runtime_error("--z dimension does not match the law");
        rep.add_meta("z", join_doubles(z));
        rep.add_meta("tolerance", tol);
        rep.columns = {"point", "residual"};
        IndicatorSolution sol(law, z);
        ExactSampler sampler(law);
        RngStream stream = rng;
        double max_resid = 0;
        Vec x(d);
        for (std::size_t i = 0; i < points; ++i) {
            sampler.draw(stream, x.data());
            // coordinatewise jitter so comonotone laws still produce points
            // with a unique maximizer of x^j/z^j
            for (double& c : x)
                c *= std::exp(0.6 * (stream.next_double() - 0.5));
            double r;
            try {
                r = sol.stein_residual(x);
            } catch (const std::domain_error&) {
                continue;  // tied maximizer or boundary: out of domain
            }
            max_resid = std::max(max_resid, std::abs(r));
            rep.add_row({static_cast<double>(i), r});
        }
        rep.add_meta("max_residual", max_resid);
        failed = max_resid > tol;
    } else if (mode == "smooth") {
        rep.add_meta("bank", std::string("smooth"));
        rep.add_meta("threshold_se", 4.0);
        rep.columns = {"function", "mean", "std_error", "abs_mean_over_se"};
        TestFunctionBank bank = make_smooth_bank(d);
        const std::vector<SteinIdentityRow> rows =
            stein_identity_check(law, bank, rng, points, c.threads);
        for (const SteinIdentityRow& r : rows) {
            const double ratio =
                r.std_error > 0 ? std::abs(r.mean) / r.std_error : 0.0;
            rep.rows.push_back({r.function, format_full(r.mean),
                                format_full(r.std_error), format_full(ratio)});
            if (std::abs(r.mean) > 4.0 * r.std_error) failed = true;
        }
    } else {
        throw CLI::ValidationError("mode must be indicator or smooth");
    }
    emit(rep, c.out_path);
    return failed ? 1 : 0;
}

int run_law_distance(const std::string& law1_path, const std::string& law2_path,
                     const std::string& metric, std::size_t nodes, int depth,
                     std::size_t reps, const CommonArgs& c) {
    MaxStableLaw l1 = load_law_checked(law1_path, std::nullopt);
    MaxStableLaw l2 = load_law_checked(law2_path, std::nullopt);
    if (l1.dimension() != l2.dimension())
        throw std::runtime_error("laws have different dimensions");
    const std::size_t d = l1.dimension();

    ExperimentReport rep;
    rep.add_meta("command", std::string("law-distance"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law1", law1_path);
    rep.add_meta("law2", law2_path);
    rep.add_meta("metric", metric);
    rep.add_meta("seed", c.seed);

    if (metric == "kolmogorov") {
        GridSpec grid;
        grid.nodes_per_axis = nodes;
        grid.refinement_depth = depth;
        rep.add_meta("nodes", static_cast<std::uint64_t>(nodes));
        rep.add_meta("depth", static_cast<std::uint64_t>(depth));
        rep.add_meta("note",
                     std::string("grid supremum: lower bound on d_K"));
        const KolmogorovResult res = kolmogorov_between_laws(l1, l2, grid);
        rep.columns = {"quantity", "value"};
        rep.rows.push_back({"d_K_lower_bound", format_full(res.value)});
        rep.rows.push_back({"argmax", join_doubles(res.argmax)});
    } else if (metric == "wasserstein" || metric == "d2") {
        rep.add_meta("reps", static_cast<std::uint64_t>(reps));
        rep.add_meta("note", std::string("bank supremum: lower bound on the "
                                         "integral probability metric"));
        TestFunctionBank bank =
            metric == "d2" ? make_d2_bank(d) : make_smooth_bank(d);
        if (!certify_bank(bank, d, RngStream(17, 0)))
            throw std::runtime_error("bank failed Lipschitz certification");
        const std::vector<double> s1 =
            sample_exact(l1, RngStream(c.seed, 0), reps);
        const std::vector<double> s2 =
            sample_exact(l2, RngStream(c.seed, 1u << 20), reps);
        const IpmResult res = ipm_lower_bound(s1, s2, d, bank);
        rep.columns = {"function", "gap", "std_error"};
        for (const IpmRow& row : res.table)
            rep.rows.push_back({row.function, format_full(row.gap),
                                format_full(row.std_error)});
        rep.rows.push_back({"max_abs_gap", format_full(res.value),
                            format_full(res.std_error)});
    } else {
        throw CLI::ValidationError("metric must be kolmogorov, wasserstein or d2");
    }
    emit(rep, c.out_path);
    return 0;
}

int run_constants(const CommonArgs& c, double alpha1, double alpha2,
                  const std::string& metric) {
    MaxStableLaw law = load_law_checked(c.law_path, std::nullopt);
    ExperimentReport rep;
    rep.add_meta("command", std::string("constants"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law", c.law_path);
    rep.add_meta("alpha1", alpha1);
    rep.add_meta("alpha2", alpha2);
    rep.add_meta("metric", metric);
    rep.columns = {"constant", "value", "quadrature_error"};

    const BoundMetric m = metric == "W" ? BoundMetric::W : BoundMetric::K;
    if (metric != "K" && metric != "W")
        throw CLI::ValidationError("metric must be K or W");
    const BoundReport report =
        m == BoundMetric::K ? ck_constant(alpha1, alpha2, law.angular())
                            : cw_constant(alpha1, alpha2, law.angular());
    rep.rows.push_back({report.constant_name, format_full(report.value),
                        format_full(report.quadrature_error)});
    const double rhs = alpha_bound(alpha1, alpha2, law.angular(), m);
    rep.rows.push_back({"alpha_bound_rhs", format_full(rhs), "0"});
    emit(rep, c.out_path);
    return 0;
}

int run_lepage_rate(const CommonArgs& c, const std::string& grid_text,
                    std::size_t big_n, std::size_t reps,
                    const std::string& metric_name, bool fit) {
    MaxStableLaw law = load_law_checked(c.law_path, c.alpha);
    RateExperiment e{law,
                     parse_grid(grid_text),
                     big_n,
                     reps,
                     RateMetric::coupledW,
                     c.seed,
                     c.threads};
    if (metric_name == "coupledW")
        e.metric = RateMetric::coupledW;
    else if (metric_name == "d2bank")
        e.metric = RateMetric::d2bank;
    else if (metric_name == "kolmogorov")
        e.metric = RateMetric::kolmogorov;
    else
        throw CLI::ValidationError("metric must be coupledW, d2bank or kolmogorov");

    const RateResult res = run_rate_experiment(e);

    ExperimentReport rep;
    rep.add_meta("command", std::string("lepage-rate"));
    rep.add_meta("version", std::string(kVersion));
    rep.add_meta("law", c.law_path);
    rep.add_meta("alpha", law.alpha());
    rep.add_meta("metric", metric_name);
    rep.add_meta("n_grid", join_sizes(e.n_grid));
    rep.add_meta("big_n", static_cast<std::uint64_t>(big_n));
    rep.add_meta("reps", static_cast<std::uint64_t>(reps));
    rep.add_meta("seed", c.seed);
    if (e.metric == RateMetric::d2bank)
        rep.add_meta("note", std::string("bank supremum: lower bound on d_[2]"));
    if (fit) {
        if (!res.fit.ok)
            throw std::runtime_error("slope fit refused: " + res.fit.message);
        rep.add_meta("fit_slope", res.fit.slope);
        rep.add_meta("fit_intercept", res.fit.intercept);
        rep.add_meta("fit_residual", res.fit.residual);
        rep.add_meta("fit_points", static_cast<std::uint64_t>(res.fit.points_used));
    }
    rep.columns = {"n", "estimate", "std_error", "theoretical"};
    for (const RateRow& row : res.rows)
        rep.add_row({static_cast<double>(row.n), row.estimate, row.std_error,
                     row.theoretical});
    emit(rep, c.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stein-method toolkit for multivariate max-stable laws"};
    app.require_subcommand(1);

    CommonArgs c;
    double alpha_flag = 0;

    auto add_common = [&](CLI::App* sub, bool with_law = true) {
        if (with_law)
            sub->add_option("--law", c.law_path, "law file (d alpha header)")
                ->required();
        sub->add_option("--seed", c.seed, "RNG seed")->default_val(0);
        sub->add_option("--threads", c.threads,
                        "worker threads (0 = MAXSTEIN_THREADS or hardware)")
            ->default_val(0);
        sub->add_option("-o,--out", c.out_path, "output CSV path (default stdout)");
        sub->add_option("--alpha", alpha_flag,
                        "override the alpha from the law file");
    };

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw from a max-stable law");
    std::size_t n = 1000, trunc = 100, stream = 0;
    std::string method = "exact";
    add_common(sample_cmd);
    sample_cmd->add_option("--n", n, "number of draws")->default_val(1000);
    sample_cmd->add_option("--method", method, "exact | lepage")
        ->default_val("exact");
    sample_cmd->add_option("--trunc", trunc,
                           "series truncation for --method lepage")
        ->default_val(100);
    sample_cmd->add_option("--stream", stream, "RNG stream id")->default_val(0);

    // cdf
    auto* cdf_cmd = app.add_subcommand("cdf", "evaluate the exact CDF");
    std::string z_csv;
    add_common(cdf_cmd);
    cdf_cmd->add_option("--z", z_csv, "evaluation point z1,...,zd")->required();

    // semigroup
    auto* semi_cmd =
        app.add_subcommand("semigroup", "Monte Carlo vs closed-form semigroup");
    double t = 1.0;
    std::string x_csv, ind_csv;
    bool use_bank = false;
    std::size_t reps = 100000;
    add_common(semi_cmd);
    semi_cmd->add_option("--t", t, "semigroup time")->required();
    semi_cmd->add_option("--x", x_csv, "state x1,...,xd")->required();
    semi_cmd->add_option("--indicator", ind_csv, "box corner z1,...,zd");
    semi_cmd->add_flag("--bank", use_bank, "evaluate the smooth bank instead");
    semi_cmd->add_option("--reps", reps, "Monte Carlo replicates")
        ->default_val(100000);

    // stein-check
    auto* stein_cmd =
        app.add_subcommand("stein-check", "verify the Stein equation/identity");
    std::string mode = "indicator", stein_z;
    std::size_t points = 1000;
    double tol = 1e-10;
    add_common(stein_cmd);
    stein_cmd->add_option("--mode", mode, "indicator | smooth")
        ->default_val("indicator");
    stein_cmd->add_option("--z", stein_z, "box corner for indicator mode");
    stein_cmd->add_option("--points", points, "evaluation points / draws")
        ->default_val(1000);
    stein_cmd->add_option("--tol", tol, "max residual tolerance (indicator)")
        ->default_val(1e-10);

    // law-distance
    auto* dist_cmd = app.add_subcommand("law-distance", "distance between laws");
    std::string law1_path, law2_path, dist_metric = "kolmogorov";
    std::size_t nodes = 40, dist_reps = 100000;
    int depth = 4;
    add_common(dist_cmd, false);
    dist_cmd->add_option("--law1", law1_path, "first law file")->required();
    dist_cmd->add_option("--law2", law2_path, "second law file")->required();
    dist_cmd->add_option("--metric", dist_metric,
                         "kolmogorov | wasserstein | d2")
        ->default_val("kolmogorov");
    dist_cmd->add_option("--nodes", nodes, "grid nodes per axis")
        ->default_val(40);
    dist_cmd->add_option("--depth", depth, "grid refinement depth")
        ->default_val(4);
    dist_cmd->add_option("--reps", dist_reps, "sample size for bank metrics")
        ->default_val(100000);

    // constants
    auto* const_cmd =
        app.add_subcommand("constants", "bound constants of the comparison propositions");
    double alpha1 = 0, alpha2 = 0;
    std::string const_metric = "K";
    add_common(const_cmd);
    const_cmd->add_option("--alpha1", alpha1, "smaller stability index")
        ->required();
    const_cmd->add_option("--alpha2", alpha2, "larger stability index")
        ->required();
    const_cmd->add_option("--metric", const_metric, "K | W")->default_val("K");

    // lepage-rate
    auto* rate_cmd =
        app.add_subcommand("lepage-rate", "truncation-error rate experiment");
    std::string grid_text = "8:512:geometric", rate_metric = "coupledW";
    std::size_t big_n = 10000, rate_reps = 100000;
    bool fit = false;
    add_common(rate_cmd);
    rate_cmd->add_option("--n-grid", grid_text,
                         "lo:hi:geometric or comma list")
        ->default_val("8:512:geometric");
    rate_cmd->add_option("--big-n", big_n, "reference truncation")
        ->default_val(10000);
    rate_cmd->add_option("--reps", rate_reps, "replicates")->default_val(100000);
    rate_cmd->add_option("--metric", rate_metric,
                         "coupledW | d2bank | kolmogorov")
        ->default_val("coupledW");
    rate_cmd->add_flag("--fit", fit, "append a log-log slope fit to the metadata");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exit 0 with help text
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::optional<double> alpha_override;
    if (alpha_flag > 0) alpha_override = alpha_flag;
    c.alpha = alpha_override;

    try {
        if (*sample_cmd) return run_sample(c, n, method, trunc, stream);
        if (*cdf_cmd) return run_cdf(c, z_csv);
        if (*semi_cmd) return run_semigroup(c, t, x_csv, ind_csv, use_bank, reps);
        if (*stein_cmd) return run_stein_check(c, mode, stein_z, points, tol);
        if (*dist_cmd)
            return run_law_distance(law1_path, law2_path, dist_metric, nodes,
                                    depth, dist_reps, c);
        if (*const_cmd) return run_constants(c, alpha1, alpha2, const_metric);
        if (*rate_cmd)
            return run_lepage_rate(c, grid_text, big_n, rate_reps, rate_metric,
                                   fit);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
