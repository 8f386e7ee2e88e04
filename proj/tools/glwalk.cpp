// glwalk: experiment runner for random-matrix-product walks.
//
//   glwalk <command> --config <file> [--seed N] [--workers K] [--out DIR]
//   glwalk plot --csv <report.csv> --kind <kind> --out-svg <file.svg>
//
// Exit codes: 0 ok, 2 config error, 3 budget error, 4 degenerate variance,
// 5 noise-dominated rate fit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glwalk/blocking.hpp"
#include "glwalk/config.hpp"
#include "glwalk/csv.hpp"
#include "glwalk/depcoef.hpp"
#include "glwalk/ensemble.hpp"
#include "glwalk/errors.hpp"
#include "glwalk/estimators.hpp"
#include "glwalk/runner.hpp"
#include "glwalk/stats.hpp"
#include "glwalk/svgplot.hpp"
#include "glwalk/version.hpp"
#include "glwalk/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cli {
    std::string config_path;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    int workers_override = 0;
    std::string out_override;
};

struct Run {
    glwalk::ExperimentConfig cfg;
    fs::path out_dir;
    glwalk::RunManifest manifest;
    glwalk::RngStream root;

    glwalk::RngStream stream(std::uint64_t index, std::uint64_t tag) const {
        return root.child(index, tag);
    }
};

Run open_run(const Cli& cli) {
    Run r{glwalk::ExperimentConfig::load(cli.config_path), {}, {}, glwalk::RngStream{}};
    if (cli.has_seed_override) r.cfg.seed = cli.seed_override;
    if (cli.workers_override > 0) r.cfg.workers = cli.workers_override;
    if (!cli.out_override.empty()) r.cfg.output_dir = cli.out_override;
    r.out_dir = r.cfg.output_dir;
    fs::create_directories(r.out_dir);
    r.root = glwalk::RngStream(r.cfg.seed);

    std::ifstream in(cli.config_path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    r.manifest.config_hash = glwalk::hex64(glwalk::fnv1a64(bytes.data(), bytes.size()));
    r.manifest.code_version = glwalk::kVersion;
    r.manifest.start_time = glwalk::iso_now();
    return r;
}

void close_run(Run& r, const std::vector<fs::path>& outputs) {
    for (const auto& p : outputs) r.manifest.add_file(p);
    r.manifest.end_time = glwalk::iso_now();
    r.manifest.write(r.out_dir / "manifest.json");
}

std::vector<std::int64_t> int_list(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw glwalk::ConfigError(std::string(what) + ": expected a list");
    std::vector<std::int64_t> v;
    for (const auto& e : j) v.push_back(e.get<std::int64_t>());
    return v;
}

glwalk::StationarySampler make_sampler(const Run& r) {
    return glwalk::StationarySampler::make(r.cfg.ensemble, r.cfg.burn_in);
}

// lambda block: either {"value": x, "n": n_used} or {"n": n, "paths": p} to
// estimate in-process. A run of length >= 10 * n_ref is required either way.
glwalk::LyapunovEstimate resolve_lambda(const Run& r, const json& block, std::int64_t n_ref,
                                        const glwalk::StationarySampler& sampler) {
    glwalk::LyapunovEstimate lam;
    if (block.contains("value")) {
        lam.value = block.at("value").get<double>();
        lam.n = block.value("n", static_cast<std::int64_t>(0));
        lam.paths = 0;
    } else {
        lam.n = block.at("n").get<std::int64_t>();
        std::int64_t paths = block.at("paths").get<std::int64_t>();
        if (lam.n * paths > r.cfg.budget)
            throw glwalk::BudgetError("lambda run exceeds step budget");
        lam = glwalk::lyapunov(r.cfg.ensemble, lam.n, paths, sampler,
                               r.stream(1, glwalk::stage::estimator), r.cfg.workers);
    }
    if (lam.n < 10 * n_ref)
        throw glwalk::ConfigError("lambda_hat must come from a run at least 10x longer than max(n_grid)");
    return lam;
}

glwalk::VarianceEstimate resolve_s(const Run& r, const json& block,
                                   const glwalk::StationarySampler& sampler) {
    if (block.contains("value")) {
        glwalk::VarianceEstimate e;
        e.value = block.at("value").get<double>();
        e.degenerate = e.value <= 1e-12;
        return e;
    }
    std::string method = block.value("method", "covariance_series");
    if (method == "batch_means")
        return glwalk::variance_batch_means(r.cfg.ensemble, sampler,
                                            block.value("paths", static_cast<std::int64_t>(2048)),
                                            r.stream(2, glwalk::stage::estimator), r.cfg.workers);
    if (method == "covariance_series")
        return glwalk::variance_covariance_series(
            r.cfg.ensemble, sampler, block.value("path_length", static_cast<std::int64_t>(1'000'000)),
            block.value("replicates", 8), block.value("max_lag", 200),
            r.stream(3, glwalk::stage::estimator));
    throw glwalk::ConfigError("variance method must be batch_means or covariance_series");
}

int cmd_lyapunov(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("lyapunov");
    auto sampler = make_sampler(r);
    std::int64_t n = b.at("n").get<std::int64_t>();
    std::int64_t paths = b.at("paths").get<std::int64_t>();
    if (n * paths > r.cfg.budget) throw glwalk::BudgetError("lyapunov: step budget exceeded");
    auto est = glwalk::lyapunov(r.cfg.ensemble, n, paths, sampler,
                                r.stream(1, glwalk::stage::estimator), r.cfg.workers);
    fs::path out = r.out_dir / "lyapunov.csv";
    glwalk::write_csv_atomic(out, "lyapunov",
                             {"n", "paths", "lambda_hat", "se", "increment_variant", "seed"},
                             {{std::to_string(est.n), std::to_string(est.paths),
                               glwalk::fmt_double(est.value), glwalk::fmt_double(est.se),
                               glwalk::fmt_double(est.increment_variant), std::to_string(r.cfg.seed)}});
    close_run(r, {out});
    return 0;
}

int cmd_variance(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("variance");
    auto sampler = make_sampler(r);
    std::vector<std::vector<std::string>> rows;
    auto emit = [&](const glwalk::VarianceEstimate& e) {
        rows.push_back({e.method == glwalk::VarianceEstimate::Method::batch_means
                            ? "batch_means"
                            : "covariance_series",
                        glwalk::fmt_double(e.value), glwalk::fmt_double(e.se),
                        std::to_string(e.truncation_lag), e.degenerate ? "1" : "0",
                        std::to_string(r.cfg.seed)});
    };
    std::string method = b.value("method", "both");
    if (method == "both" || method == "batch_means")
        emit(glwalk::variance_batch_means(r.cfg.ensemble, sampler,
                                          b.value("paths", static_cast<std::int64_t>(2048)),
                                          r.stream(2, glwalk::stage::estimator), r.cfg.workers));
    if (method == "both" || method == "covariance_series")
        emit(glwalk::variance_covariance_series(
            r.cfg.ensemble, sampler, b.value("path_length", static_cast<std::int64_t>(1'000'000)),
            b.value("replicates", 8), b.value("max_lag", 200),
            r.stream(3, glwalk::stage::estimator)));
    fs::path out = r.out_dir / "variance.csv";
    glwalk::write_csv_atomic(out, "variance",
                             {"method", "s2_hat", "se", "truncation_lag", "degenerate", "seed"}, rows);
    close_run(r, {out});
    return 0;
}

int cmd_be_curve(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("be_curve");
    auto sampler = make_sampler(r);
    std::vector<std::int64_t> n_grid = int_list(b.at("n_grid"), "be_curve.n_grid");
    std::int64_t paths = b.at("paths").get<std::int64_t>();
    if (paths < 1) throw glwalk::ConfigError("be_curve: paths must be >= 1");

    auto lam = resolve_lambda(r, r.cfg.block("lambda"), n_grid.back(), sampler);
    auto s2 = resolve_s(r, r.cfg.block("s"), sampler);
    if (s2.degenerate) throw glwalk::DegenerateVarianceError("be_curve: degenerate variance estimate");
    double s_hat = std::sqrt(s2.value);

    glwalk::SampleMatrix sm =
        glwalk::run_stationary_batch(r.cfg.ensemble, n_grid, paths, sampler,
                                     r.stream(4, glwalk::stage::walk), r.cfg.workers, r.cfg.budget);
    fs::path samples_path = r.out_dir / "be_samples.csv";
    glwalk::write_sample_matrix(samples_path, sm);

    std::vector<std::string> observables = {"vec_norm", "mat_norm", "spec_radius"};
    if (b.contains("observables")) {
        observables.clear();
        for (const auto& o : b.at("observables")) observables.push_back(o.get<std::string>());
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& obs : observables) {
        auto rep = glwalk::ks_distance(sm, obs, lam.value, s_hat);
        for (std::size_t g = 0; g < rep.n_grid.size(); ++g)
            rows.push_back({obs, std::to_string(rep.n_grid[g]), glwalk::fmt_double(rep.d_n[g]),
                            glwalk::fmt_double(rep.mc_floor), std::to_string(rep.paths),
                            glwalk::fmt_double(rep.lambda_hat), glwalk::fmt_double(lam.se),
                            glwalk::fmt_double(rep.s_hat),
                            glwalk::fmt_double(r.cfg.ensemble.declared_q),
                            std::to_string(r.cfg.seed)});
    }
    fs::path report_path = r.out_dir / "be_curve.csv";
    glwalk::write_csv_atomic(report_path, "be_curve",
                             {"observable", "n", "D_n", "mc_floor", "paths", "lambda_hat",
                              "lambda_se", "s_hat", "q", "seed"},
                             rows);
    close_run(r, {samples_path, report_path});
    return 0;
}

int cmd_rate_fit(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("rate_fit");
    fs::path dir = r.out_dir;
    fs::path report_csv = b.value("report_csv", (dir / "be_curve.csv").string());
    fs::path samples_csv = b.value("samples_csv", (dir / "be_samples.csv").string());
    std::string observable = b.value("observable", "vec_norm");
    glwalk::RateModel model = glwalk::rate_model_from_name(b.value("model", "power_law"));
    double q = b.value("q", r.cfg.ensemble.declared_q);

    glwalk::CsvTable t = glwalk::read_csv_expect(report_csv, "be_curve");
    glwalk::KolmogorovReport rep;
    rep.observable = observable;
    std::size_t c_obs = t.col("observable"), c_n = t.col("n"), c_d = t.col("D_n");
    std::size_t c_floor = t.col("mc_floor"), c_p = t.col("paths"), c_l = t.col("lambda_hat"),
                c_s = t.col("s_hat");
    for (const auto& row : t.rows) {
        if (row[c_obs] != observable) continue;
        rep.n_grid.push_back(std::stoll(row[c_n]));
        rep.d_n.push_back(std::stod(row[c_d]));
        rep.mc_floor = std::stod(row[c_floor]);
        rep.paths = std::stoll(row[c_p]);
        rep.lambda_hat = std::stod(row[c_l]);
        rep.s_hat = std::stod(row[c_s]);
    }
    if (rep.n_grid.empty())
        throw glwalk::SchemaMismatchError("rate_fit: observable not present in report");

    glwalk::SampleMatrix sm = glwalk::read_sample_matrix(samples_csv);
    auto fit = glwalk::rate_fit(rep, model, q, &sm, b.value("bootstrap", 200),
                                r.cfg.seed ^ UINT64_C(0x9E3779B97F4A7C15));
    fs::path out = dir / "rate_fit.csv";
    glwalk::write_csv_atomic(
        out, "rate_fit",
        {"model", "observable", "slope", "ci_lo", "ci_hi", "se", "r2", "intercept", "q", "n_lo",
         "n_hi", "seed"},
        {{glwalk::rate_model_name(model), observable, glwalk::fmt_double(fit.slope),
          glwalk::fmt_double(fit.ci_lo), glwalk::fmt_double(fit.ci_hi), glwalk::fmt_double(fit.se),
          glwalk::fmt_double(fit.r2), glwalk::fmt_double(fit.intercept), glwalk::fmt_double(fit.q),
          std::to_string(rep.n_grid.front()), std::to_string(rep.n_grid.back()),
          std::to_string(r.cfg.seed)}});
    close_run(r, {out});
    return 0;
}

int cmd_depcoef(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("depcoef");
    auto sampler = make_sampler(r);
    double p = b.value("p", 1.0);
    auto k_grid = int_list(b.at("k_grid"), "depcoef.k_grid");
    auto strategy = glwalk::pair_strategy_from_name(b.value("pair_strategy", "mixed"));
    std::int64_t replicates = b.value("replicates", static_cast<std::int64_t>(10'000));
    int pairs = b.value("pairs", 32);
    auto curve = glwalk::estimate_delta(r.cfg.ensemble, p, k_grid, strategy, replicates, sampler,
                                        r.stream(5, glwalk::stage::depcoef), pairs);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < k_grid.size(); ++i)
        rows.push_back({glwalk::fmt_double(p), std::to_string(k_grid[i]),
                        glwalk::fmt_double(curve.values[i]), glwalk::fmt_double(curve.se[i]),
                        glwalk::pair_strategy_name(strategy), std::to_string(curve.pair_count),
                        std::to_string(curve.replicates), std::to_string(r.cfg.seed)});
    fs::path out = r.out_dir / "depcoef.csv";
    glwalk::write_csv_atomic(out, "depcoef",
                             {"p", "k", "delta_hat", "se", "pair_strategy", "pairs", "replicates",
                              "seed"},
                             rows);
    std::vector<fs::path> outputs = {out};
    if (b.contains("q")) {
        auto decay = glwalk::decay_check(curve, b.at("q").get<double>(),
                                         b.value("flag_factor", 3.0));
        fs::path dout = r.out_dir / "depcoef_decay.csv";
        glwalk::write_csv_atomic(
            dout, "depcoef_decay",
            {"q", "p", "slope", "slope_se", "ratio", "flagged", "degenerate", "seed"},
            {{glwalk::fmt_double(decay.q), glwalk::fmt_double(decay.p),
              glwalk::fmt_double(decay.slope), glwalk::fmt_double(decay.slope_se),
              glwalk::fmt_double(decay.ratio), decay.flagged ? "1" : "0",
              decay.degenerate ? "1" : "0", std::to_string(r.cfg.seed)}});
        outputs.push_back(dout);
    }
    close_run(r, outputs);
    return 0;
}

int cmd_blocks(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("blocks");
    auto sampler = make_sampler(r);
    sampler.fill_pool(b.value("pool", 2048), r.stream(6, glwalk::stage::pool));
    int j_nu = b.value("J_nu", 64);
    int j_c = b.value("J_c", 64);
    double lambda_hat = 0.0;
    if (b.contains("lambda_hat"))
        lambda_hat = b.at("lambda_hat").get<double>();
    else if (r.cfg.raw.contains("lambda"))
        lambda_hat = resolve_lambda(r, r.cfg.block("lambda"), 1, sampler).value;

    std::vector<fs::path> outputs;
    std::vector<std::string> which = {"decompose"};
    if (b.contains("which")) {
        which.clear();
        for (const auto& w : b.at("which")) which.push_back(w.get<std::string>());
    }
    auto provenance = [&](std::vector<std::string> row) {
        row.push_back(std::to_string(j_nu));
        row.push_back(std::to_string(j_c));
        row.push_back(std::to_string(r.cfg.seed));
        return row;
    };
    for (const auto& w : which) {
        if (w == "decompose") {
            glwalk::BlockLayout layout =
                b.contains("kappa")
                    ? glwalk::BlockLayout::from_kappa(b.at("n").get<std::int64_t>(),
                                                      b.at("kappa").get<double>())
                    : glwalk::BlockLayout::make(b.at("m").get<std::int64_t>(),
                                                b.at("N").get<std::int64_t>());
            auto bs = glwalk::decompose(r.cfg.ensemble, layout, sampler, j_nu, j_c, lambda_hat,
                                        r.stream(7, glwalk::stage::blocking), r.cfg.budget);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t j = 0; j < bs.y.size(); ++j)
                rows.push_back(provenance({std::to_string(j + 1), glwalk::fmt_double(bs.u[j]),
                                           glwalk::fmt_double(bs.r[j]), glwalk::fmt_double(bs.y[j]),
                                           std::to_string(layout.m), std::to_string(layout.N)}));
            fs::path out = r.out_dir / "blocks_decompose.csv";
            glwalk::write_csv_atomic(out, "blocks_decompose",
                                     {"j", "U_j", "R_j", "Y_j", "m", "N", "J_nu", "J_c", "seed"},
                                     rows);
            fs::path sout = r.out_dir / "blocks_identity.csv";
            glwalk::write_csv_atomic(
                sout, "blocks_identity",
                {"S1", "S2", "S_nm", "identity_gap", "m", "N", "J_nu", "J_c", "seed"},
                {provenance({glwalk::fmt_double(bs.s1), glwalk::fmt_double(bs.s2),
                             glwalk::fmt_double(bs.s_nm),
                             glwalk::fmt_double(bs.s1 + bs.s2 - bs.s_nm), std::to_string(layout.m),
                             std::to_string(layout.N)})});
            outputs.push_back(out);
            outputs.push_back(sout);
        } else if (w == "r1_scaling" || w == "block_growth" || w == "condvar") {
            auto m_grid = int_list(b.at("m_grid"), "blocks.m_grid");
            glwalk::ScalingReport rep;
            std::string kind;
            if (w == "r1_scaling") {
                rep = glwalk::r1_moment_scaling(r.cfg.ensemble, b.value("p", 3.0), m_grid,
                                                b.value("paths", static_cast<std::int64_t>(128)),
                                                j_nu, j_c, sampler,
                                                r.stream(8, glwalk::stage::blocking));
                kind = "blocks_r1_scaling";
            } else if (w == "block_growth") {
                rep = glwalk::block_moment_growth(r.cfg.ensemble,
                                                  b.value("q_moment", r.cfg.ensemble.declared_q),
                                                  m_grid,
                                                  b.value("paths", static_cast<std::int64_t>(4096)),
                                                  lambda_hat, sampler,
                                                  r.stream(9, glwalk::stage::blocking));
                kind = "blocks_block_growth";
            } else {
                rep = glwalk::conditional_variance_concentration(
                    r.cfg.ensemble, m_grid, b.value("outer", 128), b.value("inner", 64), j_nu,
                    sampler, r.stream(10, glwalk::stage::blocking));
                kind = "blocks_condvar";
            }
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < rep.m_grid.size(); ++i) {
                std::vector<std::string> row = {
                    std::to_string(rep.m_grid[i]),
                    rep.values.empty() ? "nan" : glwalk::fmt_double(rep.values[i]),
                    rep.se.empty() ? "nan" : glwalk::fmt_double(rep.se[i]),
                    glwalk::fmt_double(rep.slope), glwalk::fmt_double(rep.slope_se),
                    glwalk::fmt_double(rep.theory_ceiling), rep.degenerate ? "1" : "0"};
                rows.push_back(provenance(std::move(row)));
            }
            fs::path out = r.out_dir / (kind + ".csv");
            glwalk::write_csv_atomic(out, kind,
                                     {"m", "value", "se", "slope", "slope_se", "theory_ceiling",
                                      "degenerate", "J_nu", "J_c", "seed"},
                                     rows);
            outputs.push_back(out);
        } else if (w == "structure") {
            glwalk::BlockLayout layout = glwalk::BlockLayout::make(b.at("m").get<std::int64_t>(),
                                                                   b.at("N").get<std::int64_t>());
            auto rep = glwalk::structural_checks(
                r.cfg.ensemble, layout, b.value("replicates_a", 1000), b.value("outer_b", 192),
                b.value("inner_b", 64), j_nu, j_c, b.value("t_value", 1.0), lambda_hat, sampler,
                r.stream(11, glwalk::stage::blocking));
            fs::path out = r.out_dir / "blocks_structure.csv";
            glwalk::write_csv_atomic(
                out, "blocks_structure",
                {"max_abs_corr_blocks", "threshold_blocks", "max_abs_corr_lag2",
                 "max_abs_corr_lag1", "threshold_z", "phi_max_modulus", "phi_at_zero", "m", "N",
                 "J_nu", "J_c", "seed"},
                {provenance({glwalk::fmt_double(rep.max_abs_corr_blocks),
                             glwalk::fmt_double(rep.corr_threshold_blocks),
                             glwalk::fmt_double(rep.max_abs_corr_lag2),
                             glwalk::fmt_double(rep.max_abs_corr_lag1),
                             glwalk::fmt_double(rep.corr_threshold_z),
                             glwalk::fmt_double(rep.phi_max_modulus),
                             glwalk::fmt_double(rep.phi_at_zero), std::to_string(layout.m),
                             std::to_string(layout.N)})});
            outputs.push_back(out);
        } else {
            throw glwalk::ConfigError("blocks: unknown report '" + w + "'");
        }
    }
    close_run(r, outputs);
    return 0;
}

int cmd_gap(const Cli& cli) {
    Run r = open_run(cli);
    const json& b = r.cfg.block("gap");
    auto sampler = make_sampler(r);
    std::int64_t n_max = b.at("n_max").get<std::int64_t>();
    std::int64_t paths = b.at("paths").get<std::int64_t>();
    int j_nu = b.value("J_nu", 16);
    if (n_max * paths * (j_nu + 1) > r.cfg.budget)
        throw glwalk::BudgetError("gap: step budget exceeded");
    auto rep = glwalk::bougerol_gap(r.cfg.ensemble, n_max, paths, sampler, j_nu,
                                    r.stream(12, glwalk::stage::estimator), r.cfg.workers);
    std::vector<std::vector<std::string>> rows;
    std::int64_t stride = std::max<std::int64_t>(1, n_max / b.value("curve_points",
                                                                    static_cast<std::int64_t>(512)));
    for (std::int64_t n = stride; n <= n_max; n += stride)
        rows.push_back({std::to_string(n),
                        glwalk::fmt_double(rep.per_n_max[static_cast<std::size_t>(n - 1)])});
    fs::path out = r.out_dir / "gap.csv";
    glwalk::write_csv_atomic(out, "gap", {"n", "gap_max"}, rows);
    fs::path sout = r.out_dir / "gap_summary.csv";
    glwalk::write_csv_atomic(sout, "gap_summary",
                             {"min_gap", "trend_ratio", "paths", "J_nu", "n_max", "seed"},
                             {{glwalk::fmt_double(rep.min_gap), glwalk::fmt_double(rep.trend_ratio),
                               std::to_string(paths), std::to_string(j_nu), std::to_string(n_max),
                               std::to_string(r.cfg.seed)}});
    close_run(r, {out, sout});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(glwalk::kVersion) +
                 " - left random walks on GL_d(R): simulation and verification"};
    app.require_subcommand(1);

    Cli cli;
    std::string plot_csv, plot_kind, plot_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", cli.seed_override, "override config seed")
            ->each([&](const std::string&) { cli.has_seed_override = true; });
        sub->add_option("--workers", cli.workers_override, "override worker count");
        sub->add_option("--out", cli.out_override, "override output directory");
    };

    CLI::App* lyap = app.add_subcommand("lyapunov", "estimate the top Lyapunov exponent");
    CLI::App* var = app.add_subcommand("variance", "estimate the CLT variance s^2");
    CLI::App* be = app.add_subcommand("be-curve", "Kolmogorov distances over an n-grid");
    CLI::App* rate = app.add_subcommand("rate-fit", "fit a rate model to a be-curve report");
    CLI::App* dep = app.add_subcommand("depcoef", "dependence coefficient curve");
    CLI::App* blk = app.add_subcommand("blocks", "blocking decomposition reports");
    CLI::App* gap = app.add_subcommand("gap", "norm vs averaged-direction gap");
    for (CLI::App* sub : {lyap, var, be, rate, dep, blk, gap}) add_common(sub);

    CLI::App* plot = app.add_subcommand("plot", "render a report CSV as SVG");
    plot->add_option("--csv", plot_csv, "report CSV")->required();
    plot->add_option("--kind", plot_kind, "be_curve|rate_fit|depcoef|gap")->required();
    plot->add_option("--out-svg", plot_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (lyap->parsed()) return cmd_lyapunov(cli);
        if (var->parsed()) return cmd_variance(cli);
        if (be->parsed()) return cmd_be_curve(cli);
        if (rate->parsed()) return cmd_rate_fit(cli);
        if (dep->parsed()) return cmd_depcoef(cli);
        if (blk->parsed()) return cmd_blocks(cli);
        if (gap->parsed()) return cmd_gap(cli);
        if (plot->parsed()) {
            glwalk::plot(plot_csv, plot_kind, plot_out);
            return 0;
        }
    } catch (const glwalk::Error& e) {
        std::cerr << "glwalk-error: " << e.tag() << ": " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "glwalk-error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
