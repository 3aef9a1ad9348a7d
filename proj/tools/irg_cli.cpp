// Command-line front end: reproducible experiments on inhomogeneous random
// graphs with finitely many vertex types. Structured results go to JSON,
// per-replica and per-time series to CSV.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <irg/irg.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string model_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 0;

    int effective_threads() const {
        if (threads > 0) return threads;
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool stochastic) {
    cmd->add_option("--model", opts.model_path, "model JSON file")->required()->check(CLI::ExistingFile);
    auto* seed = cmd->add_option("--seed", opts.seed, "RNG seed");
    if (stochastic) seed->required();
    cmd->add_option("--out", opts.out_dir, "output directory (default: print to stdout)");
    cmd->add_option("--threads", opts.threads, "worker threads (default: available parallelism)");
}

void emit(const CommonOpts& opts, const std::string& filename, const std::string& content) {
    if (opts.out_dir.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    fs::create_directories(opts.out_dir);
    fs::path path = fs::path(opts.out_dir) / filename;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cout << path.string() << "\n";
}

std::string format_double(double v) {
    if (v == irg::kInf) return "inf";
    if (v == -irg::kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json json_double(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json measure_json(const irg::Measure& m) {
    json arr = json::array();
    for (double v : m.v) arr.push_back(json_double(v));
    return arr;
}

irg::TypeConfig parse_config_arg(const std::string& text, std::size_t n_types) {
    irg::TypeConfig k(n_types);
    std::stringstream ss(text);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= n_types) throw CLI::ValidationError("--k", "more entries than types");
        k[i++] = std::stoll(tok);
    }
    if (i != n_types) throw CLI::ValidationError("--k", "needs one count per type");
    k.validate();
    return k;
}

std::string config_string(const irg::TypeConfig& k) {
    std::string s;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(k[i]);
    }
    return s;
}

json micro_json(const irg::MicroMeasure& lambda) {
    std::vector<std::pair<irg::TypeConfig, double>> atoms(lambda.weights.begin(), lambda.weights.end());
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    json arr = json::array();
    for (const auto& [k, w] : atoms) arr.push_back({{"k", config_string(k)}, {"weight", w}});
    return arr;
}

int cmd_simulate(const CommonOpts& opts, std::int64_t n, std::int64_t replicas, double eps,
                 std::int64_t hist_max) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    irg::TypeConfig counts = irg::type_counts_for(n, model.mu);
    const std::size_t n_types = model.types.size();
    irg::SurvivalResult sv = irg::solve_survival(model.kappa, model.mu);
    double giant_ref = 0;  // limiting giant fraction sum_r rho_r mu_r
    for (std::size_t s = 0; s < n_types; ++s) giant_ref += sv.rho[s] * model.mu[s];

    struct Row {
        double giant = 0;
        std::vector<std::int64_t> hist;
        irg::Measure residual;
    };
    std::vector<Row> rows(static_cast<std::size_t>(replicas));
    irg::run_replicas(replicas, opts.effective_threads(), [&](std::int64_t i) {
        irg::GraphSample g = irg::sample_graph(n, counts, model.effective_kappa_n(),
                                               irg::splitmix64(opts.seed) ^
                                                   irg::splitmix64(static_cast<std::uint64_t>(i)));
        irg::ComponentStats st = irg::component_stats(g, eps, n_types);
        Row row;
        row.hist.assign(static_cast<std::size_t>(hist_max) + 1, 0);
        std::size_t largest = 0;
        for (const auto& comp : st.components) {
            largest = std::max(largest, comp.size());
            if (static_cast<std::int64_t>(comp.size()) <= hist_max) ++row.hist[comp.size()];
            else ++row.hist[0];  // bucket 0 collects oversize components
        }
        row.giant = static_cast<double>(largest) / static_cast<double>(n);
        row.residual = st.residual;
        rows[static_cast<std::size_t>(i)] = std::move(row);
    });

    std::ostringstream csv;
    csv << "replica,N,giant_fraction,giant_fraction_ref";
    for (std::int64_t s = 1; s <= hist_max; ++s) csv << ",count_size_" << s;
    csv << ",count_size_gt_" << hist_max;
    for (std::size_t s = 0; s < n_types; ++s) csv << ",residual_" << model.types.labels[s];
    csv << "\n";
    for (std::int64_t i = 0; i < replicas; ++i) {
        const Row& row = rows[static_cast<std::size_t>(i)];
        csv << i << "," << n << "," << format_double(row.giant) << "," << format_double(giant_ref);
        for (std::int64_t s = 1; s <= hist_max; ++s) csv << "," << row.hist[static_cast<std::size_t>(s)];
        csv << "," << row.hist[0];
        for (std::size_t s = 0; s < n_types; ++s) csv << "," << format_double(row.residual[s]);
        csv << "\n";
    }
    emit(opts, "simulate.csv", csv.str());
    return 0;
}

int cmd_exact_dist(const CommonOpts& opts, std::int64_t n) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    irg::TypeConfig counts = irg::type_counts_for(n, model.mu);
    auto dist = irg::exact_micro_distribution(n, counts, model.effective_kappa_n());
    json out = json::object();
    double total = 0;
    for (const auto& [profile, p] : dist) {
        out[profile.to_string()] = p;
        total += p;
    }
    json doc{{"N", n}, {"total_probability", total}, {"distribution", out}};
    emit(opts, "exact_dist.json", doc.dump(2));
    return 0;
}

int cmd_tau(const CommonOpts& opts, const std::string& k_text) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    irg::TypeConfig k = parse_config_arg(k_text, model.types.size());
    json doc{{"k", config_string(k)}};
    doc["closed_form"] = json::object();
    for (std::size_t r : k.support()) {
        auto w = irg::tau_closed_form(k, model.kappa, r);
        doc["closed_form"][model.types.labels[r]] = json_double(w.value);
    }
    if (k.total() <= 200) {
        auto w = irg::tau_matrix_tree(k, model.kappa);
        doc["matrix_tree"] = json_double(w.value);
        doc["matrix_tree_log"] = json_double(w.log_value);
    }
    if (k.total() <= 9) doc["enumeration"] = json_double(irg::tau_enumerate(k, model.kappa).value);
    emit(opts, "tau.json", doc.dump(2));
    return 0;
}

int cmd_solve(const CommonOpts& opts, double tol) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    auto sig = irg::sigma(model.kappa, model.mu);
    auto sv = irg::solve_survival(model.kappa, model.mu, tol);
    auto ch = irg::solve_characteristic(model.kappa, model.mu, tol);
    auto bs = irg::solve_b_star(model.kappa, model.mu, tol);
    json doc{
        {"sigma", sig.value},
        {"regime", irg::regime_name(ch.regime)},
        {"rho", measure_json(sv.rho)},
        {"c_star", measure_json(ch.solution)},
        {"b_star", measure_json(bs.solution)},
        {"residuals",
         {{"survival", json_double(sv.residual)},
          {"characteristic", json_double(ch.residual)},
          {"b_star", json_double(bs.residual)}}},
        {"iterations",
         {{"survival", sv.iterations}, {"characteristic", ch.iterations}, {"b_star", bs.iterations}}},
    };
    emit(opts, "solve.json", doc.dump(2));
    return 0;
}

json rate_json(const irg::RateValue& rv) {
    json j{{"value", json_double(rv.value)}, {"reason", irg::inf_reason_name(rv.reason)}};
    for (const auto& [k, v] : rv.breakdown) j["breakdown"][k] = json_double(v);
    return j;
}

int cmd_rate(const CommonOpts& opts, const std::string& input_path) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open " + input_path);
    json input;
    in >> input;

    irg::MicroMeasure lambda;
    if (input.contains("lambda"))
        for (const auto& atom : input["lambda"]) {
            irg::TypeConfig k = parse_config_arg(atom.at("k").get<std::string>(), model.types.size());
            lambda.add(k, atom.at("weight").get<double>());
        }
    irg::MacroMeasure alpha;
    if (input.contains("alpha"))
        for (const auto& yj : input["alpha"]) {
            irg::Measure y(model.types.size());
            for (std::size_t s = 0; s < model.types.size(); ++s) y[s] = yj[s].get<double>();
            alpha.add(y);
        }

    json doc;
    doc["I_Mi"] = rate_json(irg::rate_micro(lambda, model.mu, model.kappa));
    doc["I_Ma"] = rate_json(irg::rate_macro(alpha, model.mu, model.kappa));
    irg::Measure nu = irg::clamp_nonneg(model.mu - irg::integrated_config(lambda, model.mu.size()) -
                                        irg::integrated_config(alpha, model.mu.size()));
    doc["I_Me"] = rate_json(irg::rate_meso(nu, model.mu, model.kappa));
    doc["I"] = rate_json(irg::rate_total(lambda, alpha, model.mu, model.kappa));
    doc["contracted_Mi"] = rate_json(irg::contracted_micro(lambda, model.mu, model.kappa));
    doc["contracted_Ma"] = rate_json(irg::contracted_macro(alpha, model.mu, model.kappa));
    emit(opts, "rate.json", doc.dump(2));
    return 0;
}

int cmd_minimize(const CommonOpts& opts, std::int64_t kmax, double tol) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    irg::MinimizeResult res = irg::minimize_rate(model.mu, model.kappa, kmax, tol);
    irg::RateValue total = irg::rate_total(res.lambda, res.alpha, model.mu, model.kappa);
    json alpha = json::array();
    for (const auto& y : res.alpha.atoms) alpha.push_back(measure_json(y));
    json doc{
        {"sigma", res.sigma_mu},
        {"regime", irg::regime_name(res.regime)},
        {"c_star", measure_json(res.c_star)},
        {"alpha", alpha},
        {"lambda_truncated", micro_json(res.lambda)},
        {"kmax", kmax},
        {"truncation_tail", json_double(res.truncation_tail)},
        {"critical_slow_tail", res.critical_slow_tail},
        {"reducible_composition", res.reducible},
        {"rate_total_at_minimizer", rate_json(total)},
    };
    emit(opts, "minimize.json", doc.dump(2));
    return 0;
}

int cmd_borel(const CommonOpts& opts, const std::string& root_label, std::int64_t kmax) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    std::size_t root = model.types.size();
    for (std::size_t s = 0; s < model.types.size(); ++s)
        if (model.types.labels[s] == root_label) root = s;
    if (root == model.types.size()) throw CLI::ValidationError("--root", "unknown type label");

    irg::BorelParams params{model.kappa, model.mu};
    json table = json::array();
    double cumulative = 0;
    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < model.mu.size(); ++s)
        if (model.mu[s] > 0) supp.push_back(s);
    json partial_sums = json::array();
    for (std::int64_t n = 1; n <= kmax; ++n) {
        double shell = 0;
        irg::detail::for_each_config_of_size(supp, model.mu.size(), n, [&](const irg::TypeConfig& k) {
            double p = irg::borel_pmf(params, root, k);
            if (p <= 0) return;
            shell += p;
            if (n <= 6) table.push_back({{"k", config_string(k)}, {"pmf", p}});
        });
        cumulative += shell;
        partial_sums.push_back({{"kmax", n}, {"extinction_partial_sum", cumulative}});
    }
    auto sv = irg::solve_survival(model.kappa, model.mu);
    json doc{{"root", root_label},
             {"pmf_table", table},
             {"partial_sums", partial_sums},
             {"extinction_probability_reference", json_double(1.0 - sv.rho[root])},
             {"survival_probability_reference", json_double(sv.rho[root])}};
    emit(opts, "borel.json", doc.dump(2));
    return 0;
}

int cmd_flory(const CommonOpts& opts, double t_max, std::int64_t steps, std::int64_t kmax) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    std::vector<double> grid;
    for (std::int64_t i = 0; i <= steps; ++i)
        grid.push_back(t_max * static_cast<double>(i) / static_cast<double>(steps));
    irg::FloryTrajectory traj = irg::flory_trajectory(model.mu, model.kappa, grid, kmax);

    std::ostringstream csv;
    csv << "t";
    for (std::size_t s = 0; s < model.types.size(); ++s) csv << ",gel_" << model.types.labels[s];
    csv << ",micro_mass,max_residual\n";
    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < model.mu.size(); ++s)
        if (model.mu[s] > 0) supp.push_back(s);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double max_res = 0;
        if (grid[i] > 0) {
            for (std::int64_t sz = 1; sz <= kmax; ++sz)
                irg::detail::for_each_config_of_size(supp, model.mu.size(), sz,
                                                     [&](const irg::TypeConfig& k) {
                                                         auto r = irg::flory_residual(model.mu, model.kappa,
                                                                                      grid[i], k);
                                                         max_res = std::max(max_res, r.residual);
                                                     });
        }
        csv << format_double(grid[i]);
        for (std::size_t s = 0; s < model.types.size(); ++s) csv << "," << format_double(traj.gel[i][s]);
        csv << "," << format_double(traj.states[i].mass()) << "," << format_double(max_res) << "\n";
    }
    emit(opts, "flory.csv", csv.str());
    return 0;
}

json report_json(const irg::VerificationReport& rep) {
    json details = json::object();
    for (const auto& [k, v] : rep.details) details[k] = json_double(v);
    return json{{"experiment", rep.experiment},
                {"theoretical", json_double(rep.theoretical)},
                {"empirical", json_double(rep.empirical)},
                {"uncertainty", json_double(rep.uncertainty)},
                {"tolerance", rep.tolerance},
                {"pass", rep.pass},
                {"details", details}};
}

int cmd_verify(const CommonOpts& opts, const std::string& suite, std::int64_t n, std::int64_t replicas,
               std::int64_t samples, std::int64_t kmax, double tolerance, const std::string& y_text) {
    irg::ModelConfig model = irg::load_model(opts.model_path);
    irg::VerificationReport rep;
    int threads = opts.effective_threads();
    if (suite == "giant-lln") {
        rep = irg::verify_giant_lln(model.mu, model.kappa, n, replicas, opts.seed,
                                    tolerance > 0 ? tolerance : 0.01, threads);
    } else if (suite == "micro-lln") {
        rep = irg::verify_micro_lln(model.mu, model.kappa, n, replicas, opts.seed, kmax,
                                    tolerance > 0 ? tolerance : 0.01, 0.05, threads);
    } else if (suite == "connectivity-rate") {
        std::vector<std::int64_t> grid{n, n + n / 2, 2 * n, 2 * n + n / 2};
        rep = irg::verify_connectivity_rate(model.mu, model.kappa, grid, samples, opts.seed,
                                            tolerance > 0 ? tolerance : 0.15, threads);
    } else if (suite == "macro-connection") {
        std::vector<std::int64_t> grid{n, n + n / 2, 2 * n, 2 * n + n / 2};
        irg::Measure y = model.mu;
        if (!y_text.empty()) {
            irg::TypeConfig dummy(model.types.size());
            std::stringstream ss(y_text);
            std::string tok;
            std::size_t i = 0;
            while (std::getline(ss, tok, ',')) {
                if (i >= y.size()) throw CLI::ValidationError("--y", "more entries than types");
                y[i++] = std::stod(tok);
            }
            if (i != y.size()) throw CLI::ValidationError("--y", "needs one entry per type");
            y.validate();
        }
        rep = irg::verify_macro_connection(y, model.kappa, grid, samples, opts.seed,
                                           tolerance > 0 ? tolerance : 0.20, threads);
    } else {
        throw CLI::ValidationError("suite", "unknown suite '" + suite + "'");
    }
    emit(opts, "verify_" + suite + ".json", report_json(rep).dump(2));
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inhomogeneous random graph toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::int64_t n = 1000, replicas = 10, samples = 10000, kmax = 40, hist_max = 10, steps = 20;
    double eps = 0.05, tol = 1e-12, t_max = 2.0, tolerance = 0.0;
    std::string k_text, input_path, root_label, suite, y_text;

    auto* simulate = app.add_subcommand("simulate", "sample graphs, emit per-replica component statistics");
    add_common(simulate, opts, true);
    simulate->add_option("--N", n, "number of vertices")->required();
    simulate->add_option("--replicas", replicas, "independent replicas");
    simulate->add_option("--epsilon", eps, "macroscopic threshold as a fraction of N");
    simulate->add_option("--hist-max", hist_max, "largest component size tracked in the histogram");

    auto* exact = app.add_subcommand("exact-dist", "exact law of N*Mi_N for small N");
    add_common(exact, opts, false);
    exact->add_option("--N", n, "number of vertices")->required();

    auto* tau = app.add_subcommand("tau", "spanning tree weight of a config by all applicable methods");
    add_common(tau, opts, false);
    tau->add_option("--k", k_text, "type config, comma separated counts")->required();

    auto* solve = app.add_subcommand("solve", "spectral radius and fixed points");
    add_common(solve, opts, false);
    solve->add_option("--tol", tol, "fixed point tolerance");

    auto* rate = app.add_subcommand("rate", "evaluate rate functions on a (lambda, alpha) input file");
    add_common(rate, opts, false);
    rate->add_option("--input", input_path, "JSON with lambda atoms and alpha vectors")->required();

    auto* minimize = app.add_subcommand("minimize", "minimizer of the rate function");
    add_common(minimize, opts, false);
    minimize->add_option("--kmax", kmax, "truncation for the minimizing micro measure");
    minimize->add_option("--tol", tol, "fixed point tolerance");

    auto* borel = app.add_subcommand("borel", "multi-type Borel pmf and extinction partial sums");
    add_common(borel, opts, false);
    borel->add_option("--root", root_label, "type label of the ancestor")->required();
    borel->add_option("--kmax", kmax, "partial sum horizon");

    auto* flory = app.add_subcommand("flory", "gel mass and micro state along a time grid");
    add_common(flory, opts, false);
    flory->add_option("--t-max", t_max, "end of the time grid");
    flory->add_option("--steps", steps, "number of grid steps");
    flory->add_option("--kmax", kmax, "truncation for micro mass");

    auto* verify = app.add_subcommand("verify", "statistical verification suites");
    add_common(verify, opts, true);
    verify->add_option("suite", suite, "giant-lln | micro-lln | connectivity-rate | macro-connection")
        ->required();
    verify->add_option("--N", n, "base vertex count");
    verify->add_option("--replicas", replicas, "replicas for LLN suites");
    verify->add_option("--samples", samples, "samples per grid point for rate suites");
    verify->add_option("--kmax", kmax, "comparison window for micro-lln");
    verify->add_option("--tolerance", tolerance, "override the suite tolerance");
    verify->add_option("--y", y_text, "macro atom for macro-connection, comma separated (default: mu)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opts, n, replicas, eps, hist_max);
        if (exact->parsed()) return cmd_exact_dist(opts, n);
        if (tau->parsed()) return cmd_tau(opts, k_text);
        if (solve->parsed()) return cmd_solve(opts, tol);
        if (rate->parsed()) return cmd_rate(opts, input_path);
        if (minimize->parsed()) return cmd_minimize(opts, kmax, tol);
        if (borel->parsed()) return cmd_borel(opts, root_label, kmax);
        if (flory->parsed()) return cmd_flory(opts, t_max, steps, kmax);
        if (verify->parsed()) return cmd_verify(opts, suite, n, replicas, samples, kmax, tolerance, y_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
