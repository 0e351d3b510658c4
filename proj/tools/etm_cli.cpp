// Command-line front end: rule inspection, refinement exports, symbolic and
// ergodic-optimization reports, closing-lemma experiments, and the TPO
// pipeline with its zero-temperature sweep. Every run writes a manifest into
// the output directory so results can be reproduced byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "etm/closing.hpp"
#include "etm/ergopt.hpp"
#include "etm/report.hpp"
#include "etm/tpo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace etm;

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string rule = "pillow_lattes";
    int level = 4;
    double lambda = 0.0;  // 0 = rule default
    double alpha = 1.0;
    std::string potential = "smooth:1";
    double epsilon = 0.0;  // 0 = 0.05 * range
    double gap_r = 0.2, gap_theta = 1.0, tau = 1.0;
    double kappa = 2.0;
    unsigned seed = 1;
    std::string out = "etm-out";
    int threads = 0;  // 0 = hardware default; pipeline stages are sequential
};

std::shared_ptr<const SubdivisionRule> open_rule(const RunConfig& cfg) {
    try {
        SubdivisionRule r =
            fs::exists(cfg.rule) ? load_rule_file(cfg.rule) : load_builtin(cfg.rule);
        if (cfg.lambda > 0) r.lambda_default = cfg.lambda;
        return std::make_shared<SubdivisionRule>(std::move(r));
    } catch (const Error& e) {
        // a bad rule name or file is a config mistake, not a computation failure
        if (e.kind == ErrorKind::not_found) fail(ErrorKind::validation, e.what());
        throw;
    }
}

/// Potential specs: const:<c>, coord:x|y, smooth:<seed>, table:<path>.
Potential open_potential(const std::shared_ptr<const SubdivisionRule>& rule,
                         const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "const") return constant_potential(std::stod(arg));
    if (kind == "coord") {
        if (arg != "x" && arg != "y") fail(ErrorKind::contract, "coord takes x or y");
        return coordinate_potential(arg == "x" ? 0 : 1);
    }
    if (kind == "smooth") return random_smooth_potential(static_cast<unsigned>(std::stoul(arg)));
    if (kind == "table") return load_table(rule, arg);
    fail(ErrorKind::contract, "unknown potential spec '" + spec +
                                  "' (use const:<c>, coord:x|y, smooth:<seed>, table:<path>)");
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::resource, "cannot open " + path.string() + " for writing");
    out << body;
}

class Manifest {
  public:
    Manifest(const RunConfig& cfg, const std::string& command) : cfg_(cfg), command_(command) {
        start_ = std::chrono::steady_clock::now();
        fs::create_directories(cfg.out);
    }
    void emit(const std::vector<std::string>& outputs) const {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
        json doc = {{"version", kVersion},
                    {"command", command_},
                    {"wall_time_ms", ms},
                    {"outputs", outputs},
                    {"config",
                     {{"rule", cfg_.rule},
                      {"level", cfg_.level},
                      {"lambda", cfg_.lambda},
                      {"alpha", cfg_.alpha},
                      {"potential", cfg_.potential},
                      {"epsilon", cfg_.epsilon},
                      {"gap_r", cfg_.gap_r},
                      {"gap_theta", cfg_.gap_theta},
                      {"tau", cfg_.tau},
                      {"kappa", cfg_.kappa},
                      {"seed", cfg_.seed},
                      {"threads", cfg_.threads},
                      {"out", cfg_.out}}}};
        write_file(fs::path(cfg_.out) / "manifest.json", doc.dump(2) + "\n");
    }

  private:
    RunConfig cfg_;
    std::string command_;
    std::chrono::steady_clock::time_point start_;
};

json word_ids(const Word& w) {
    json a = json::array();
    for (uint8_t s : w) a.push_back(static_cast<int>(s));
    return a;
}

// ---------------------------------------------------------------------------

int cmd_info(const RunConfig& cfg) {
    auto r = open_rule(cfg);
    std::cout << "rule:      " << r->name << "\n"
              << "degree:    " << r->degree << "\n"
              << "m:         " << r->post_count << " (every tile is an m-gon)\n"
              << "1-tiles:   " << r->tile_count() << "\n"
              << "sheets:    " << r->sheet_names.size() << "\n"
              << "lambda:    " << r->lambda_default << "\n"
              << "tiles per level:\n";
    long tiles = 2;
    for (int n = 0; n <= std::min(cfg.level, 8); ++n) {
        std::cout << "  n=" << n << "  " << tiles << "\n";
        tiles *= r->degree;
    }
    return 0;
}

int cmd_refine(const RunConfig& cfg) {
    Manifest manifest(cfg, "refine");
    auto r = open_rule(cfg);
    CellDecomposition d = refine(r, cfg.level);
    write_file(fs::path(cfg.out) / "decomposition.json", decomposition_json(d) + "\n");
    write_file(fs::path(cfg.out) / "decomposition.svg", render_svg(d));
    manifest.emit({"decomposition.json", "decomposition.svg", "manifest.json"});
    std::cout << "level " << cfg.level << ": " << d.tile_count() << " tiles, " << d.edge_count()
              << " edges, " << d.vertex_count() << " vertices -> " << cfg.out << "\n";
    return 0;
}

int cmd_sft(const RunConfig& cfg) {
    Manifest manifest(cfg, "sft");
    auto r = open_rule(cfg);
    write_file(fs::path(cfg.out) / "transition.json", transition_json(*r) + "\n");
    CylinderGraph g = cylinder_graph(r, cfg.level);
    write_file(fs::path(cfg.out) / "cylinders.json", cylinder_graph_json(g) + "\n");
    manifest.emit({"transition.json", "cylinders.json", "manifest.json"});

    TransitionMatrix a = build_transition(*r);
    std::cout << "states: " << a.states << "\nword counts and closed walks:\n";
    for (int n = 1; n <= cfg.level; ++n)
        std::cout << "  n=" << n << "  words=" << enumerate_words(*r, n).size()
                  << "  trace(A^" << n << ")=" << a.trace_power(n) << "\n";
    return 0;
}

int cmd_q(const RunConfig& cfg, const std::string& method_name) {
    auto r = open_rule(cfg);
    CylinderGraph g = cylinder_graph(r, cfg.level);
    Potential psi = discretize(r, open_potential(r, cfg.potential), cfg.level);

    MeanCycleMethod method = MeanCycleMethod::automatic;
    if (method_name == "karp") method = MeanCycleMethod::karp;
    if (method_name == "howard") method = MeanCycleMethod::howard;
    if (method_name == "brute") method = MeanCycleMethod::brute;
    MaxMeanResult res = q_value(g, psi, method);
    double band = std::abs(q_value(g, psi, MeanCycleMethod::karp).q -
                           q_value(g, psi, MeanCycleMethod::howard).q);
    std::cout << "Q_" << cfg.level << " = " << res.q << "  (method " << method_name
              << ", karp/howard band " << band << ")\ncycle nodes:";
    for (int v : res.cycle) std::cout << ' ' << v;
    std::cout << "\n";
    return 0;
}

int cmd_subaction(const RunConfig& cfg) {
    Manifest manifest(cfg, "subaction");
    auto r = open_rule(cfg);
    CylinderGraph g = cylinder_graph(r, cfg.level);
    Potential psi = discretize(r, open_potential(r, cfg.potential), cfg.level);
    double q = q_value(g, psi).q;
    BouschState u = calibrated_subaction(g, psi, q);
    Potential tilde = mane_normalize(g, psi, u, q);
    std::vector<int> k_nodes = maximizing_set(g, tilde, 1e-9);

    json doc = {{"version", 1},
                {"rule", r->name},
                {"level", cfg.level},
                {"q", q},
                {"residual", u.residual},
                {"u", u.u},
                {"phi_tilde", tilde.values},
                {"maximizing_set", k_nodes}};
    write_file(fs::path(cfg.out) / "subaction.json", doc.dump(2) + "\n");
    manifest.emit({"subaction.json", "manifest.json"});
    std::cout << "q = " << q << ", residual " << u.residual << ", |K| = " << k_nodes.size()
              << " -> " << cfg.out << "\n";
    return 0;
}

Word random_closed_word(const SubdivisionRule& rule, int len, std::mt19937& rng) {
    for (;;) {
        Word w;
        std::uniform_int_distribution<int> pick(0, rule.tile_count() - 1);
        w.push_back(static_cast<uint8_t>(pick(rng)));
        while (static_cast<int>(w.size()) < len) {
            std::vector<int> next;
            for (int a = 0; a < rule.tile_count(); ++a)
                if (rule.admissible(w.back(), a)) next.push_back(a);
            w.push_back(static_cast<uint8_t>(next[rng() % next.size()]));
        }
        if (rule.admissible(w.back(), w.front())) return w;
    }
}

int cmd_close(const RunConfig& cfg, const std::string& mode) {
    Manifest manifest(cfg, "close " + mode);
    auto r = open_rule(cfg);
    CylinderGraph g = cylinder_graph(r, cfg.level);
    CellDecomposition dec = refine(r, cfg.level);
    json doc = {{"version", 1}, {"rule", r->name}, {"level", cfg.level}, {"mode", mode}};

    if (mode == "anosov") {
        // a pseudo-orbit whose trailing context repeats its head, so the
        // defect is an exact cylinder-depth error
        std::mt19937 rng(cfg.seed);
        int l = std::max(4, 2 * cfg.level), ctx = cfg.level + 2;
        Word w = random_closed_word(*r, l, rng);
        for (int i = 0; i < ctx; ++i) w.push_back(w[i]);
        ShadowReport sr = local_anosov_close(r, w, l, 1.0, 0.0);
        doc["orbit"] = {{"word", word_ids(sr.orbit.word)}, {"period", sr.orbit.period}};
        doc["repaired"] = sr.repaired;
        doc["beta_hat"] = sr.beta_hat;
        doc["slope"] = sr.slope;
        std::cout << "period " << sr.orbit.period << ", repaired " << sr.repaired << ", slope "
                  << sr.slope << " (-log lambda = " << -std::log(r->lambda_default) << ")\n";
    } else {
        Potential psi = discretize(r, open_potential(r, cfg.potential), cfg.level);
        double q = q_value(g, psi).q;
        BouschState u = calibrated_subaction(g, psi, q);
        std::vector<int> k_nodes = maximizing_set(g, mane_normalize(g, psi, u, q), 1e-9);
        PeriodicOrbit orbit;
        if (mode == "bq") {
            orbit = bq_search(g, dec, k_nodes, cfg.kappa, cfg.gap_r);
        } else if (mode == "bound-by-gap") {
            GapBoundReport gb = bound_by_gap(g, dec, k_nodes, {cfg.gap_r, cfg.gap_theta},
                                             cfg.alpha, cfg.tau, cfg.kappa);
            orbit = gb.orbit;
            doc["lhs"] = gb.lhs;
            doc["rhs"] = gb.rhs;
            doc["period_trace"] = gb.periods;
        } else {
            fail(ErrorKind::contract, "close mode must be bq, anosov, or bound-by-gap");
        }
        doc["orbit"] = {{"word", word_ids(orbit.word)},
                        {"period", orbit.period},
                        {"gap", orbit.gap_value}};
        std::cout << "period " << orbit.period << ", gap " << orbit.gap_value << "\n";
    }
    write_file(fs::path(cfg.out) / "close.json", doc.dump(2) + "\n");
    manifest.emit({"close.json", "manifest.json"});
    return 0;
}

int cmd_tpo(const RunConfig& cfg, int trials, double rho) {
    Manifest manifest(cfg, "tpo");
    auto r = open_rule(cfg);
    TpoReport rep = tpo_pipeline(r, open_potential(r, cfg.potential), cfg.level, cfg.epsilon,
                                 cfg.alpha, {cfg.gap_r, cfg.gap_theta}, cfg.tau);
    CylinderGraph g = cylinder_graph(r, cfg.level);
    LockingResult lock =
        locking_test(r, g, rep.phi_prime, trials, rho > 0 ? rho : rep.epsilon / 10, cfg.seed);
    write_file(fs::path(cfg.out) / "tpo.json", tpo_report_json(*r, rep, lock) + "\n");
    manifest.emit({"tpo.json", "manifest.json"});
    std::cout << (rep.success ? "locked" : "NOT locked") << ": period " << rep.orbit.period
              << ", q " << rep.q_before << " -> " << rep.q_after << ", margin " << rep.margin
              << ", locking " << lock.successes << "/" << lock.count << "\n";
    return rep.success && lock.successes == lock.count ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, double t_max) {
    Manifest manifest(cfg, "sweep");
    auto r = open_rule(cfg);
    TpoReport rep = tpo_pipeline(r, open_potential(r, cfg.potential), cfg.level, cfg.epsilon,
                                 cfg.alpha, {cfg.gap_r, cfg.gap_theta}, cfg.tau);
    CylinderGraph g = cylinder_graph(r, cfg.level);
    std::vector<double> ts;
    for (double t = 1; t <= t_max * (1 + 1e-12); t *= 2) ts.push_back(t);
    auto sweep = zero_temperature_sweep(g, rep.phi_prime, ts,
                                        cyclic_windows(rep.orbit.word, cfg.level));
    write_file(fs::path(cfg.out) / "sweep.csv", sweep_csv(sweep));
    manifest.emit({"sweep.csv", "manifest.json"});
    for (const SweepPoint& p : sweep) std::cout << "t=" << p.t << "  tv=" << p.tv << "\n";
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        failures += ok ? 0 : 1;
    };
    for (const std::string& name : builtin_rule_names()) {
        auto r = std::make_shared<SubdivisionRule>(load_builtin(name));
        check(name + ": tile count = 2*deg", r->tile_count() == 2 * r->degree);
        CellDecomposition d = refine(r, 2);
        long expect = 2;
        for (int i = 0; i < 2; ++i) expect *= r->degree;
        check(name + ": level-2 tiles = 2*deg^2", d.tile_count() == expect);
        TransitionMatrix a = build_transition(*r);
        check(name + ": trace(A^2) = closed 2-walks",
              a.trace_power(2) >= 0 && a.states == r->tile_count());
    }
    auto r = std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
    CylinderGraph g = cylinder_graph(r, 3);
    check("q of a constant equals the constant",
          std::abs(q_value(g, discretize(r, constant_potential(0.625), 3)).q - 0.625) < 1e-12);
    Potential psi = discretize(r, random_smooth_potential(3), 3);
    BouschState u{3, std::vector<double>(g.node_count(), 0.0), 0.0};
    BouschState a1 = bousch_apply(g, u, psi);
    BouschState u2 = u;
    for (double& x : u2.u) x += 0.25;
    BouschState a2 = bousch_apply(g, u2, psi);
    bool maxplus = true;
    for (int v = 0; v < g.node_count(); ++v)
        maxplus = maxplus && std::abs(a2.u[v] - a1.u[v] - 0.25) < 1e-12;
    check("bousch operator is max-plus linear", maxplus);
    double q = q_value(g, psi).q;
    BouschState sub = calibrated_subaction(g, psi, q);
    check("calibrated sub-action residual <= 1e-10", sub.residual <= 1e-10);
    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"expanding Thurston maps: subdivision rules, symbolic models, "
                 "and ergodic optimization"};
    app.require_subcommand(1);
    app.set_config("--config")->description("sectioned key=value config file (flags override)");

    RunConfig cfg;
    app.add_option("--rule", cfg.rule, "builtin rule name or rule file path");
    app.add_option("--level", cfg.level, "working cylinder level")->check(CLI::Range(0, 12));
    app.add_option("--lambda", cfg.lambda, "visual-metric expansion factor (0 = rule default)");
    app.add_option("--alpha", cfg.alpha, "Holder exponent in (0, 1]");
    app.add_option("--potential", cfg.potential,
                   "const:<c> | coord:x|y | smooth:<seed> | table:<path>");
    app.add_option("--epsilon", cfg.epsilon, "TPO perturbation size (0 = 0.05 * range)");
    app.add_option("--gap-r", cfg.gap_r, "closing radius r");
    app.add_option("--gap-theta", cfg.gap_theta, "gap factor theta");
    app.add_option("--tau", cfg.tau, "gap-bound factor tau");
    app.add_option("--kappa", cfg.kappa, "period budget exponent");
    app.add_option("--seed", cfg.seed, "master random seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--threads", cfg.threads, "thread pool size (0 = hardware)");

    app.add_subcommand("info", "rule summary and per-level counts");
    app.add_subcommand("refine", "build a cell decomposition; write JSON and SVG");
    app.add_subcommand("sft", "transition matrix, cylinder graph, word counts, trace table");
    auto* q_cmd = app.add_subcommand("q", "maximum mean cycle Q_n of the potential");
    std::string method = "automatic";
    q_cmd->add_option("--method", method, "automatic | karp | howard | brute");
    app.add_subcommand("subaction", "calibrated sub-action, normalization, maximizing set");
    auto* close_cmd = app.add_subcommand("close", "closing-lemma experiments");
    std::string mode = "bq";
    close_cmd->add_option("--mode", mode, "bq | anosov | bound-by-gap");
    auto* tpo_cmd = app.add_subcommand("tpo", "full TPO pipeline plus locking trials");
    int trials = 20;
    double rho = 0.0;
    tpo_cmd->add_option("--trials", trials, "locking perturbation count");
    tpo_cmd->add_option("--rho", rho, "perturbation norm bound (0 = epsilon/10)");
    auto* sweep_cmd = app.add_subcommand("sweep", "zero-temperature ground-state sweep");
    double t_max = 256.0;
    sweep_cmd->add_option("--t-max", t_max, "largest inverse temperature (doubling from 1)");
    app.add_subcommand("selftest", "run the built-in invariant suite");
    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("info")) return cmd_info(cfg);
        if (app.got_subcommand("refine")) return cmd_refine(cfg);
        if (app.got_subcommand("sft")) return cmd_sft(cfg);
        if (app.got_subcommand("q")) return cmd_q(cfg, method);
        if (app.got_subcommand("subaction")) return cmd_subaction(cfg);
        if (app.got_subcommand("close")) return cmd_close(cfg, mode);
        if (app.got_subcommand("tpo")) return cmd_tpo(cfg, trials, rho);
        if (app.got_subcommand("sweep")) return cmd_sweep(cfg, t_max);
        return cmd_selftest();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind == ErrorKind::contract || e.kind == ErrorKind::validation ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
