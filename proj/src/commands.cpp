#include "sympdyn/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "sympdyn/elliptic.hpp"
#include "sympdyn/error.hpp"
#include "sympdyn/instances.hpp"
#include "sympdyn/report.hpp"
#include "sympdyn/selftest.hpp"
#include "sympdyn/sympformer.hpp"

namespace sympdyn::harness {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

DampingSchedule make_damping(const ExperimentConfig& cfg) {
    if (cfg.damping == "zero") return DampingSchedule::zero();
    if (cfg.damping == "constant") return DampingSchedule::constant(cfg.damping_m);
    if (cfg.damping == "polynomial")
        return DampingSchedule::polynomial(cfg.damping_r, cfg.damping_t0);
    return DampingSchedule::log_linear(cfg.damping_r, cfg.damping_m, cfg.damping_t0);
}

integrators::Method make_method(const std::string& name) {
    if (name == "plain-euler") return integrators::Method::PlainEuler;
    if (name == "conformal-euler") return integrators::Method::ConformalEuler;
    if (name == "exp-euler") return integrators::Method::ExpEuler;
    if (name == "ab2") return integrators::Method::Ab2;
    if (name == "etd-ab2") return integrators::Method::EtdAb2;
    return integrators::Method::Rk4Reference;
}

integrators::SystemKind make_system(const std::string& name) {
    if (name == "linear") return integrators::SystemKind::Linear;
    if (name == "baseline") return integrators::SystemKind::Baseline;
    return integrators::SystemKind::Softmax;
}

integrators::IntegratorSpec make_spec(const ExperimentConfig& cfg) {
    integrators::IntegratorSpec spec;
    spec.method = make_method(cfg.integrator);
    spec.h = cfg.h;
    spec.damping = make_damping(cfg);
    spec.alpha_mode = cfg.alpha_mode == "constant" ? integrators::AlphaMode::Constant
                                                   : integrators::AlphaMode::Ratio;
    spec.alpha_const = cfg.alpha_const;
    return spec;
}

struct Instance {
    AttentionWeights weights;
    Ensemble state;
};

Instance build_instance(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed);
    AttentionWeights w = shared_basis_weights(rng, static_cast<std::size_t>(cfg.d),
                                              cfg.weight_scale);
    Ensemble e = gaussian_ensemble(rng, static_cast<std::size_t>(cfg.n),
                                   static_cast<std::size_t>(cfg.d), cfg.x_scale, cfg.y_scale);
    return {std::move(w), std::move(e)};
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[192];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void summarize(RunOutcome& out, const std::string& label, const RunReport& rep) {
    out.lines.push_back(label + ": " + std::to_string(rep.rows.size()) + " rows, " +
                        fmt("final energy %.8g, min energy %.8g", rep.final_energy,
                            rep.min_energy) +
                        ", oracle calls " + std::to_string(rep.total_oracle_calls) +
                        fmt(", wall %.3f s", rep.wall_seconds) + ", status " + rep.status);
}

// ------------------------------ simulate ------------------------------------

RunOutcome cmd_simulate(const ExperimentConfig& cfg) {
    RunOutcome out;
    const Instance inst = build_instance(cfg);
    const auto start = Clock::now();
    const integrators::Trajectory traj =
        integrators::integrate(inst.state, make_system(cfg.system), inst.weights, make_spec(cfg),
                               cfg.steps, cfg.record_every);
    RunReport rep = report_from_trajectory(traj);
    rep.wall_seconds = seconds_since(start);

    const std::string csv = out_path(cfg, "simulate.csv");
    emit_csv(rep, csv);
    out.files.push_back(csv);
    if (cfg.svg) {
        const std::string svg = out_path(cfg, "simulate.svg");
        emit_svg(rep, svg, std::string("simulate: ") + cfg.system + " / " + cfg.integrator);
        out.files.push_back(svg);
    }
    summarize(out, "simulate", rep);
    out.exit_code = rep.ok() ? 0 : 1;
    return out;
}

// --------------------------- verify-elliptic --------------------------------

RunOutcome cmd_verify_elliptic(const ExperimentConfig& cfg) {
    if (cfg.system != "linear")
        throw ParseError("verify-elliptic runs the linear system; set system = linear");
    RunOutcome out;
    const Instance inst = build_instance(cfg);
    const DampingSchedule damping = make_damping(cfg);

    integrators::IntegratorSpec spec = make_spec(cfg);
    spec.method = integrators::Method::Rk4Reference;

    const auto start = Clock::now();
    const integrators::Trajectory traj = integrators::integrate(
        inst.state, integrators::SystemKind::Linear, inst.weights, spec, cfg.steps, 1);

    elliptic::FiniteNMomentState f = elliptic::FiniteNMomentState::initial(inst.state.X);
    double dev_x = 0.0, dev_y = 0.0, dev_s = 0.0;
    std::ofstream dev_csv(out_path(cfg, "verify_elliptic_deviations.csv"));
    dev_csv << "t,dev_x,dev_y,dev_second_moment\n";
    const double inv_n = 1.0 / static_cast<double>(inst.state.n());
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const Ensemble& e = traj.states[k];
        const double dx = max_abs_diff(e.X, mul_nt(inst.state.X, f.G));
        const double dy = max_abs_diff(e.Y, mul_nt(e.X, f.P));
        const double ds = max_abs_diff(inv_n * mul_tn(e.X, e.X), f.S);
        dev_x = std::max(dev_x, dx);
        dev_y = std::max(dev_y, dy);
        dev_s = std::max(dev_s, ds);
        char row[160];
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g\n", traj.times[k], dx, dy, ds);
        dev_csv << row;
        if (k + 1 < traj.states.size())
            f = elliptic::rk4_finite_n_step(f, traj.times[k], spec.h, inst.weights, damping);
    }
    dev_csv.close();
    out.files.push_back(out_path(cfg, "verify_elliptic_deviations.csv"));

    RunReport rep = report_from_trajectory(traj);
    rep.wall_seconds = seconds_since(start);
    const std::string csv = out_path(cfg, "verify_elliptic_run.csv");
    emit_csv(rep, csv);
    out.files.push_back(csv);

    out.lines.push_back(fmt("max |X - G X0| = %.6e", dev_x));
    out.lines.push_back(fmt("max |Y - P X| = %.6e", dev_y));
    out.lines.push_back(fmt("max |S - X^T X / N| = %.6e", dev_s));
    summarize(out, "verify-elliptic", rep);
    out.exit_code = rep.ok() ? 0 : 1;
    return out;
}

// ----------------------------- energy-decay ---------------------------------

RunOutcome cmd_energy_decay(const ExperimentConfig& cfg) {
    RunOutcome out;
    const Instance inst = build_instance(cfg);
    const auto start = Clock::now();

    const integrators::Trajectory accel =
        integrators::integrate(inst.state, make_system(cfg.system), inst.weights, make_spec(cfg),
                               cfg.steps, cfg.record_every);
    const integrators::Trajectory base =
        integrators::integrate(inst.state, integrators::SystemKind::Baseline, inst.weights,
                               make_spec(cfg), cfg.steps, cfg.record_every);

    RunReport rep_a = report_from_trajectory(accel);
    RunReport rep_b = report_from_trajectory(base);
    rep_a.wall_seconds = rep_b.wall_seconds = seconds_since(start);

    const std::string csv_a = out_path(cfg, "energy_decay_accelerated.csv");
    const std::string csv_b = out_path(cfg, "energy_decay_baseline.csv");
    emit_csv(rep_a, csv_a);
    emit_csv(rep_b, csv_b);
    out.files.push_back(csv_a);
    out.files.push_back(csv_b);

    // energy against matched oracle budgets
    const std::size_t rows = std::min(rep_a.rows.size(), rep_b.rows.size());
    std::ofstream decay(out_path(cfg, "energy_decay.csv"));
    decay << "oracle_calls,energy_accelerated,energy_baseline\n";
    SvgSeries sa{"accelerated", {}, {}}, sb{"baseline", {}, {}};
    double best_gain = 0.0;
    for (std::size_t k = 0; k < rows; ++k) {
        char row[160];
        std::snprintf(row, sizeof row, "%ld,%.17g,%.17g\n", rep_a.rows[k].oracle_calls,
                      rep_a.rows[k].energy, rep_b.rows[k].energy);
        decay << row;
        sa.x.push_back(static_cast<double>(rep_a.rows[k].oracle_calls));
        sa.y.push_back(rep_a.rows[k].energy);
        sb.x.push_back(static_cast<double>(rep_b.rows[k].oracle_calls));
        sb.y.push_back(rep_b.rows[k].energy);
        best_gain = std::max(best_gain, (rep_b.rows[k].energy - rep_a.rows[k].energy) /
                                            std::fabs(rep_b.rows[k].energy));
    }
    decay.close();
    out.files.push_back(out_path(cfg, "energy_decay.csv"));
    if (cfg.svg) {
        write_svg_chart(out_path(cfg, "energy_decay.svg"), {sa, sb},
                        {"energy vs oracle budget", "oracle calls", "interaction energy", false});
        out.files.push_back(out_path(cfg, "energy_decay.svg"));
    }

    summarize(out, "accelerated", rep_a);
    summarize(out, "baseline", rep_b);
    out.lines.push_back(fmt("best relative energy gain over baseline: %.4f", best_gain));
    out.exit_code = (rep_a.ok() && rep_b.ok()) ? 0 : 1;
    return out;
}

// -------------------------- compare-integrators -----------------------------

RunOutcome cmd_compare_integrators(const ExperimentConfig& cfg) {
    RunOutcome out;
    const Instance inst = build_instance(cfg);
    const std::vector<std::string> methods{"plain-euler", "conformal-euler", "exp-euler",
                                           "ab2",         "etd-ab2",         "rk4"};

    std::vector<integrators::Trajectory> trajs(methods.size());
    {
        // independent runs; each thread owns its oracle, outputs written after join
        std::vector<std::thread> pool;
        pool.reserve(methods.size());
        for (std::size_t i = 0; i < methods.size(); ++i) {
            pool.emplace_back([&, i]() {
                ExperimentConfig local = cfg;
                local.integrator = methods[i];
                trajs[i] = integrators::integrate(inst.state, make_system(cfg.system),
                                                  inst.weights, make_spec(local), cfg.steps,
                                                  cfg.record_every);
            });
        }
        for (auto& th : pool) th.join();
    }

    bool all_ok = true;
    std::vector<SvgSeries> energies;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        RunReport rep = report_from_trajectory(trajs[i]);
        const std::string csv = out_path(cfg, "compare_" + methods[i] + ".csv");
        emit_csv(rep, csv);
        out.files.push_back(csv);
        summarize(out, methods[i], rep);
        all_ok = all_ok && rep.ok();
        SvgSeries s{methods[i], {}, {}};
        for (const auto& r : rep.rows) {
            s.x.push_back(r.t);
            s.y.push_back(r.energy);
        }
        energies.push_back(std::move(s));
    }
    if (cfg.svg) {
        write_svg_chart(out_path(cfg, "compare_integrators.svg"), energies,
                        {"energy by integrator", "t", "interaction energy", false});
        out.files.push_back(out_path(cfg, "compare_integrators.svg"));
    }
    out.exit_code = all_ok ? 0 : 1;
    return out;
}

// -------------------------- sympformer-forward ------------------------------

RunOutcome cmd_sympformer_forward(const ExperimentConfig& cfg) {
    RunOutcome out;
    sympformer::SympFormerConfig mcfg;
    sympformer::ModelWeights weights;
    if (cfg.sf_weights.empty()) {
        mcfg = sympformer::SympFormerConfig::make(
            static_cast<std::size_t>(cfg.sf_layers), static_cast<std::size_t>(cfg.sf_heads),
            static_cast<std::size_t>(cfg.sf_dim), static_cast<std::size_t>(cfg.sf_seq),
            static_cast<std::size_t>(cfg.sf_vocab));
        mcfg.method = sympformer::parse_method(cfg.sf_method);
        mcfg.attention = sympformer::parse_attention(cfg.sf_attention);
        mcfg.causal = cfg.sf_causal;
        mcfg.t0 = cfg.sf_t0;
        mcfg.c_log = cfg.sf_c_log;
        mcfg.c_lin = cfg.sf_c_lin;
        weights = sympformer::ModelWeights::random_init(mcfg, cfg.seed);
        const std::string wpath = out_path(cfg, "sympformer_weights.bin");
        sympformer::save_weights(wpath, mcfg, weights);
        out.files.push_back(wpath);
        out.lines.push_back("weights: seeded random initialization (saved to " + wpath + ")");
    } else {
        auto loaded = sympformer::load_weights(cfg.sf_weights);
        mcfg = std::move(loaded.first);
        weights = std::move(loaded.second);
        out.lines.push_back("weights: loaded " + cfg.sf_weights);
    }

    std::vector<std::vector<long>> tokens;
    if (cfg.sf_tokens.empty()) {
        CounterRng rng(cfg.seed, 17);
        tokens.resize(2, std::vector<long>(mcfg.seq_len));
        for (auto& row : tokens)
            for (auto& id : row)
                id = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(mcfg.vocab));
    } else {
        tokens = sympformer::load_tokens(cfg.sf_tokens, mcfg.seq_len);
    }

    const auto start = Clock::now();
    const std::vector<Matrix> logits = sympformer::forward(tokens, weights, mcfg);
    const double wall = seconds_since(start);

    const std::string lpath = out_path(cfg, "sympformer_logits.csv");
    {
        std::ofstream os(lpath);
        os << "batch,pos";
        for (std::size_t v = 0; v < mcfg.vocab; ++v) os << ",v" << v;
        os << "\n";
        char buf[40];
        for (std::size_t b = 0; b < logits.size(); ++b)
            for (std::size_t i = 0; i < mcfg.seq_len; ++i) {
                os << b << ',' << i;
                for (std::size_t v = 0; v < mcfg.vocab; ++v) {
                    std::snprintf(buf, sizeof buf, "%.17g", logits[b](i, v));
                    os << ',' << buf;
                }
                os << "\n";
            }
    }
    out.files.push_back(lpath);

    out.lines.push_back("logits shape: " + std::to_string(logits.size()) + " x " +
                        std::to_string(mcfg.seq_len) + " x " + std::to_string(mcfg.vocab));
    out.lines.push_back(fmt("forward wall %.3f s", wall));

    // shape/causality/determinism report
    const std::vector<Matrix> rerun = sympformer::forward(tokens, weights, mcfg);
    bool deterministic = true;
    for (std::size_t b = 0; b < logits.size() && deterministic; ++b)
        for (std::size_t i = 0; i < logits[b].size(); ++i)
            if (logits[b].data()[i] != rerun[b].data()[i]) {
                deterministic = false;
                break;
            }
    out.lines.push_back(std::string("determinism: ") +
                        (deterministic ? "bit-exact" : "VIOLATED"));

    if (mcfg.causal && mcfg.seq_len > 1) {
        std::vector<std::vector<long>> perturbed = {tokens[0]};
        perturbed[0].back() = (perturbed[0].back() + 1) % static_cast<long>(mcfg.vocab);
        const std::vector<Matrix> lp = sympformer::forward(perturbed, weights, mcfg);
        bool causal_ok = true;
        for (std::size_t i = 0; i + 1 < mcfg.seq_len && causal_ok; ++i)
            for (std::size_t v = 0; v < mcfg.vocab; ++v)
                if (logits[0](i, v) != lp[0](i, v)) {
                    causal_ok = false;
                    break;
                }
        out.lines.push_back(std::string("causality: ") + (causal_ok ? "exact" : "VIOLATED"));
        if (!causal_ok || !deterministic) out.exit_code = 1;
    } else if (!deterministic) {
        out.exit_code = 1;
    }
    return out;
}

// -------------------------------- selftest ----------------------------------

RunOutcome cmd_selftest(const ExperimentConfig&) {
    RunOutcome out;
    const auto results = selftest::run_all_criteria();
    for (const auto& r : results)
        out.lines.push_back(std::string(r.pass ? "PASS" : "FAIL") + " criterion " +
                            std::to_string(r.id) + ": " + r.name + " — " + r.detail);
    const bool ok = selftest::all_passed(results);
    out.lines.push_back(ok ? "selftest: all criteria passed"
                           : "selftest: at least one criterion FAILED");
    out.exit_code = ok ? 0 : 1;
    return out;
}

} // namespace

RunOutcome run(const ExperimentConfig& cfg) {
    switch (cfg.command) {
        case Command::Simulate: return cmd_simulate(cfg);
        case Command::VerifyElliptic: return cmd_verify_elliptic(cfg);
        case Command::EnergyDecay: return cmd_energy_decay(cfg);
        case Command::CompareIntegrators: return cmd_compare_integrators(cfg);
        case Command::SympformerForward: return cmd_sympformer_forward(cfg);
        case Command::Selftest: return cmd_selftest(cfg);
    }
    throw Error("run: unhandled command");
}

} // namespace sympdyn::harness
