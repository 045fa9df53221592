#include "sympdyn/config.hpp"

#include <cstdio>
#include <sstream>

#include "sympdyn/error.hpp"
#include "sympdyn/kv.hpp"

namespace sympdyn::harness {

const char* command_name(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::VerifyElliptic: return "verify-elliptic";
        case Command::EnergyDecay: return "energy-decay";
        case Command::CompareIntegrators: return "compare-integrators";
        case Command::SympformerForward: return "sympformer-forward";
        case Command::Selftest: return "selftest";
    }
    return "?";
}

Command parse_command(const std::string& s) {
    if (s == "simulate") return Command::Simulate;
    if (s == "verify-elliptic") return Command::VerifyElliptic;
    if (s == "energy-decay") return Command::EnergyDecay;
    if (s == "compare-integrators") return Command::CompareIntegrators;
    if (s == "sympformer-forward") return Command::SympformerForward;
    if (s == "selftest") return Command::Selftest;
    throw ParseError("unknown command '" + s + "'");
}

ExperimentConfig default_config(Command c) {
    ExperimentConfig cfg;
    cfg.command = c;
    switch (c) {
        case Command::Simulate:
            break; // struct initializers are the simulate defaults
        case Command::VerifyElliptic:
            cfg.system = "linear";
            cfg.n = 16;
            cfg.d = 2;
            cfg.steps = 1000;
            cfg.h = 1e-3;
            cfg.integrator = "rk4";
            cfg.weight_scale = 0.8;
            cfg.x_scale = 0.7;
            break;
        case Command::EnergyDecay:
            cfg.n = 32;
            cfg.d = 4;
            cfg.steps = 400;
            cfg.h = 0.05;
            cfg.weight_scale = 0.002;
            cfg.seed = 99;
            break;
        case Command::CompareIntegrators:
            cfg.steps = 200;
            cfg.h = 0.01;
            break;
        case Command::SympformerForward:
        case Command::Selftest:
            break;
    }
    return cfg;
}

namespace {

long parse_long(const std::string& v, std::size_t line, const char* key) {
    try {
        std::size_t used = 0;
        const long out = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParseError(line, std::string("key '") + key + "': expected an integer, got '" + v +
                                   "'");
    }
}

double parse_double(const std::string& v, std::size_t line, const char* key) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParseError(line, std::string("key '") + key + "': expected a number, got '" + v +
                                   "'");
    }
}

bool parse_bool(const std::string& v, std::size_t line, const char* key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(line, std::string("key '") + key + "': expected true/false, got '" + v + "'");
}

std::uint64_t parse_seed(const std::string& v, std::size_t line) {
    if (!v.empty() && v[0] == '-')
        throw ParseError(line, "key 'seed': must be a 64-bit unsigned integer, got '" + v + "'");
    try {
        std::size_t used = 0;
        const unsigned long long out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParseError(line, "key 'seed': must be a 64-bit unsigned integer, got '" + v + "'");
    }
}

void check_choice(const std::string& v, std::initializer_list<const char*> allowed,
                  std::size_t line, const char* key) {
    for (const char* a : allowed)
        if (v == a) return;
    std::string opts;
    for (const char* a : allowed) {
        if (!opts.empty()) opts += ", ";
        opts += a;
    }
    throw ParseError(line, std::string("key '") + key + "': '" + v + "' is not one of {" + opts +
                               "}");
}

void check_positive(double v, std::size_t line, const char* key) {
    if (!(v > 0.0))
        throw ParseError(line, std::string("key '") + key + "': must be positive");
}

void check_positive(long v, std::size_t line, const char* key) {
    if (v <= 0) throw ParseError(line, std::string("key '") + key + "': must be positive");
}

} // namespace

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               std::size_t line) {
    if (key == "system") {
        check_choice(value, {"linear", "softmax", "baseline"}, line, "system");
        cfg.system = value;
    } else if (key == "n") {
        cfg.n = parse_long(value, line, "n");
        check_positive(cfg.n, line, "n");
    } else if (key == "d") {
        cfg.d = parse_long(value, line, "d");
        check_positive(cfg.d, line, "d");
    } else if (key == "steps") {
        cfg.steps = parse_long(value, line, "steps");
        if (cfg.steps < 0) throw ParseError(line, "key 'steps': must be >= 0");
    } else if (key == "h") {
        cfg.h = parse_double(value, line, "h");
        check_positive(cfg.h, line, "h");
    } else if (key == "seed") {
        cfg.seed = parse_seed(value, line);
    } else if (key == "weight_scale") {
        cfg.weight_scale = parse_double(value, line, "weight_scale");
        check_positive(cfg.weight_scale, line, "weight_scale");
    } else if (key == "x_scale") {
        cfg.x_scale = parse_double(value, line, "x_scale");
    } else if (key == "y_scale") {
        cfg.y_scale = parse_double(value, line, "y_scale");
    } else if (key == "damping") {
        check_choice(value, {"zero", "constant", "polynomial", "log-linear"}, line, "damping");
        cfg.damping = value;
    } else if (key == "damping_m") {
        cfg.damping_m = parse_double(value, line, "damping_m");
        if (cfg.damping_m < 0.0) throw ParseError(line, "key 'damping_m': must be >= 0");
    } else if (key == "damping_r") {
        cfg.damping_r = parse_double(value, line, "damping_r");
        if (cfg.damping_r < 0.0) throw ParseError(line, "key 'damping_r': must be >= 0");
    } else if (key == "damping_t0") {
        cfg.damping_t0 = parse_double(value, line, "damping_t0");
        check_positive(cfg.damping_t0, line, "damping_t0");
    } else if (key == "integrator") {
        check_choice(value, {"plain-euler", "conformal-euler", "exp-euler", "ab2", "etd-ab2",
                             "rk4"},
                     line, "integrator");
        cfg.integrator = value;
    } else if (key == "alpha_mode") {
        check_choice(value, {"ratio", "constant"}, line, "alpha_mode");
        cfg.alpha_mode = value;
    } else if (key == "alpha_const") {
        cfg.alpha_const = parse_double(value, line, "alpha_const");
        if (!(cfg.alpha_const > 0.0 && cfg.alpha_const <= 1.0))
            throw ParseError(line, "key 'alpha_const': must lie in (0, 1]");
    } else if (key == "record_every") {
        cfg.record_every = parse_long(value, line, "record_every");
        check_positive(cfg.record_every, line, "record_every");
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "svg") {
        cfg.svg = parse_bool(value, line, "svg");
    } else if (key == "sf_layers") {
        cfg.sf_layers = parse_long(value, line, "sf_layers");
        if (cfg.sf_layers < 0) throw ParseError(line, "key 'sf_layers': must be >= 0");
    } else if (key == "sf_heads") {
        cfg.sf_heads = parse_long(value, line, "sf_heads");
        check_positive(cfg.sf_heads, line, "sf_heads");
    } else if (key == "sf_dim") {
        cfg.sf_dim = parse_long(value, line, "sf_dim");
        check_positive(cfg.sf_dim, line, "sf_dim");
    } else if (key == "sf_seq") {
        cfg.sf_seq = parse_long(value, line, "sf_seq");
        check_positive(cfg.sf_seq, line, "sf_seq");
    } else if (key == "sf_vocab") {
        cfg.sf_vocab = parse_long(value, line, "sf_vocab");
        if (cfg.sf_vocab < 2) throw ParseError(line, "key 'sf_vocab': must be >= 2");
    } else if (key == "sf_method") {
        check_choice(value, {"plain-euler", "conformal-euler", "exp-euler"}, line, "sf_method");
        cfg.sf_method = value;
    } else if (key == "sf_attention") {
        check_choice(value, {"softmax", "linear"}, line, "sf_attention");
        cfg.sf_attention = value;
    } else if (key == "sf_causal") {
        cfg.sf_causal = parse_bool(value, line, "sf_causal");
    } else if (key == "sf_t0") {
        cfg.sf_t0 = parse_double(value, line, "sf_t0");
        check_positive(cfg.sf_t0, line, "sf_t0");
    } else if (key == "sf_c_log") {
        cfg.sf_c_log = parse_double(value, line, "sf_c_log");
        check_positive(cfg.sf_c_log, line, "sf_c_log");
    } else if (key == "sf_c_lin") {
        cfg.sf_c_lin = parse_double(value, line, "sf_c_lin");
        check_positive(cfg.sf_c_lin, line, "sf_c_lin");
    } else if (key == "sf_weights") {
        cfg.sf_weights = value;
    } else if (key == "sf_tokens") {
        cfg.sf_tokens = value;
    } else {
        throw ParseError(line, "unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text, Command c) {
    ExperimentConfig cfg = default_config(c);
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const KvEntry kv = parse_kv_line(line, line_no);
        if (kv.key.empty()) continue;
        apply_key(cfg, kv.key, kv.value, line_no);
    }
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "system = " << cfg.system << "\n";
    os << "n = " << cfg.n << "\n";
    os << "d = " << cfg.d << "\n";
    os << "steps = " << cfg.steps << "\n";
    os << "h = " << num(cfg.h) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "weight_scale = " << num(cfg.weight_scale) << "\n";
    os << "x_scale = " << num(cfg.x_scale) << "\n";
    os << "y_scale = " << num(cfg.y_scale) << "\n";
    os << "damping = " << cfg.damping << "\n";
    os << "damping_m = " << num(cfg.damping_m) << "\n";
    os << "damping_r = " << num(cfg.damping_r) << "\n";
    os << "damping_t0 = " << num(cfg.damping_t0) << "\n";
    os << "integrator = " << cfg.integrator << "\n";
    os << "alpha_mode = " << cfg.alpha_mode << "\n";
    os << "alpha_const = " << num(cfg.alpha_const) << "\n";
    os << "record_every = " << cfg.record_every << "\n";
    os << "out = " << cfg.out_dir << "\n";
    os << "svg = " << (cfg.svg ? "true" : "false") << "\n";
    os << "sf_layers = " << cfg.sf_layers << "\n";
    os << "sf_heads = " << cfg.sf_heads << "\n";
    os << "sf_dim = " << cfg.sf_dim << "\n";
    os << "sf_seq = " << cfg.sf_seq << "\n";
    os << "sf_vocab = " << cfg.sf_vocab << "\n";
    os << "sf_method = " << cfg.sf_method << "\n";
    os << "sf_attention = " << cfg.sf_attention << "\n";
    os << "sf_causal = " << (cfg.sf_causal ? "true" : "false") << "\n";
    os << "sf_t0 = " << num(cfg.sf_t0) << "\n";
    os << "sf_c_log = " << num(cfg.sf_c_log) << "\n";
    os << "sf_c_lin = " << num(cfg.sf_c_lin) << "\n";
    os << "sf_weights = " << cfg.sf_weights << "\n";
    os << "sf_tokens = " << cfg.sf_tokens << "\n";
    return os.str();
}

} // namespace sympdyn::harness
