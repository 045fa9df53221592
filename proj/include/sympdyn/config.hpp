#pragma once

#include <cstdint>
#include <string>

namespace sympdyn::harness {

enum class Command {
    Simulate,
    VerifyElliptic,
    EnergyDecay,
    CompareIntegrators,
    SympformerForward,
    Selftest,
};

const char* command_name(Command c);
Command parse_command(const std::string& s);

// Every key is overridable from the command line (`--key value`); defaults
// depend on the command (see the README table). Unknown keys are errors.
struct ExperimentConfig {
    Command command = Command::Simulate;

    // instance
    std::string system = "softmax"; // linear | softmax | baseline
    long n = 8;
    long d = 2;
    long steps = 200;
    double h = 0.01;
    std::uint64_t seed = 1;
    double weight_scale = 0.2; // eigenvalue scale of the seeded (A, V) pair
    double x_scale = 0.3;      // initial position scale
    double y_scale = 0.0;      // initial momentum scale (0 = paper's Y(0) = 0)

    // damping schedule
    std::string damping = "constant"; // zero | constant | polynomial | log-linear
    double damping_m = 1.0;
    double damping_r = 3.0;
    double damping_t0 = 1.0;

    // integrator
    std::string integrator = "exp-euler";
    std::string alpha_mode = "ratio"; // plain Euler: ratio | constant
    double alpha_const = 0.9;
    long record_every = 1;

    // output
    std::string out_dir = "out";
    bool svg = true;

    // sympformer-forward
    long sf_layers = 2;
    long sf_heads = 2;
    long sf_dim = 8;
    long sf_seq = 4;
    long sf_vocab = 16;
    std::string sf_method = "conformal-euler";
    std::string sf_attention = "softmax";
    bool sf_causal = true;
    double sf_t0 = 1.0;
    double sf_c_log = 1.0;
    double sf_c_lin = 0.1;
    std::string sf_weights; // empty = seeded random initialization
    std::string sf_tokens;  // empty = seeded random tokens

    bool operator==(const ExperimentConfig&) const = default;
};

// Command-specific defaults (the table in the README).
ExperimentConfig default_config(Command c);

// Applies one key; `line` feeds error messages. Throws ParseError on unknown
// keys, type mismatches, and range violations.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               std::size_t line);

// `key = value` lines, `#` comments. Starts from default_config(c).
ExperimentConfig parse_config(const std::string& text, Command c);

std::string serialize_config(const ExperimentConfig& cfg);

} // namespace sympdyn::harness
