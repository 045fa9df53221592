// Command-line entry point:
//   sympdyn <command> [--config <path>] [--out <dir>] [--seed <u64>] [--quiet] [--key value ...]
// Any config key can be overridden with --key value; see the README for the
// per-command default tables.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "sympdyn/commands.hpp"
#include "sympdyn/error.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: sympdyn <command> [--config <path>] [--out <dir>] [--seed <u64>] [--quiet]\n"
          "               [--<key> <value> ...]\n"
          "commands: simulate | verify-elliptic | energy-decay | compare-integrators |\n"
          "          sympformer-forward | selftest\n";
}

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw sympdyn::Error("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace sympdyn;
    if (argc < 2) {
        print_usage(std::cerr);
        return 1;
    }
    const std::string cmd_arg = argv[1];
    if (cmd_arg == "--help" || cmd_arg == "-h" || cmd_arg == "help") {
        print_usage(std::cout);
        return 0;
    }

    try {
        const harness::Command cmd = harness::parse_command(cmd_arg);
        harness::ExperimentConfig cfg = harness::default_config(cmd);
        if (const char* env_out = std::getenv("SYMPDYN_OUT"); env_out != nullptr)
            cfg.out_dir = env_out;

        // first pass: config file, then command-line overrides in order
        bool quiet = false;
        std::vector<std::pair<std::string, std::string>> overrides;
        for (int i = 2; i < argc; ++i) {
            std::string arg = argv[i];
            if (arg == "--quiet") {
                quiet = true;
                continue;
            }
            if (arg.rfind("--", 0) != 0) {
                std::cerr << "unexpected argument '" << arg << "'\n";
                print_usage(std::cerr);
                return 1;
            }
            if (i + 1 >= argc) {
                std::cerr << "missing value for '" << arg << "'\n";
                return 1;
            }
            std::string value = argv[++i];
            std::string key = arg.substr(2);
            if (key == "config") {
                const harness::ExperimentConfig parsed =
                    harness::parse_config(read_file(value), cmd);
                // config file applies now; later --key flags still win
                cfg = parsed;
                if (const char* env_out = std::getenv("SYMPDYN_OUT");
                    env_out != nullptr && cfg.out_dir == harness::default_config(cmd).out_dir)
                    cfg.out_dir = env_out;
            } else {
                overrides.emplace_back(std::move(key), std::move(value));
            }
        }
        for (const auto& [key, value] : overrides) harness::apply_key(cfg, key, value, 0);

        const harness::RunOutcome outcome = harness::run(cfg);
        if (!quiet) {
            for (const auto& line : outcome.lines) std::cout << line << "\n";
            for (const auto& file : outcome.files) std::cout << "wrote " << file << "\n";
        }
        return outcome.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
