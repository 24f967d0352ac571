#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "hcs/commands.hpp"

namespace {

unsigned thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HCS_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
        } catch (const std::exception&) {
            std::cerr << "ignoring invalid HCS_THREADS='" << env << "'\n";
        }
    }
    return n;
}

std::string usage() {
    std::string s = "usage: hcs <command> <scenario.cfg> [--out DIR] [--n-max N] [--delta X] [--grid N] [--seed S]\n"
                    "commands:";
    for (const auto& c : hcs::command_names()) s += " " + c;
    return s + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical-point avoidance for Helmholtz boundary illumination"};
    std::string command;
    std::string scenario;
    hcs::CommandOptions options;
    app.add_option("command", command, "command to run")->required();
    app.add_option("scenario", scenario, "scenario file")->required();
    app.add_option("--out", options.out, "artifact directory");
    app.add_option("--n-max", options.n_max, "deepest frequency level");
    app.add_option("--delta", options.delta, "gradient threshold");
    app.add_option("--grid", options.grid, "solve-grid nodes per axis");
    app.add_option("--seed", options.seed, "boundary datum seed");
    app.add_option("--omega", options.omega, "solve: also write the field at this frequency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << usage();
        return hcs::kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << usage();
        return hcs::kExitInputError;
    }

    const auto& names = hcs::command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        std::cerr << "unknown command '" << command << "'\n" << usage();
        return hcs::kExitInputError;
    }
    options.threads = thread_cap();
    return hcs::run_command(command, std::filesystem::path(scenario), options, std::cout, std::cerr);
}
