#include <iostream>
#include <string>
#include <vector>

#include "spinstar/experiments/config.hpp"
#include "spinstar/experiments/runner.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void print_usage(std::ostream& os) {
    os << "usage:\n"
          "  spinstar list\n"
          "  spinstar run <experiment> [--n N] [--p P] [--c C ...] [--out DIR] [--plots]\n"
          "               [--config FILE] [--theta-points K] [--time-points K] [--c-points K] [--theta T]\n"
          "\n"
          "Worker threads: SPINSTAR_WORKERS (default: hardware concurrency).\n";
}

} // namespace

int main(int argc, char** argv) {
    using namespace spinstar;
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        print_usage(std::cerr);
        return kExitUsage;
    }
    const std::string command = args.front();
    args.erase(args.begin());

    if (command == "-h" || command == "--help" || command == "help") {
        print_usage(std::cout);
        return 0;
    }
    if (command == "list") {
        for (const auto& e : experiments::kExperiments)
            std::cout << e.name << "\t" << e.figure << "\t" << e.summary << "\n";
        return 0;
    }
    if (command != "run") {
        std::cerr << "spinstar: unknown command '" << command << "'\n";
        print_usage(std::cerr);
        return kExitUsage;
    }

    try {
        const auto cfg = experiments::parse_config(args);
        const auto summary = experiments::run_experiment(cfg);
        for (const auto& f : summary.files) std::cout << f.string() << "\n";
        std::cerr << "spinstar: " << summary.rows_written << " rows written\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "spinstar: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "spinstar: " << e.what() << "\n";
        return kExitRuntime;
    }
}
