#include <cstring>
#include <iostream>
#include <string>

#include "convdiff/runner.hpp"

namespace {

void print_usage() {
    std::cout << "usage: convdiff <solve|compare|bench> <config> [options]\n"
              << "options:\n"
              << "  --output-dir DIR          override [output] directory\n"
              << "  --scheme fv|convfem       override discretisation scheme\n"
              << "  --rods withdrawn|inserted override assembly rod state\n"
              << "  --core-map ROWS           override core map, e.g. WWI/WIW/IWW\n"
              << "  --repeats N               override bench repeat count\n";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        print_usage();
        return 1;
    }
    const std::string command = argv[1];
    if (command != "solve" && command != "compare" && command != "bench") {
        std::cerr << "convdiff: unknown command '" << command << "'\n";
        print_usage();
        return 1;
    }

    try {
        convdiff::RunConfig config = convdiff::load_run_config(argv[2]);
        for (int a = 3; a < argc; ++a) {
            const std::string opt = argv[a];
            auto value = [&]() -> std::string {
                if (a + 1 >= argc)
                    throw convdiff::ParseError("missing value for option " + opt);
                return argv[++a];
            };
            if (opt == "--output-dir") {
                config.output_dir = value();
            } else if (opt == "--scheme") {
                const std::string v = value();
                if (v == "fv") config.scheme = convdiff::Scheme::fv;
                else if (v == "convfem") config.scheme = convdiff::Scheme::convfem;
                else throw convdiff::ParseError("--scheme must be fv or convfem");
            } else if (opt == "--rods") {
                const std::string v = value();
                if (v == "withdrawn") config.rods = convdiff::RodState::withdrawn;
                else if (v == "inserted") config.rods = convdiff::RodState::inserted;
                else throw convdiff::ParseError("--rods must be withdrawn or inserted");
            } else if (opt == "--core-map") {
                config.core_map = convdiff::parse_core_map(value());
                config.core_map_given = true;
            } else if (opt == "--repeats") {
                config.bench_repeats = std::stoi(value());
                if (config.bench_repeats < 1)
                    throw convdiff::ParseError("--repeats must be >= 1");
            } else {
                throw convdiff::ParseError("unknown option " + opt);
            }
        }
        if (config.scheme == convdiff::Scheme::convfem &&
            config.vacuum_mode == convdiff::VacuumMode::absorption)
            config.vacuum_mode = convdiff::VacuumMode::zero_halo;

        if (command == "solve") return convdiff::run_solve(config);
        if (command == "compare") return convdiff::run_compare(config);
        return convdiff::run_bench(config);
    } catch (const convdiff::NonConvergence& e) {
        std::cerr << "convdiff: " << e.what() << "\n";
        return 2;
    } catch (const convdiff::Error& e) {
        std::cerr << "convdiff: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "convdiff: " << e.what() << "\n";
        return 1;
    }
}
